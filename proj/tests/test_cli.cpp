#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "excitable/cli/bisect.hpp"
#include "excitable/cli/config.hpp"
#include "excitable/cli/csv.hpp"
#include "excitable/cli/figures.hpp"
#include "excitable/cli/plot.hpp"
#include "excitable/cli/scenario.hpp"

namespace fs = std::filesystem;
using namespace excitable;
using namespace excitable::cli;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("excitable-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

int tool(const std::string& args) {
    const std::string cmd = std::string(EXCITABLE_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kMinimal = R"({"model": "mem-temporal", "time": {"t_end": 20.0}})";

}  // namespace

TEST_CASE("model kinds") {
    for (auto k : {ModelKind::hh, ModelKind::amari, ModelKind::mem_temporal, ModelKind::mem_spatial,
                   ModelKind::mem_spatiotemporal}) {
        CHECK(model_kind_from_string(to_string(k)) == k);
    }
    CHECK(to_string(ModelKind::mem_spatiotemporal) == "mem-spatiotemporal");
    CHECK(primary_variable(ModelKind::amari) == "u");
    CHECK(primary_variable(ModelKind::mem_spatial) == "v_E");
    CHECK_THROWS_AS(model_kind_from_string("fhn"), ParseError);
}

TEST_CASE("minimal config resolves every default") {
    const auto c = parse_config(kMinimal);
    CHECK(c.model == ModelKind::mem_temporal);
    CHECK(c.temporal == MemTemporalParams{});
    CHECK(c.time.t_end == 20.0);
    CHECK(c.time.dt == 0.01);
    const auto j = to_json(c);
    CHECK(j["params"]["g_i"] == 10.0);
    CHECK_FALSE(j.contains("grid"));
}

TEST_CASE("configs round-trip through their JSON") {
    for (const auto& name : figure_names()) {
        const auto c = figure_config(name);
        CHECK(from_json(to_json(c)) == c);
        CHECK(parse_config(to_json(c).dump()) == c);
    }
    auto c = default_config(ModelKind::mem_spatiotemporal);
    c.synaptic.inhibitory.normalization = KernelNormalization::raw;
    c.stimulus.target = StimulusTarget::both;
    c.stimulus.pulses = {GaussianPulse{0.1, 2.0, 3.0, 4.0}, RectangularPulse{0.2, 1.0, 2.5}};
    c.readouts = {1.0, 2.0};
    c.convolution = ConvolutionMethod::direct;
    c.output.variables = {"v_E", "v_I"};
    c.bisect = BisectSettings{};
    c.bisect->readout = 3.0;
    CHECK(from_json(to_json(c)) == c);
}

TEST_CASE("unknown keys are parse errors") {
    try {
        parse_config(R"({"model": "amari", "params": {"tau": 3.0, "sigma_ee": 0.3}})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("sigma_ee") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"model": "hh", "colour": 1})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"model": "hh", "time": {"dt": "fast"}})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"time": {}})"), ParseError);
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse_config("{\n  \"model\": \"hh\",\n  \"time\": {\"dt\": 0.01,}\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() > 0);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("invariant violations are validation errors") {
    try {
        parse_config(R"({"model": "amari", "params": {"sigma_e": 3.0}})");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(e.violations().size() >= 1);
        CHECK(e.violations()[0].find("sigma_E < sigma_I") != std::string::npos);
    }
    auto c = default_config(ModelKind::amari);
    c.grid.n_points = 1000;
    c.readouts = {500.0};
    CHECK(validate(c).size() >= 2);
}

TEST_CASE("csv round-trip keeps every bit") {
    const fs::path dir = scratch("csv");
    const double values[] = {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::nextafter(1.0, 2.0)};
    {
        CsvWriter w(dir / "a.csv", true);
        for (double v : values) w.row(v, -v, "v_E", v * 3.0);
        w.close();
    }
    const auto t = read_long_csv(dir / "a.csv");
    REQUIRE(t.size() == 5);
    CHECK(t.spatial);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(t.t[i] == values[i]);
        CHECK(t.x[i] == -values[i]);
        CHECK(t.value[i] == values[i] * 3.0);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("csv reader rejects malformed input") {
    const fs::path dir = scratch("csv-bad");
    write(dir / "empty.csv", "");
    write(dir / "header.csv", "time,value\n1,2\n");
    write(dir / "nodata.csv", "t,variable,value\n");
    write(dir / "row.csv", "t,variable,value\n1,v,2\n1,v\n");
    write(dir / "num.csv", "t,variable,value\n1,v,abc\n");
    for (const char* f : {"empty.csv", "header.csv", "nodata.csv", "row.csv", "num.csv"}) {
        CHECK_THROWS_AS(read_long_csv(dir / f), ParseError);
    }
    try {
        read_long_csv(dir / "num.csv");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }
}

TEST_CASE("table selection") {
    LongTable t;
    t.spatial = true;
    t.t = {0, 0, 1, 1, 1};
    t.x = {-1, 1, -1, 1, 0};
    t.variable = {"u", "u", "u", "u", "w"};
    t.value = {1, 2, 3, 4, 5};
    CHECK(t.variables() == std::vector<std::string>{"u", "w"});
    CHECK(t.at_time("u", 0.8).value == std::vector<double>{3, 4});
    CHECK(t.at_position("u", 0.9).value == std::vector<double>{2, 4});
}

TEST_CASE("plots") {
    const fs::path dir = scratch("plot");
    const std::string line = line_plot_svg({{"v", {0, 1, 2}, {0, 1, 0}}}, {"title", "t", "v"});
    CHECK(line.rfind("<svg", 0) == 0);
    CHECK(line.find("polyline") != std::string::npos);
    const std::string heat = heatmap_svg({0, 1}, {-1, 0, 1}, {{0, 1, 0}, {1, 2, 1}}, {"h", "t", "x"});
    CHECK(heat.find("<rect") != std::string::npos);

    {
        CsvWriter w(dir / "point.csv", false);
        for (int k = 0; k < 10; ++k) w.row(0.1 * k, "v", std::sin(k));
        w.close();
        CsvWriter f(dir / "field.csv", true);
        for (int k = 0; k < 4; ++k) {
            for (int j = -3; j <= 3; ++j) f.row(k, j, "v_E", k * j);
        }
        f.close();
    }
    emit_plot(dir / "point.csv", dir / "point.svg");
    emit_plot(dir / "field.csv", dir / "field.svg");
    CHECK(slurp(dir / "point.svg").find("polyline") != std::string::npos);
    CHECK(slurp(dir / "field.svg").find("<rect") != std::string::npos);
    // Deterministic given inputs.
    emit_plot(dir / "field.csv", dir / "again.svg");
    CHECK(slurp(dir / "field.svg") == slurp(dir / "again.svg"));
    write(dir / "empty.csv", "");
    CHECK_THROWS_AS(emit_plot(dir / "empty.csv", dir / "empty.svg"), ParseError);
}

TEST_CASE("bisection arithmetic") {
    const double threshold = 3.7;
    const Classifier step = [&](double a) { return Classification{a, a, a > threshold}; };
    const auto r = bisect_threshold(step, 0.0, 10.0, 30, 3);
    CHECK(r.width() <= 10.0 * std::pow(2.0, -30));
    CHECK(r.lo <= threshold);
    CHECK(r.hi >= threshold);
    CHECK(r.increasing);
    CHECK(r.monotone);
    CHECK(r.history.size() == 32);
    CHECK(r.probes.size() == 3);

    const Classifier falling = [&](double a) { return Classification{a, -a, a < threshold}; };
    const auto f = bisect_threshold(falling, 0.0, 10.0, 20);
    CHECK_FALSE(f.increasing);
    CHECK(std::abs(f.threshold - threshold) < 1e-5);

    // One bisection step leaves [5, 10]; the probes at 6.25, 7.5, 8.75 see super, sub, super.
    const Classifier bumpy = [](double a) { return Classification{a, a, (a > 6.0 && a < 7.0) || a > 8.0}; };
    const auto b = bisect_threshold(bumpy, 0.0, 10.0, 1, 3);
    CHECK(b.lo == 5.0);
    CHECK_FALSE(b.monotone);

    CHECK_THROWS_AS(bisect_threshold(step, 5.0, 5.0, 10), BracketError);
    CHECK_THROWS_AS(bisect_threshold(step, 4.0, 9.0, 10), BracketError);
    CHECK_THROWS_AS(bisect_threshold(step, 9.0, 4.0, 10), ValidationError);
}

TEST_CASE("temporal threshold bisection through a config") {
    auto c = figure_config("fig5");
    c.bisect->iterations = 30;
    const auto r = bisect_scenario(c);
    CHECK(r.width() <= 10.0 * std::pow(2.0, -30));
    CHECK(r.monotone);
    CHECK(classify_amplitude(c, r.hi).super);
    CHECK_FALSE(classify_amplitude(c, r.lo).super);
}

TEST_CASE("zero-stimulus temporal run") {
    const fs::path dir = scratch("flat");
    auto c = parse_config(kMinimal);
    c.convergence_check = true;
    c.output.name = "flat";
    const auto r = run_scenario(c, dir);
    const auto t = read_long_csv(dir / "flat.csv");
    CHECK(t.variables() == std::vector<std::string>{"v", "v_e", "v_i"});
    for (double v : t.value) REQUIRE(v == 0.0);
    CHECK(t.t.back() == 20.0);
    const auto m = nlohmann::json::parse(slurp(dir / "flat_manifest.json"));
    CHECK(m["dt_halving_delta"] == 0.0);
    CHECK(m["version"] == version());
    CHECK(m["config"]["params"]["g_e"] == 1.0);
    CHECK(parse_config(m["config"].dump()) == [&] {
        auto e = c;
        e.output.dir = dir.string();
        return e;
    }());
    for (const auto& f : m["outputs"]) CHECK(fs::exists(dir / f.get<std::string>()));
    CHECK_FALSE(fs::exists(dir / "flat_manifest.json.tmp"));
    CHECK(r.manifest == m);
}

TEST_CASE("amari run reads the field at both readout times") {
    const fs::path dir = scratch("amari");
    auto c = figure_config("fig4");
    c.bisect.reset();
    c.grid.n_points = 501;
    c.output.name = "a";
    c.output.plots = false;
    run_scenario(c, dir);
    const auto ro = read_long_csv(dir / "a_readouts.csv");
    const auto times = ro.select("u").t;
    CHECK(std::count(times.begin(), times.end(), 205.0) == 501);
    CHECK(std::count(times.begin(), times.end(), 305.0) == 501);
    const auto stim = read_long_csv(dir / "a_stimulus.csv");
    CHECK(stim.at_time("i_app", 10.0).size() == 501);
}

TEST_CASE("reruns are byte-identical") {
    const fs::path a = scratch("rerun-a"), b = scratch("rerun-b");
    auto c = default_config(ModelKind::mem_spatial);
    c.grid = {25.0, 201};
    c.time.t_end = 20.0;
    c.stimulus.pulses = {GaussianPulse{0.5, 10.0, 5.0, 5.0}};
    c.readouts = {10.0};
    c.output.name = "r";
    run_scenario(c, a);
    run_scenario(c, b);
    for (const char* f : {"r.csv", "r_readouts.csv", "r_summary.csv", "r_stimulus.csv", "r.svg"}) {
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("figure bundle for the temporal neuron") {
    const fs::path dir = scratch("fig5");
    const auto r = reproduce_figure("fig5", dir, {false});
    CHECK(r.runs.size() == 3);
    for (const char* f : {"fig5_sub.csv", "fig5_super.csv", "fig5_sub_stimulus.csv", "fig5_manifest.json"}) {
        CHECK(fs::exists(dir / f));
    }
    const double a = r.manifest["calibration"]["threshold"];
    CHECK(r.manifest["calibration"]["amplitudes"]["super"] == 1.02 * a);
    CHECK_THROWS_AS(figure_config("fig3"), ParseError);
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("exit");
    write(dir / "ok.json", kMinimal);
    write(dir / "bad_sigma.json", R"({"model": "amari", "params": {"sigma_e": 3.0}})");
    write(dir / "typo.json", R"({"model": "amari", "parms": {}})");
    write(dir / "bracket.json",
          R"({"model": "mem-temporal", "stimulus": {"target": "point", "pulses": [{"type": "rectangular", "amplitude": 1, "t_on": 5, "t_off": 6}]},
              "bisect": {"lo": 5, "hi": 5, "iterations": 4, "level": 5}})");
    write(dir / "empty.csv", "");
    const std::string out = " --out " + (dir / "o").string();
    CHECK(tool("run " + (dir / "ok.json").string() + out) == 0);
    CHECK(fs::exists(dir / "o" / "mem-temporal.csv"));
    CHECK(tool("run " + (dir / "ok.json").string() + out + " --dt 0.005 --stride 4 --seedless") == 0);
    CHECK(tool("run " + (dir / "bad_sigma.json").string() + out) == 3);
    CHECK(tool("run " + (dir / "typo.json").string() + out) == 2);
    CHECK(tool("run " + (dir / "missing.json").string() + out) == 2);
    CHECK(tool("bisect " + (dir / "bracket.json").string() + out) == 5);
    CHECK(tool("plot " + (dir / "empty.csv").string()) == 2);
    CHECK(tool("plot " + (dir / "o" / "mem-temporal.csv").string() + " --out " + (dir / "p.svg").string()) == 0);
    CHECK(fs::exists(dir / "p.svg"));
    CHECK(tool("reproduce fig9" + out) == 2);
    CHECK(tool("frobnicate") == 2);
}
