// Command-line front end: run, reproduce, bisect and plot.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "excitable/cli/bisect.hpp"
#include "excitable/cli/config.hpp"
#include "excitable/cli/figures.hpp"
#include "excitable/cli/plot.hpp"
#include "excitable/cli/scenario.hpp"

namespace fs = std::filesystem;
using namespace excitable;
using namespace excitable::cli;

namespace {

enum Exit { ok = 0, failure = 1, parse = 2, validation = 3, numeric = 4, bracket = 5 };

fs::path default_root() {
    if (const char* env = std::getenv("EXCITABLE_OUT"); env && *env) return env;
    return "out";
}

fs::path resolve_out(const std::string& flag, const std::string& from_config, const std::string& name) {
    if (!flag.empty()) return flag;
    if (!from_config.empty()) return from_config;
    return default_root() / name;
}

struct Overrides {
    std::optional<double> dt;
    std::optional<std::size_t> stride;
};

ScenarioConfig load(const std::string& path, const Overrides& o) {
    ScenarioConfig c = load_config(path);
    if (o.dt) c.time.dt = *o.dt;
    if (o.stride) c.output.stride = *o.stride;
    auto v = validate(c);
    if (!v.empty()) throw ValidationError(std::move(v));
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Excitable-media simulator: Hodgkin-Huxley, Amari field and memristive models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version());

    std::string out;
    bool seedless = false;
    Overrides overrides;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", out, "Output directory (default $EXCITABLE_OUT/<name> or out/<name>)");
        sub->add_flag("--seedless", seedless, "Assert that no random number generator is used");
    };
    auto numerics = [&](CLI::App* sub) {
        sub->add_option("--dt", overrides.dt, "Override time.dt")->check(CLI::PositiveNumber);
        sub->add_option("--stride", overrides.stride, "Override output.stride")->check(CLI::PositiveNumber);
    };

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run a scenario config");
    run->add_option("config", config_path, "Scenario JSON")->required();
    common(run);
    numerics(run);

    std::string figure;
    bool no_convergence = false;
    auto* reproduce = app.add_subcommand("reproduce", "Reproduce a figure (fig2, fig4, fig5, fig7, fig8)");
    reproduce->add_option("figure", figure, "Figure name")->required();
    reproduce->add_flag("--no-convergence", no_convergence, "Skip the dt-halving runs");
    common(reproduce);

    auto* bisect = app.add_subcommand("bisect", "Bisect the excitability threshold of a scenario");
    bisect->add_option("config", config_path, "Scenario JSON with a bisect section")->required();
    common(bisect);
    numerics(bisect);

    std::string csv;
    std::string svg;
    std::string variable;
    std::string kind = "auto";
    auto* plot = app.add_subcommand("plot", "Render a long-format CSV as SVG");
    plot->add_option("csv", csv, "Input CSV")->required();
    plot->add_option("--out", svg, "Output SVG (default: next to the CSV)");
    plot->add_option("--variable", variable, "Variable to plot");
    plot->add_option("--kind", kind, "auto, line or heatmap")->check(CLI::IsMember({"auto", "line", "heatmap"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : parse;
    }

    try {
        if (seedless) std::cerr << "seedless: no random number generator is used anywhere\n";
        if (run->parsed()) {
            const ScenarioConfig c = load(config_path, overrides);
            const fs::path dir = resolve_out(out, c.output.dir, c.output.name);
            const auto report = run_scenario(c, dir);
            std::cout << report.manifest_path.string() << '\n';
        } else if (reproduce->parsed()) {
            FigureOptions options;
            options.convergence_check = !no_convergence;
            const fs::path dir = resolve_out(out, "", figure);
            figure_config(figure);  // rejects unknown names before creating directories
            const auto report = reproduce_figure(figure, dir, options);
            std::cout << report.manifest_path.string() << '\n';
        } else if (bisect->parsed()) {
            const ScenarioConfig c = load(config_path, overrides);
            if (!c.bisect) throw ParseError("config has no 'bisect' section");
            const auto result = bisect_scenario(c);
            const fs::path dir = resolve_out(out, c.output.dir, c.output.name);
            const nlohmann::json j = {{"config", to_json(c)}, {"version", version()}, {"bisection", to_json(result)}};
            write_json_atomic(dir / (c.output.name + "_bisect.json"), j);
            std::cout << j["bisection"].dump(2) << '\n';
            if (!result.monotone) std::cerr << "warning: classification is not monotone in the explored range\n";
        } else if (plot->parsed()) {
            PlotSpec spec;
            spec.variable = variable;
            spec.kind = kind == "line" ? PlotKind::line : kind == "heatmap" ? PlotKind::heatmap : PlotKind::automatic;
            fs::path target = svg.empty() ? fs::path(csv).replace_extension(".svg") : fs::path(svg);
            emit_plot(csv, target, spec);
            std::cout << target.string() << '\n';
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return parse;
    } catch (const ValidationError& e) {
        std::cerr << "validation failed:\n";
        for (const auto& v : e.violations()) std::cerr << "  violated: " << v << '\n';
        return validation;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return numeric;
    } catch (const BracketError& e) {
        std::cerr << "bisection: " << e.what() << '\n';
        return bracket;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return ok;
}
