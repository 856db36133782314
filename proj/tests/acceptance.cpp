// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Figure bundles are reproduced into a scratch directory and checked from
// their CSVs and manifests. Identities and numerics call the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "excitable/analysis.hpp"
#include "excitable/cli/csv.hpp"
#include "excitable/cli/figures.hpp"
#include "excitable/hh.hpp"
#include "excitable/memristive.hpp"
#include "excitable/numerics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace excitable;
using namespace excitable::cli;

namespace {

// Tolerances.
constexpr double kDerivativeRel = 1e-6;
constexpr double kHHSuperPeak = 0.0;     // mV
constexpr double kHHSubPeak = -50.0;     // mV
constexpr double kHHRestDrift = 0.01;    // mV over 500 ms
constexpr double kJumpFactor = 3.0;
constexpr double kReturnToRest = 1e-3;
constexpr double kReductionTol = 1e-12;
constexpr double kConvolutionTol = 1e-9;
constexpr double kOrderTol = 0.2;
constexpr double kHalvingTol = 0.005;
constexpr double kSpacing = 0.04;        // relative amplitude spacing of the sub/super pair
constexpr double kSpacingSlack = 0.002;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "" : "FAILED ") + what);
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::vector<double> column(const LongTable& t) { return t.value; }

std::vector<double> positions(const LongTable& t) { return t.x; }

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Collected by the figure criteria for the numerics suite.
std::vector<std::pair<std::string, json>> g_halving;

void collect_halving(const FigureReport& r) {
    for (const auto& run : r.runs) {
        g_halving.emplace_back(run.manifest["config"]["output"]["name"].get<std::string>(),
                               run.manifest["dt_halving_delta"]);
    }
}

// ---------------------------------------------------------------------------

Outcome positive_feedback(const fs::path&) {
    Outcome o;
    const MemTemporalParams p;
    const auto iv = memristive::positive_feedback_interval(p);
    // (1, (-1/10 + 10 + 1) / 2) = (1, 109/20), compared in integer arithmetic.
    const bool lo_ok = iv && iv->lo * 20.0 == 20.0;
    const bool hi_ok = iv && iv->hi == 109.0 / 20.0;
    o.require(lo_ok && hi_ok,
              "interval (" + (iv ? fmt(iv->lo) + ", " + fmt(iv->hi) : std::string("empty")) + ") == (1, 109/20)");
    for (double v : {1.5, 3.0, 5.0}) {
        const double g = memristive::differential_conductance(p, v, memristive::Regime::fast);
        o.require(g < 0.0, "G(" + fmt(v) + ") = " + fmt(g) + " < 0");
    }
    for (double v : {6.0, 8.0}) {
        const double g = memristive::differential_conductance(p, v, memristive::Regime::fast);
        o.require(g > 0.0, "G(" + fmt(v) + ") = " + fmt(g) + " > 0");
    }
    double worst = 0.0;
    for (double v : {1.5, 3.0, 5.0, 6.0, 8.0}) {
        const double h = 1e-5;
        const double fd = (memristive::quasi_static_current(p, v + h, memristive::Regime::fast) -
                           memristive::quasi_static_current(p, v - h, memristive::Regime::fast)) /
                          (2.0 * h);
        const double an = memristive::differential_conductance(p, v, memristive::Regime::fast);
        worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(an), 1e-12));
    }
    o.require(worst <= kDerivativeRel, "analytic vs central difference rel " + fmt(worst));
    return o;
}

Outcome negative_feedback(const fs::path&) {
    Outcome o;
    const MemTemporalParams p;
    const double b = memristive::negative_feedback_bound(p);
    o.require(b == 1.0, "bound = " + fmt(b) + " == 1");
    for (double v : {1.5, 2.0, 5.0, 10.0}) {
        const double g = memristive::differential_conductance(p, v, memristive::Regime::both_active);
        o.require(g > 0.0, "G_both(" + fmt(v) + ") = " + fmt(g) + " > 0");
    }
    return o;
}

Outcome hh_all_or_none(const fs::path& root) {
    Outcome o;
    const fs::path dir = root / "fig2";
    FigureReport r = reproduce_figure("fig2", dir);
    collect_halving(r);
    const LongTable sub = read_long_csv(dir / "fig2_sub.csv");
    const LongTable super = read_long_csv(dir / "fig2_super.csv");
    const double a = r.manifest["calibration"]["threshold"];
    const double peak_sub = max_of(column(sub.select("v")));
    const double peak_super = max_of(column(super.select("v")));
    o.require(peak_super > kHHSuperPeak, "A* = " + fmt(a) + ", peak(1.02 A*) = " + fmt(peak_super) + " > 0 mV");
    o.require(peak_sub < kHHSubPeak, "peak(0.98 A*) = " + fmt(peak_sub) + " < -50 mV");
    bool gates = true;
    for (const auto* t : {&sub, &super}) {
        for (const char* g : {"m", "h", "n"}) {
            for (double x : t->select(g).value) gates = gates && x >= 0.0 && x <= 1.0;
        }
    }
    o.require(gates, "gating variables within [0, 1]");
    const auto rest = column(read_long_csv(dir / "fig2_rest.csv").select("v"));
    double drift = 0.0;
    for (double v : rest) drift = std::max(drift, std::abs(v - rest.front()));
    const double span = read_long_csv(dir / "fig2_rest.csv").select("v").t.back();
    o.require(drift < kHHRestDrift && span >= 500.0, "rest drift " + fmt(drift) + " mV over " + fmt(span) + " ms");
    return o;
}

Outcome temporal_excitability(const fs::path& root) {
    Outcome o;
    const fs::path dir = root / "fig5";
    FigureReport r = reproduce_figure("fig5", dir);
    collect_halving(r);
    const LongTable rest = read_long_csv(dir / "fig5_rest.csv");
    bool zero = true;
    for (double v : rest.value) zero = zero && v == 0.0;
    o.require(zero && rest.t.back() >= 100.0, "zero input keeps every component exactly 0 for " +
                                                  fmt(rest.t.back()) + " ms");
    const auto sub = column(read_long_csv(dir / "fig5_sub.csv").select("v"));
    const auto super = column(read_long_csv(dir / "fig5_super.csv").select("v"));
    const double ratio = max_of(super) / max_of(sub);
    o.require(ratio > kJumpFactor, "peak ratio " + fmt(max_of(super)) + " / " + fmt(max_of(sub)) + " = " +
                                       fmt(ratio) + " > 3");
    o.require(std::abs(super.back()) < kReturnToRest, "final |v| = " + fmt(std::abs(super.back())) + " < 1e-3");
    return o;
}

// Shared checks for the two-pulse field figures.
void field_pair_checks(Outcome& o, const fs::path& dir, const std::string& name, const std::string& var,
                       double level, double sigma_x, double persist_from) {
    const json m = read_json(dir / (name + "_manifest.json"));
    const double a_sub = m["calibration"]["amplitudes"]["sub"];
    const double a_super = m["calibration"]["amplitudes"]["super"];
    const double threshold = m["calibration"]["threshold"];
    const double spacing = a_super / a_sub - 1.0;
    o.require(std::abs(spacing - kSpacing) <= kSpacingSlack && a_sub <= threshold && threshold <= a_super,
              m["calibration"]["method"].get<std::string>() + ": A = " + fmt(a_sub) + " / " + fmt(a_super) +
                  " around A* = " + fmt(threshold));

    const LongTable sub = read_long_csv(dir / (name + "_sub_readouts.csv"));
    const LongTable super = read_long_csv(dir / (name + "_super_readouts.csv"));
    const double t_sub = sub.t.front();
    const double t_super = super.t.back();
    const double sub_max = max_of(column(sub.at_time(var, t_sub)));
    o.require(sub_max < level, "sub: max " + var + "(t=" + fmt(t_sub) + ") = " + fmt(sub_max) + " < " + fmt(level));

    const LongTable snap = super.at_time(var, t_super);
    const auto values = column(snap);
    const auto x = positions(snap);
    const auto regions = analysis::regions_above(values, level);
    const double width = analysis::fwhm(values, x, median(values));
    o.require(!regions.empty() && width < 2.0 * sigma_x,
              "super: " + std::to_string(regions.size()) + " region(s) above " + fmt(level) + " at t=" +
                  fmt(t_super) + ", FWHM " + fmt(width) + " < " + fmt(2.0 * sigma_x));

    const LongTable summary = read_long_csv(dir / (name + "_super_summary.csv")).select("max_" + var);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < summary.size(); ++i) {
        if (summary.t[i] >= persist_from && summary.t[i] <= t_super) lowest = std::min(lowest, summary.value[i]);
    }
    o.require(lowest > level, "persists: min over [" + fmt(persist_from) + ", " + fmt(t_super) + "] of max " + var +
                                  " = " + fmt(lowest));
}

double pulse_sigma_t(const FigureReport& r, std::size_t pulse) {
    return r.manifest["base_config"]["stimulus"]["pulses"][pulse]["sigma_t"];
}
double pulse_t0(const FigureReport& r, std::size_t pulse) {
    return r.manifest["base_config"]["stimulus"]["pulses"][pulse]["t0"];
}
double pulse_sigma_x(const FigureReport& r, std::size_t pulse) {
    return r.manifest["base_config"]["stimulus"]["pulses"][pulse]["sigma_x"];
}

Outcome amari_excitability(const fs::path& root) {
    Outcome o;
    const fs::path dir = root / "fig4";
    FigureReport r = reproduce_figure("fig4", dir);
    collect_halving(r);
    const double theta = r.manifest["base_config"]["params"]["theta"];
    field_pair_checks(o, dir, "fig4", "u", theta, pulse_sigma_x(r, 1), pulse_t0(r, 1) + 10.0 * pulse_sigma_t(r, 1));
    return o;
}

Outcome spatial_excitability(const fs::path& root) {
    Outcome o;
    const fs::path dir = root / "fig7";
    FigureReport r = reproduce_figure("fig7", dir);
    collect_halving(r);
    const double v_th = r.manifest["base_config"]["params"]["excitatory"]["v_th"];
    field_pair_checks(o, dir, "fig7", "v_E", v_th, pulse_sigma_x(r, 1), pulse_t0(r, 1) + 10.0 * pulse_sigma_t(r, 1));
    for (const char* run : {"fig7_sub", "fig7_super"}) {
        const json m = read_json(dir / (std::string(run) + "_manifest.json"));
        const double g = m["diagnostics"]["min_memductance"];
        o.require(g >= 0.0, std::string(run) + ": min memductance " + fmt(g) + " >= 0");
    }
    return o;
}

ScenarioConfig manifest_config(const fs::path& p) { return from_json(read_json(p)["config"]); }

Outcome unification(const fs::path& root) {
    Outcome o;
    const fs::path dir = root / "fig8";
    FigureReport r = reproduce_figure("fig8", dir);
    collect_halving(r);

    const LongTable temporal = read_long_csv(dir / "fig8_temporal_slice.csv");
    const double peak = max_of(temporal.value);
    const double e_e = r.manifest["base_config"]["params"]["intrinsic"]["e_e"];
    o.require(peak > 0.5 * e_e && std::abs(temporal.value.back()) < kReturnToRest,
              "v_E(0, t): peak " + fmt(peak) + ", final " + fmt(temporal.value.back()));
    const LongTable spatial = read_long_csv(dir / "fig8_spatial_slice.csv");
    const double sigma_x = pulse_sigma_x(r, 1);
    const double width = analysis::fwhm(spatial.value, spatial.x, median(spatial.value));
    o.require(width < 2.0 * sigma_x, "v_E(x, t=" + fmt(spatial.t.front()) + "): FWHM " + fmt(width) + " < " +
                                         fmt(2.0 * sigma_x));

    // Synaptic ḡ = 0 against the temporal neuron under the superthreshold rectangular pulse.
    {
        const ScenarioConfig t = manifest_config(root / "fig5" / "fig5_super_manifest.json");
        const ScenarioConfig f = manifest_config(dir / "fig8_super_manifest.json");
        MemSynapticParams syn = f.synaptic;
        syn.excitatory.g_max = 0.0;
        syn.inhibitory.g_max = 0.0;
        const SpatialGrid grid = make_grid(f);
        const TimeGrid time = make_time(t);
        StimulusProgram stim = t.stimulus;
        stim.target = StimulusTarget::excitatory;
        memristive::FieldOptions opts;
        opts.stride = 10;
        const auto field = memristive::simulate_spatiotemporal(t.temporal, syn, stim, grid, time, {}, opts);
        const auto point = memristive::simulate_temporal(t.temporal, stim, time, 10);
        double worst = 0.0;
        double scale = 0.0;
        const std::pair<const char*, const char*> pairs[] = {{"v_E", "v"}, {"ve_E", "v_e"}, {"vi_E", "v_i"}};
        for (std::size_t s = 0; s < point.snapshots.size(); ++s) {
            for (const auto& [fc, pc] : pairs) {
                const double ref = point.component(s, pc)[0];
                scale = std::max(scale, std::abs(ref));
                for (double v : field.trajectory.component(s, fc)) worst = std::max(worst, std::abs(v - ref));
            }
            for (const char* c : {"v_I", "ve_I", "vi_I"}) {
                for (double v : field.trajectory.component(s, c)) worst = std::max(worst, std::abs(v));
            }
        }
        const double rel = worst / std::max(scale, 1e-300);
        o.require(rel <= kReductionTol, "synaptic g = 0 vs temporal neuron at " + std::to_string(grid.size()) +
                                            " points: rel " + fmt(rel));
    }
    // Intrinsic ḡ = 0 against the E-I field under the superthreshold field stimulus.
    {
        const ScenarioConfig e = manifest_config(root / "fig7" / "fig7_super_manifest.json");
        MemTemporalParams intrinsic;
        intrinsic.C = e.synaptic.C;
        intrinsic.g_l = e.synaptic.g_l;
        intrinsic.g_e = 0.0;
        intrinsic.g_i = 0.0;
        const SpatialGrid grid = make_grid(e);
        const TimeGrid time = make_time(e);
        memristive::FieldOptions opts;
        opts.stride = e.output.stride;
        const auto ei = memristive::simulate_ei_field(e.synaptic, e.stimulus, grid, time, {}, opts);
        const auto st = memristive::simulate_spatiotemporal(intrinsic, e.synaptic, e.stimulus, grid, time, {}, opts);
        double worst = 0.0;
        double scale = 0.0;
        for (std::size_t s = 0; s < ei.trajectory.snapshots.size(); ++s) {
            for (const char* c : {"v_E", "v_I", "s_E", "s_I"}) {
                const auto a = ei.trajectory.component(s, c);
                const auto b = st.trajectory.component(s, c);
                worst = std::max(worst, max_abs_diff(a, b));
                for (double v : a) scale = std::max(scale, std::abs(v));
            }
        }
        const double rel = worst / std::max(scale, 1e-300);
        o.require(rel <= kReductionTol, "intrinsic g = 0 vs E-I field: rel " + fmt(rel));
    }
    return o;
}

Outcome numerics(const fs::path& root) {
    Outcome o;
    {
        std::mt19937_64 rng(20240611);
        std::uniform_int_distribution<int> half_points(5, 400);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const std::size_t n = 2 * static_cast<std::size_t>(half_points(rng)) + 1;
            const SpatialGrid grid = SpatialGrid::make(1.0 + 49.0 * unit(rng), n);
            const auto norm = unit(rng) < 0.5 ? KernelNormalization::raw : KernelNormalization::unit_integral;
            const double s1 = 0.05 + 3.0 * unit(rng);
            const Kernel kernel = unit(rng) < 0.5
                                      ? exponential_kernel(s1, grid, norm, 0.1 + 5.0 * unit(rng))
                                      : difference_kernel(s1, s1 * (1.1 + 4.0 * unit(rng)), grid, norm,
                                                          0.1 + 5.0 * unit(rng), 0.1 + 5.0 * unit(rng));
            std::vector<double> field(n);
            for (auto& v : field) v = 2.0 * unit(rng) - 1.0;
            const auto a = convolve_spectral(field, kernel, grid);
            const auto b = convolve_direct(field, kernel, grid);
            worst = std::max(worst, analysis::relative_sup_difference(a, b));
        }
        o.require(worst <= kConvolutionTol, "spectral vs direct over 200 cases: rel " + fmt(worst));
    }
    {
        auto error_at = [](double dt) {
            const RhsFunction rhs = [](double, std::span<const double> y, std::span<double> d) { d[0] = -y[0]; };
            IntegrateOptions opts;
            opts.layout = {{"y"}, 1};
            const Trajectory t = integrate(rhs, {1.0}, TimeGrid::make(0.0, 1.0, dt), opts);
            return std::abs(t.snapshots.back()[0] - std::exp(-1.0));
        };
        const double e1 = error_at(0.04), e2 = error_at(0.02), e3 = error_at(0.01);
        const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
        o.require(std::abs(p1 - 4.0) <= kOrderTol && std::abs(p2 - 4.0) <= kOrderTol,
                  "RK4 order " + fmt(p1) + ", " + fmt(p2));
    }
    {
        bool all = !g_halving.empty();
        double worst = 0.0;
        std::size_t checked = 0;
        for (const auto& [name, delta] : g_halving) {
            if (delta.is_null()) continue;  // rest runs carry no convergence check
            ++checked;
            worst = std::max(worst, delta.get<double>());
            if (!(delta.get<double>() < kHalvingTol)) {
                all = false;
                o.notes.push_back("  " + name + ": " + fmt(delta.get<double>()));
            }
        }
        o.require(all && checked > 0, "dt halving over " + std::to_string(checked) + " runs: max " + fmt(worst));
    }
    {
        // Fresh reruns, one from the built-in figure and one from a manifest config.
        bool same = true;
        std::size_t files = 0;
        const fs::path again = root / "rerun";
        reproduce_figure("fig5", again / "fig5", {false});
        for (const auto& e : fs::directory_iterator(root / "fig5")) {
            if (e.path().extension() != ".csv") continue;
            ++files;
            same = same && slurp(e.path()) == slurp(again / "fig5" / e.path().filename());
        }
        const ScenarioConfig c = manifest_config(root / "fig8" / "fig8_sub_manifest.json");
        ScenarioConfig quick = c;
        quick.convergence_check = false;
        run_scenario(quick, again / "fig8");
        for (const char* f : {"fig8_sub.csv", "fig8_sub_readouts.csv", "fig8_sub_summary.csv"}) {
            ++files;
            same = same && slurp(root / "fig8" / f) == slurp(again / "fig8" / f);
        }
        o.require(same, std::to_string(files) + " CSVs byte-identical on rerun");
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "excitable-acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    struct Criterion {
        int id;
        const char* name;
        double budget;  // seconds
        std::function<Outcome(const fs::path&)> run;
    };
    const Criterion criteria[] = {
        {1, "positive feedback interval", 1.0, positive_feedback},
        {2, "negative feedback bound", 1.0, negative_feedback},
        {3, "HH all-or-none", 10.0, hh_all_or_none},
        {4, "memristive temporal excitability", 10.0, temporal_excitability},
        {5, "Amari spatial excitability", 60.0, amari_excitability},
        {6, "memristive spatial excitability", 120.0, spatial_excitability},
        {7, "spatio-temporal unification", 180.0, unification},
        {8, "numerics suite", 60.0, numerics},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(root);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.require(secs < c.budget, "runtime " + fmt(secs) + " s < " + fmt(c.budget) + " s");
        if (!o.pass) ++failures;
        std::printf("criterion %d %s: %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL");
        for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
