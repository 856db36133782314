#include "excitable/cli/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "excitable/amari.hpp"
#include "excitable/cli/csv.hpp"
#include "excitable/cli/plot.hpp"
#include "excitable/hh.hpp"
#include "excitable/memristive.hpp"

namespace excitable::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return EXCITABLE_VERSION; }

namespace {

std::size_t nearest_snapshot(const Trajectory& traj, double t) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < traj.times.size(); ++s) {
        if (std::abs(traj.times[s] - t) < std::abs(traj.times[best] - t)) best = s;
    }
    return best;
}

std::vector<FieldSnapshot> point_readouts(const Trajectory& traj, const std::vector<double>& times,
                                          const std::string& var) {
    std::vector<FieldSnapshot> out;
    for (double t : times) {
        const std::size_t s = nearest_snapshot(traj, t);
        out.push_back({traj.times[s], {traj.component(s, var)[0]}});
    }
    return out;
}

}  // namespace

SimulationOutput simulate(const ScenarioConfig& c, SimulationCache* cache) {
    {
        auto v = validate(c);
        if (!v.empty()) throw ValidationError(std::move(v));
    }
    const TimeGrid time = make_time(c);
    const std::size_t stride = c.output.stride;
    SimulationOutput out;
    switch (c.model) {
    case ModelKind::hh:
        out.trajectory = hh::simulate_hh(c.hh, c.stimulus, time, stride);
        out.readouts = point_readouts(out.trajectory, c.readouts, "v");
        break;
    case ModelKind::mem_temporal:
        out.trajectory = memristive::simulate_temporal(c.temporal, c.stimulus, time, stride);
        out.readouts = point_readouts(out.trajectory, c.readouts, "v");
        break;
    case ModelKind::amari: {
        const SpatialGrid grid = make_grid(c);
        std::vector<double> rest;
        if (cache && cache->amari_rest) {
            rest = *cache->amari_rest;
        } else {
            amari::Model model(c.amari, grid, c.convolution);
            rest = model.rest_state();
            if (cache) cache->amari_rest = rest;
        }
        amari::SimulationOptions opts;
        opts.stride = stride;
        opts.method = c.convolution;
        auto r = amari::simulate_amari(c.amari, c.stimulus, grid, time, c.readouts, opts, std::move(rest));
        out.trajectory = std::move(r.trajectory);
        for (auto& ro : r.readouts) {
            out.readouts.push_back({ro.t, std::move(ro.u)});
            out.readout_max_rate.push_back(ro.max_abs_rate);
        }
        break;
    }
    case ModelKind::mem_spatial:
    case ModelKind::mem_spatiotemporal: {
        const SpatialGrid grid = make_grid(c);
        memristive::FieldOptions opts;
        opts.stride = stride;
        opts.method = c.convolution;
        auto r = c.model == ModelKind::mem_spatial
                     ? memristive::simulate_ei_field(c.synaptic, c.stimulus, grid, time, c.readouts, opts)
                     : memristive::simulate_spatiotemporal(c.temporal, c.synaptic, c.stimulus, grid, time,
                                                           c.readouts, opts);
        out.trajectory = std::move(r.trajectory);
        for (auto& ro : r.readouts) out.readouts.push_back({ro.t, std::move(ro.v_e)});
        out.min_memductance = r.min_memductance;
        break;
    }
    }
    return out;
}

double trajectory_difference(const Trajectory& a, const Trajectory& b) {
    if (!(a.layout == b.layout) || a.snapshots.size() != b.snapshots.size()) {
        throw GridMismatchError("trajectories do not share a layout and snapshot count");
    }
    double worst = 0.0;
    for (const auto& name : a.layout.components) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
            const auto x = a.component(s, name);
            const auto y = b.component(s, name);
            for (std::size_t j = 0; j < x.size(); ++j) {
                num = std::max(num, std::abs(x[j] - y[j]));
                den = std::max(den, std::abs(y[j]));
            }
        }
        worst = std::max(worst, den > 0.0 ? num / den : num);
    }
    return worst;
}

double dt_halving_delta(const ScenarioConfig& c, const Trajectory& at_dt, SimulationCache* cache) {
    ScenarioConfig half = c;
    half.time.dt = 0.5 * c.time.dt;
    half.output.stride = 2 * c.output.stride;
    const SimulationOutput fine = simulate(half, cache);
    return trajectory_difference(at_dt, fine.trajectory);
}

void write_json_atomic(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << j.dump(2) << '\n';
        if (!out) throw Error("error writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

RunReport run_scenario(const ScenarioConfig& config, const fs::path& out_dir) {
    const auto started = std::chrono::steady_clock::now();
    ScenarioConfig c = config;
    c.output.dir = out_dir.string();
    fs::create_directories(out_dir);

    RunReport report;
    SimulationCache cache;
    report.output = simulate(c, &cache);
    const SimulationOutput& sim = report.output;
    const Trajectory& traj = sim.trajectory;
    const std::string var = primary_variable(c.model);
    const std::string& name = c.output.name;
    std::vector<std::string> outputs;
    auto path = [&](const std::string& suffix) {
        outputs.push_back(name + suffix);
        return out_dir / (name + suffix);
    };
    auto plot = [&](const std::string& csv_suffix, PlotSpec spec = {}) {
        if (!c.output.plots) return;
        const std::string stem = csv_suffix.substr(0, csv_suffix.size() - 4);
        emit_plot(out_dir / (name + csv_suffix), path(stem + ".svg"), spec);
    };

    json diagnostics;
    if (!is_field_model(c.model)) {
        const auto vars = c.output.variables.empty() ? traj.layout.components : c.output.variables;
        write_point_trajectory(path(".csv"), traj, vars);
        plot(".csv", {PlotKind::line, var, name});
        CsvWriter stim(path("_stimulus.csv"), false);
        for (double t : traj.times) stim.row(t, "i_app", c.stimulus.value(0.0, t));
        stim.close();
        plot("_stimulus.csv");
    } else {
        const SpatialGrid grid = make_grid(c);
        const auto vars = c.output.variables.empty() ? std::vector<std::string>{var} : c.output.variables;
        write_field_trajectory(path(".csv"), traj, grid, vars, c.output.x_stride);
        plot(".csv", {PlotKind::heatmap, var, name});

        if (!sim.readouts.empty()) {
            CsvWriter w(path("_readouts.csv"), true);
            for (const auto& ro : sim.readouts) {
                for (std::size_t j = 0; j < grid.size(); ++j) w.row(ro.t, grid.x(j), var, ro.values[j]);
            }
            w.close();
            plot("_readouts.csv", {PlotKind::line, var, name + " readouts"});
        }

        CsvWriter s(path("_summary.csv"), false);
        const std::size_t center = grid.center();
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            const auto field = traj.component(k, var);
            s.row(traj.times[k], "max_" + var, *std::max_element(field.begin(), field.end()));
            s.row(traj.times[k], "center_" + var, field[center]);
            s.row(traj.times[k], "center_i_app", c.stimulus.value(0.0, traj.times[k]));
        }
        s.close();
        plot("_summary.csv");

        // Spatial profile of i_app at the peak time of every Gaussian pulse.
        CsvWriter st(path("_stimulus.csv"), true);
        bool any = false;
        for (const auto& p : c.stimulus.pulses) {
            const auto* g = std::get_if<GaussianPulse>(&p);
            if (!g) continue;
            any = true;
            for (std::size_t j = 0; j < grid.size(); ++j) st.row(g->t0, grid.x(j), "i_app", c.stimulus.value(grid.x(j), g->t0));
        }
        if (!any) {
            for (std::size_t j = 0; j < grid.size(); ++j) st.row(c.time.t_start, grid.x(j), "i_app", 0.0);
        }
        st.close();
        plot("_stimulus.csv", {PlotKind::line, "", name + " stimulus"});
    }

    {
        double peak = -std::numeric_limits<double>::infinity();
        double peak_t = c.time.t_start;
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            const auto field = traj.component(k, var);
            const double m = *std::max_element(field.begin(), field.end());
            if (m > peak) {
                peak = m;
                peak_t = traj.times[k];
            }
        }
        diagnostics["peak"] = {{"variable", var}, {"value", peak}, {"t", peak_t}};
    }
    json readouts = json::array();
    for (std::size_t r = 0; r < sim.readouts.size(); ++r) {
        const auto& v = sim.readouts[r].values;
        json e = {{"t", sim.readouts[r].t}, {"max", *std::max_element(v.begin(), v.end())}};
        if (r < sim.readout_max_rate.size()) e["max_abs_rate"] = sim.readout_max_rate[r];
        readouts.push_back(e);
    }
    diagnostics["readouts"] = readouts;
    if (sim.min_memductance) diagnostics["min_memductance"] = *sim.min_memductance;
    diagnostics["snapshots"] = traj.snapshots.size();
    diagnostics["warnings"] = c.stimulus.warnings(c.time.t_start, c.time.t_end);

    json halving = nullptr;
    if (c.convergence_check) halving = dt_halving_delta(c, traj, &cache);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.manifest_path = out_dir / (name + "_manifest.json");
    report.manifest = {{"config", to_json(c)},
                       {"version", version()},
                       {"wall_seconds", wall},
                       {"dt_halving_delta", halving},
                       {"outputs", outputs},
                       {"diagnostics", diagnostics}};
    write_json_atomic(report.manifest_path, report.manifest);
    return report;
}

Classification classify_amplitude(const ScenarioConfig& c, double amplitude, SimulationCache* cache) {
    if (!c.bisect) throw ValidationError({"bisect section present"});
    const BisectSettings& b = *c.bisect;
    ScenarioConfig k = c;
    k.convergence_check = false;
    if (b.pulse >= k.stimulus.pulses.size()) throw ValidationError({"bisect.pulse indexes an existing pulse"});
    pulse_amplitude(k.stimulus.pulses[b.pulse]) = amplitude;
    if (b.isolate) k.stimulus.pulses = {k.stimulus.pulses[b.pulse]};
    if (b.window_start) k.time.t_start = *b.window_start;
    k.readouts.clear();
    if (b.readout) {
        k.time.t_end = *b.readout;
        k.readouts = {*b.readout};
    }
    k.bisect.reset();
    const SimulationOutput out = simulate(k, cache);
    const std::string var = primary_variable(k.model);

    double response = -std::numeric_limits<double>::infinity();
    if (b.response == Response::peak) {
        const std::size_t point = is_field_model(k.model) ? make_grid(k).center() : 0;
        for (std::size_t s = 0; s < out.trajectory.snapshots.size(); ++s) {
            response = std::max(response, out.trajectory.component(s, var)[point]);
        }
    } else {
        const auto& v = out.readouts.at(0).values;
        response = *std::max_element(v.begin(), v.end());
    }
    return {amplitude, response, response > b.level};
}

BisectionResult bisect_scenario(const ScenarioConfig& c) {
    if (!c.bisect) throw ValidationError({"bisect section present"});
    SimulationCache cache;
    const auto& b = *c.bisect;
    return bisect_threshold([&](double a) { return classify_amplitude(c, a, &cache); }, b.lo, b.hi, b.iterations,
                            b.probes);
}

}  // namespace excitable::cli
