#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "excitable/cli/bisect.hpp"
#include "excitable/cli/config.hpp"

namespace excitable::cli {

struct FieldSnapshot {
    double t = 0.0;
    std::vector<double> values;  // primary variable over the grid (one value for point models)
};

struct SimulationOutput {
    Trajectory trajectory;
    std::vector<FieldSnapshot> readouts;
    std::optional<double> min_memductance;
    std::vector<double> readout_max_rate;  // amari: max_x |du/dt| at each readout
};

/// Reused across calibration runs of one configuration.
struct SimulationCache {
    std::optional<std::vector<double>> amari_rest;
};

SimulationOutput simulate(const ScenarioConfig& c, SimulationCache* cache = nullptr);

/// max over components of the relative sup-norm change; trajectories must share snapshots.
double trajectory_difference(const Trajectory& a, const Trajectory& b);

/// Runs at dt and dt/2 (stride doubled) and returns the relative sup-norm
/// difference over every recorded component.
double dt_halving_delta(const ScenarioConfig& c, const Trajectory& at_dt, SimulationCache* cache = nullptr);

struct RunReport {
    nlohmann::json manifest;
    std::filesystem::path manifest_path;
    SimulationOutput output;
};

/// Simulates and writes `<name>.csv`, per-model extras, SVG plots and
/// `<name>_manifest.json` (written last, atomically) into out_dir.
RunReport run_scenario(const ScenarioConfig& c, const std::filesystem::path& out_dir);

/// Classification of one amplitude under the config's bisect settings.
Classification classify_amplitude(const ScenarioConfig& c, double amplitude, SimulationCache* cache = nullptr);

/// Bisection driven by the config's bisect section.
BisectionResult bisect_scenario(const ScenarioConfig& c);

/// Writes JSON to a temporary sibling and renames it into place.
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

std::string version();

}  // namespace excitable::cli
