#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "excitable/cli/config.hpp"
#include "excitable/cli/scenario.hpp"

namespace excitable::cli {

std::vector<std::string> figure_names();

/// Built-in scenario behind a figure, before calibration. Throws ParseError for unknown names.
ScenarioConfig figure_config(const std::string& name);

struct FigureOptions {
    bool convergence_check = true;
};

struct FigureReport {
    std::string name;
    nlohmann::json manifest;
    std::filesystem::path manifest_path;
    std::vector<RunReport> runs;
};

/// Calibrates where needed, runs every scenario of the figure into out_dir and
/// writes `<name>_manifest.json` with the calibration record.
FigureReport reproduce_figure(const std::string& name, const std::filesystem::path& out_dir,
                              const FigureOptions& options = {});

}  // namespace excitable::cli
