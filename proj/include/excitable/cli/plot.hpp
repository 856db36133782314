#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace excitable::cli {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
};

std::string line_plot_svg(const std::vector<Series>& series, const Axes& axes);

/// values[i][j] at (t[i], x[j]); time runs along the horizontal axis.
std::string heatmap_svg(const std::vector<double>& t, const std::vector<double>& x,
                        const std::vector<std::vector<double>>& values, const Axes& axes);

enum class PlotKind { automatic, line, heatmap };

struct PlotSpec {
    PlotKind kind = PlotKind::automatic;
    std::string variable;  // empty: every variable (line) or the first (heatmap)
    std::string title;
};

/// Reads a long-format CSV and writes an SVG. Point tables and single-time
/// field tables become line plots; multi-time field tables become heatmaps.
void emit_plot(const std::filesystem::path& csv, const std::filesystem::path& svg, const PlotSpec& spec = {});

}  // namespace excitable::cli
