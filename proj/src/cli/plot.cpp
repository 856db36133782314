#include "excitable/cli/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "excitable/cli/config.hpp"
#include "excitable/cli/csv.hpp"

namespace excitable::cli {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = 0;
    double hi = 1;

    void widen() {
        if (!(hi > lo)) {
            const double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
    }
    double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Range range_of(const std::vector<std::vector<double>>& columns) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& c : columns) {
        for (double v : c) {
            if (!std::isfinite(v)) continue;
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
    }
    if (!std::isfinite(r.lo)) r = {0, 1};
    r.widen();
    return r;
}

void frame(std::ostringstream& o, const Axes& axes, const Range& xr, const Range& yr) {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    o << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        const double px = xr.map(fx, x0, x1);
        const double py = yr.map(fy, y0, y1);
        o << "<text x=\"" << num(px) << "\" y=\"" << y0 + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
          << num(fx) << "</text>\n";
        o << "<text x=\"" << x0 - 6 << "\" y=\"" << num(py + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
          << num(fy) << "</text>\n";
    }
    o << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10
      << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (y0 + y1) / 2 << ")\">" << escape(axes.y_label) << "</text>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << escape(axes.title)
      << "</text>\n";
}

std::string open_svg() {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return o.str();
}

// Piecewise-linear approximation of a perceptually ordered blue-yellow map.
std::string color(double f) {
    static const double stops[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    f = std::clamp(f, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(f));
    const double w = f - i;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + w * (stops[i + 1][0] - stops[i][0])),
                  static_cast<int>(stops[i][1] + w * (stops[i + 1][1] - stops[i][1])),
                  static_cast<int>(stops[i][2] + w * (stops[i + 1][2] - stops[i][2])));
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

}  // namespace

std::string line_plot_svg(const std::vector<Series>& series, const Axes& axes) {
    std::vector<std::vector<double>> xs, ys;
    for (const auto& s : series) {
        xs.push_back(s.x);
        ys.push_back(s.y);
    }
    const Range xr = range_of(xs);
    const Range yr = range_of(ys);
    std::ostringstream o;
    o << open_svg();
    frame(o, axes, xr, yr);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = kPalette[k % kPalette.size()];
        o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            o << num(xr.map(s.x[i], kLeft, kWidth - kRight)) << ',' << num(yr.map(s.y[i], kHeight - kBottom, kTop))
              << ' ';
        }
        o << "\"/>\n";
        const double ly = kTop + 16 + 18.0 * static_cast<double>(k);
        o << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - kRight + 30
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << kWidth - kRight + 35 << "\" y=\"" << ly << "\" font-size=\"11\">" << escape(s.name)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string heatmap_svg(const std::vector<double>& t, const std::vector<double>& x,
                        const std::vector<std::vector<double>>& values, const Axes& axes) {
    Range tr = range_of({t});
    Range xr = range_of({x});
    Range vr = range_of(values);
    std::ostringstream o;
    o << open_svg();
    // Cap the cell count so large runs stay viewable.
    const std::size_t max_cells = 240;
    const std::size_t ti_step = std::max<std::size_t>(1, (t.size() + max_cells - 1) / max_cells);
    const std::size_t xj_step = std::max<std::size_t>(1, (x.size() + max_cells - 1) / max_cells);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    const double cw = (x1 - x0) / std::ceil(static_cast<double>(t.size()) / ti_step);
    const double ch = (y0 - y1) / std::ceil(static_cast<double>(x.size()) / xj_step);
    for (std::size_t i = 0; i < t.size(); i += ti_step) {
        for (std::size_t j = 0; j < x.size(); j += xj_step) {
            const double px = tr.map(t[i], x0, x1 - cw);
            const double py = xr.map(x[j], y0 - ch, y1);
            o << "<rect x=\"" << num(px) << "\" y=\"" << num(py) << "\" width=\"" << num(cw + 0.5) << "\" height=\""
              << num(ch + 0.5) << "\" fill=\"" << color(vr.map(values[i][j], 0, 1)) << "\"/>\n";
        }
    }
    frame(o, axes, tr, xr);
    for (int k = 0; k <= 10; ++k) {
        const double f = k / 10.0;
        o << "<rect x=\"" << kWidth - kRight + 20 << "\" y=\"" << num(y0 - (k + 1) * (y0 - y1) / 11.0)
          << "\" width=\"18\" height=\"" << num((y0 - y1) / 11.0 + 0.5) << "\" fill=\"" << color(f) << "\"/>\n";
        if (k % 5 == 0) {
            o << "<text x=\"" << kWidth - kRight + 44 << "\" y=\"" << num(y0 - (k + 0.5) * (y0 - y1) / 11.0 + 4)
              << "\" font-size=\"11\">" << num(vr.lo + f * (vr.hi - vr.lo)) << "</text>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

void emit_plot(const std::filesystem::path& csv, const std::filesystem::path& svg, const PlotSpec& spec) {
    const LongTable table = read_long_csv(csv);
    const auto names = table.variables();
    if (!spec.variable.empty() && std::find(names.begin(), names.end(), spec.variable) == names.end()) {
        throw ParseError(csv.string() + ": no variable '" + spec.variable + "'");
    }
    const std::string title = spec.title.empty() ? csv.stem().string() : spec.title;

    if (!table.spatial) {
        std::vector<Series> series;
        for (const auto& n : names) {
            if (!spec.variable.empty() && n != spec.variable) continue;
            const LongTable s = table.select(n);
            series.push_back({n, s.t, s.value});
        }
        write_text(svg, line_plot_svg(series, {title, "t", spec.variable.empty() ? "value" : spec.variable}));
        return;
    }

    const std::string var = spec.variable.empty() ? names.front() : spec.variable;
    const LongTable sel = table.select(var);
    std::vector<double> times;
    for (double t : sel.t) {
        if (times.empty() || times.back() != t) times.push_back(t);
    }
    const bool heat = spec.kind == PlotKind::heatmap || (spec.kind == PlotKind::automatic && times.size() > 1);
    if (!heat) {
        std::vector<Series> series;
        for (const auto& n : names) {
            if (!spec.variable.empty() && n != spec.variable) continue;
            for (double t : times) {
                const LongTable s = table.at_time(n, t);
                series.push_back({n + " (t=" + num(t) + ")", s.x, s.value});
            }
        }
        write_text(svg, line_plot_svg(series, {title, "x", spec.variable.empty() ? "value" : spec.variable}));
        return;
    }

    std::map<double, std::size_t> xi;
    for (double x : sel.x) xi.emplace(x, 0);
    std::vector<double> xs;
    for (auto& [x, idx] : xi) {
        idx = xs.size();
        xs.push_back(x);
    }
    std::map<double, std::size_t> ti;
    for (std::size_t i = 0; i < times.size(); ++i) ti.emplace(times[i], i);
    std::vector<std::vector<double>> grid(times.size(), std::vector<double>(xs.size(), std::nan("")));
    for (std::size_t r = 0; r < sel.size(); ++r) grid[ti.at(sel.t[r])][xi.at(sel.x[r])] = sel.value[r];
    write_text(svg, heatmap_svg(times, xs, grid, {title + " (" + var + ")", "t", "x"}));
}

}  // namespace excitable::cli
