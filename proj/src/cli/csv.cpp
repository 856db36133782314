#include "excitable/cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "excitable/cli/config.hpp"

namespace excitable::cli {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> LongTable::variables() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& v : variable) {
        if (seen.insert(v).second) out.push_back(v);
    }
    return out;
}

LongTable LongTable::select(const std::string& name) const {
    LongTable out;
    out.spatial = spatial;
    for (std::size_t i = 0; i < size(); ++i) {
        if (variable[i] != name) continue;
        out.t.push_back(t[i]);
        if (spatial) out.x.push_back(x[i]);
        out.variable.push_back(variable[i]);
        out.value.push_back(value[i]);
    }
    return out;
}

LongTable LongTable::at_time(const std::string& name, double when) const {
    LongTable sel = select(name);
    if (sel.size() == 0) return sel;
    double best = sel.t[0];
    for (double ti : sel.t) {
        if (std::abs(ti - when) < std::abs(best - when)) best = ti;
    }
    LongTable out;
    out.spatial = spatial;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (sel.t[i] != best) continue;
        out.t.push_back(sel.t[i]);
        if (spatial) out.x.push_back(sel.x[i]);
        out.variable.push_back(sel.variable[i]);
        out.value.push_back(sel.value[i]);
    }
    return out;
}

LongTable LongTable::at_position(const std::string& name, double where) const {
    LongTable sel = select(name);
    if (!spatial || sel.size() == 0) return sel;
    double best = sel.x[0];
    for (double xi : sel.x) {
        if (std::abs(xi - where) < std::abs(best - where)) best = xi;
    }
    LongTable out;
    out.spatial = true;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (sel.x[i] != best) continue;
        out.t.push_back(sel.t[i]);
        out.x.push_back(sel.x[i]);
        out.variable.push_back(sel.variable[i]);
        out.value.push_back(sel.value[i]);
    }
    return out;
}

CsvWriter::CsvWriter(const fs::path& path, bool spatial) : path_(path), spatial_(spatial) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) throw Error("cannot write " + path.string());
    std::fputs(spatial ? "t,x,variable,value\n" : "t,variable,value\n", f_);
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(f_);
}

void CsvWriter::row(double t, const std::string& variable, double value) {
    std::fprintf(f_, "%.17g,%s,%.17g\n", t, variable.c_str(), value);
}

void CsvWriter::row(double t, double x, const std::string& variable, double value) {
    std::fprintf(f_, "%.17g,%.17g,%s,%.17g\n", t, x, variable.c_str(), value);
}

void CsvWriter::close() {
    if (!f_) return;
    const bool bad = std::fclose(f_) != 0;
    f_ = nullptr;
    if (bad) throw Error("error writing " + path_.string());
}

void write_point_trajectory(const fs::path& path, const Trajectory& traj, const std::vector<std::string>& variables) {
    CsvWriter w(path, false);
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        for (const auto& name : variables) w.row(traj.times[s], name, traj.component(s, name)[0]);
    }
    w.close();
}

void write_field_trajectory(const fs::path& path, const Trajectory& traj, const SpatialGrid& grid,
                            const std::vector<std::string>& variables, std::size_t x_stride) {
    CsvWriter w(path, true);
    // Subsample symmetrically about x = 0 so the center is always a row.
    const std::size_t c = grid.center();
    const std::size_t first = c % x_stride;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        for (const auto& name : variables) {
            const auto field = traj.component(s, name);
            for (std::size_t j = first; j < grid.size(); j += x_stride) w.row(traj.times[s], grid.x(j), name, field[j]);
        }
    }
    w.close();
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_number(const std::string& s, std::size_t line, std::size_t column) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ParseError("expected a number, got '" + s + "'", line, column);
    return v;
}

}  // namespace

LongTable read_long_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    LongTable t;
    if (line == "t,x,variable,value") {
        t.spatial = true;
    } else if (line != "t,variable,value") {
        throw ParseError(path.string() + ": unexpected header '" + line +
                             "' (expected t,variable,value or t,x,variable,value)",
                         1, 1);
    }
    const std::size_t width = t.spatial ? 4 : 3;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != width) {
            throw ParseError(path.string() + ": expected " + std::to_string(width) + " fields", lineno, 1);
        }
        t.t.push_back(to_number(cells[0], lineno, 1));
        if (t.spatial) t.x.push_back(to_number(cells[1], lineno, 2));
        t.variable.push_back(cells[width - 2]);
        t.value.push_back(to_number(cells[width - 1], lineno, width));
    }
    if (t.size() == 0) throw ParseError(path.string() + ": no data rows");
    return t;
}

}  // namespace excitable::cli
