#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "excitable/core.hpp"

namespace excitable::cli {

/// Long-format table: `t,variable,value` (point) or `t,x,variable,value` (field).
struct LongTable {
    bool spatial = false;
    std::vector<double> t;
    std::vector<double> x;  // empty unless spatial
    std::vector<std::string> variable;
    std::vector<double> value;

    std::size_t size() const noexcept { return t.size(); }
    std::vector<std::string> variables() const;
    /// Rows of one variable, in file order.
    LongTable select(const std::string& name) const;
    /// Rows of one variable at the time closest to t.
    LongTable at_time(const std::string& name, double t) const;
    /// Rows of one variable at the position closest to x.
    LongTable at_position(const std::string& name, double x) const;
};

/// %.17g, so that values re-parse to the same double.
std::string format_double(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, bool spatial);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(double t, const std::string& variable, double value);
    void row(double t, double x, const std::string& variable, double value);
    void close();

private:
    std::filesystem::path path_;
    std::FILE* f_ = nullptr;
    bool spatial_;
};

/// Point trajectory: every component of every snapshot.
void write_point_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                            const std::vector<std::string>& variables);
/// Field trajectory, subsampled every x_stride grid points.
void write_field_trajectory(const std::filesystem::path& path, const Trajectory& traj, const SpatialGrid& grid,
                            const std::vector<std::string>& variables, std::size_t x_stride);

/// Throws ParseError on a missing or unexpected header, malformed rows or an empty table.
LongTable read_long_csv(const std::filesystem::path& path);

}  // namespace excitable::cli
