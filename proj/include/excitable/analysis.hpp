#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "excitable/core.hpp"

namespace excitable::analysis {

struct Peak {
    std::size_t index = 0;
    double value = 0.0;
};

/// First index of the maximum.
Peak peak(std::span<const double> values);

/// Half-open index range [begin, end).
struct Region {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    bool contains(std::size_t j) const noexcept { return j >= begin && j < end; }
};

/// Maximal runs of consecutive samples strictly above level.
std::vector<Region> regions_above(std::span<const double> values, double level);

/// Full width at half maximum of the bump around the global maximum, with the
/// half level measured from baseline. Crossings are linearly interpolated.
/// Returns +inf when the bump reaches the domain edge before falling to half.
double fwhm(std::span<const double> values, std::span<const double> x, double baseline = 0.0);

/// max |a - b| / max(max |b|, floor).
double relative_sup_difference(std::span<const double> a, std::span<const double> b, double floor = 1e-300);

/// max_j |v_j - v_{N-1-j}|.
double asymmetry(std::span<const double> values);

}  // namespace excitable::analysis
