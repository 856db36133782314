#include "excitable/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace excitable::analysis {

Peak peak(std::span<const double> values) {
    if (values.empty()) throw Error("peak of an empty sequence");
    Peak p{0, values[0]};
    for (std::size_t j = 1; j < values.size(); ++j) {
        if (values[j] > p.value) p = {j, values[j]};
    }
    return p;
}

std::vector<Region> regions_above(std::span<const double> values, double level) {
    std::vector<Region> out;
    std::size_t j = 0;
    while (j < values.size()) {
        if (values[j] > level) {
            const std::size_t b = j;
            while (j < values.size() && values[j] > level) ++j;
            out.push_back({b, j});
        } else {
            ++j;
        }
    }
    return out;
}

double fwhm(std::span<const double> values, std::span<const double> x, double baseline) {
    if (values.size() != x.size()) throw GridMismatchError("fwhm: values and positions differ in length");
    const Peak p = peak(values);
    const double half = baseline + 0.5 * (p.value - baseline);
    if (!(p.value > baseline)) return 0.0;

    auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double f = (values[inside] - half) / (values[inside] - values[outside]);
        return x[inside] + f * (x[outside] - x[inside]);
    };
    std::size_t l = p.index;
    while (l > 0 && values[l - 1] > half) --l;
    std::size_t r = p.index;
    while (r + 1 < values.size() && values[r + 1] > half) ++r;
    if (l == 0 || r + 1 == values.size()) return std::numeric_limits<double>::infinity();
    return crossing(r, r + 1) - crossing(l, l - 1);
}

double relative_sup_difference(std::span<const double> a, std::span<const double> b, double floor) {
    if (a.size() != b.size()) throw GridMismatchError("relative difference: lengths differ");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num = std::max(num, std::abs(a[j] - b[j]));
        den = std::max(den, std::abs(b[j]));
    }
    return num / std::max(den, floor);
}

double asymmetry(std::span<const double> values) {
    double d = 0.0;
    const std::size_t n = values.size();
    for (std::size_t j = 0; j < n / 2; ++j) d = std::max(d, std::abs(values[j] - values[n - 1 - j]));
    return d;
}

}  // namespace excitable::analysis
