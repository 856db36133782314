#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <json.hpp>

namespace excitable::cli {

struct Classification {
    double amplitude = 0.0;
    double response = 0.0;
    bool super = false;
};

using Classifier = std::function<Classification(double amplitude)>;

struct BisectionResult {
    double threshold = 0.0;  // midpoint of the final bracket
    double lo = 0.0;         // final bracket, lo classifies like the initial lo
    double hi = 0.0;
    double initial_width = 0.0;
    std::size_t iterations = 0;
    bool increasing = true;   // initial lo is subthreshold
    bool monotone = true;     // no evaluated amplitude contradicts the ordering
    std::vector<Classification> history;  // endpoints, then one entry per iteration
    std::vector<Classification> probes;   // interior points of the final bracket

    double width() const noexcept { return hi - lo; }
};

/// Bisects [lo, hi] on the classifier. Throws BracketError when both ends
/// classify alike (including lo == hi). After the loop, `probes` evenly spaced
/// interior points of the final bracket are classified; monotone reports
/// whether every evaluation is consistent with a single switch point.
BisectionResult bisect_threshold(const Classifier& classify, double lo, double hi, std::size_t iterations,
                                 std::size_t probes = 0);

nlohmann::json to_json(const BisectionResult& r);

}  // namespace excitable::cli
