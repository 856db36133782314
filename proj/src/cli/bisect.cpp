#include "excitable/cli/bisect.hpp"

#include "excitable/cli/config.hpp"

namespace excitable::cli {

BisectionResult bisect_threshold(const Classifier& classify, double lo, double hi, std::size_t iterations,
                                 std::size_t probes) {
    if (lo > hi) throw ValidationError({"bisection bracket lo <= hi"});
    BisectionResult r;
    r.initial_width = hi - lo;
    const Classification a = classify(lo);
    const Classification b = classify(hi);
    r.history = {a, b};
    if (a.super == b.super) {
        throw BracketError("bracket does not straddle threshold: both ends classify as " +
                           std::string(a.super ? "superthreshold" : "subthreshold"));
    }
    r.increasing = b.super;
    for (std::size_t i = 0; i < iterations; ++i) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const Classification m = classify(mid);
        r.history.push_back(m);
        (m.super == a.super ? lo : hi) = mid;
        ++r.iterations;
    }
    r.lo = lo;
    r.hi = hi;
    r.threshold = lo + 0.5 * (hi - lo);
    for (std::size_t k = 1; k <= probes; ++k) {
        r.probes.push_back(classify(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(probes + 1)));
    }

    // A single switch point means: every amplitude at or below lo classifies
    // like the initial lo, every amplitude at or above hi like the initial hi,
    // and probes inside the bracket switch at most once.
    for (const auto& h : r.history) {
        if (h.amplitude <= lo && h.super != a.super) r.monotone = false;
        if (h.amplitude >= hi && h.super != b.super) r.monotone = false;
    }
    bool switched = false;
    for (const auto& p : r.probes) {
        if (p.super != a.super) switched = true;
        if (switched && p.super == a.super) r.monotone = false;
    }
    return r;
}

nlohmann::json to_json(const BisectionResult& r) {
    auto entry = [](const Classification& c) {
        return nlohmann::json{{"amplitude", c.amplitude}, {"response", c.response}, {"super", c.super}};
    };
    nlohmann::json history = nlohmann::json::array();
    for (const auto& h : r.history) history.push_back(entry(h));
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& p : r.probes) probes.push_back(entry(p));
    return {{"threshold", r.threshold},
            {"lo", r.lo},
            {"hi", r.hi},
            {"initial_width", r.initial_width},
            {"final_width", r.width()},
            {"iterations", r.iterations},
            {"increasing", r.increasing},
            {"monotone", r.monotone},
            {"history", history},
            {"probes", probes}};
}

}  // namespace excitable::cli
