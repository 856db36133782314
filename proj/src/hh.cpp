#include "excitable/hh.hpp"

#include <cmath>

#include "excitable/numerics.hpp"

namespace excitable::hh {

namespace {

// x / (1 - e^{-x}); removable singularity at x = 0.
double exprel(double x) {
    if (std::abs(x) < 1e-7) return 1.0 + 0.5 * x;
    return x / -std::expm1(-x);
}

}  // namespace

Rates rates(double v) {
    Rates r{};
    r.alpha_m = exprel((v + 40.0) / 10.0);
    r.beta_m = 4.0 * std::exp(-(v + 65.0) / 18.0);
    r.alpha_h = 0.07 * std::exp(-(v + 65.0) / 20.0);
    r.beta_h = 1.0 / (1.0 + std::exp(-(v + 35.0) / 10.0));
    r.alpha_n = 0.1 * exprel((v + 55.0) / 10.0);
    r.beta_n = 0.125 * std::exp(-(v + 65.0) / 80.0);
    return r;
}

GatingValues gating_steady_state_and_tau(double v) {
    const Rates r = rates(v);
    const double sm = r.alpha_m + r.beta_m;
    const double sh = r.alpha_h + r.beta_h;
    const double sn = r.alpha_n + r.beta_n;
    return {r.alpha_m / sm, 1.0 / sm, r.alpha_h / sh, 1.0 / sh, r.alpha_n / sn, 1.0 / sn};
}

double ionic_current(const HHState& s, const HHParams& p) {
    const double m3 = s.m * s.m * s.m;
    const double n2 = s.n * s.n;
    const double i_na = p.g_na * m3 * s.h * (s.v - p.e_na);
    const double i_k = p.g_k * n2 * n2 * (s.v - p.e_k);
    const double i_l = p.g_l * (s.v - p.e_l);
    return i_l + i_na + i_k;
}

HHState hh_rhs(const HHState& s, const HHParams& p, double i_app) {
    const Rates r = rates(s.v);
    HHState d;
    d.v = (-ionic_current(s, p) + i_app) / p.C;
    d.m = r.alpha_m * (1.0 - s.m) - r.beta_m * s.m;
    d.h = r.alpha_h * (1.0 - s.h) - r.beta_h * s.h;
    d.n = r.alpha_n * (1.0 - s.n) - r.beta_n * s.n;
    return d;
}

HHState resting_state(const HHParams& p) {
    const double v = resting_potential(p);
    const auto g = gating_steady_state_and_tau(v);
    return {v, g.m_inf, g.h_inf, g.n_inf};
}

double resting_potential(const HHParams& p) {
    auto current = [&](double v) {
        const auto g = gating_steady_state_and_tau(v);
        return ionic_current({v, g.m_inf, g.h_inf, g.n_inf}, p);
    };
    // The steady-state I-V curve rises through zero once between E_K and the
    // sodium window; bracket it starting from E_K and bisect to machine precision.
    double lo = p.e_k;
    double hi = lo;
    double f_lo = current(lo);
    for (double v = p.e_k + 0.5; v <= p.e_na; v += 0.5) {
        if ((current(v) > 0.0) != (f_lo > 0.0)) {
            hi = v;
            break;
        }
        lo = v;
        f_lo = current(v);
    }
    if (hi == lo) throw Error("hh: no resting potential between E_K and E_Na");
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if ((current(mid) > 0.0) == (f_lo > 0.0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

StateLayout layout() { return {{"v", "m", "h", "n"}, 1}; }

Trajectory simulate_hh(const HHParams& p, const StimulusProgram& stimulus, const TimeGrid& time,
                       std::size_t stride) {
    require_valid(p);
    const HHState rest = resting_state(p);
    auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        const HHState d = hh_rhs({y[0], y[1], y[2], y[3]}, p, stimulus.value(0.0, t));
        dy[0] = d.v;
        dy[1] = d.m;
        dy[2] = d.h;
        dy[3] = d.n;
    };
    IntegrateOptions opts;
    opts.stride = stride;
    opts.layout = layout();
    opts.on_step = [](std::size_t step, double t, std::span<const double> y) {
        static const char* names[] = {"v", "m", "h", "n"};
        for (std::size_t i = 1; i < 4; ++i) {
            if (!(y[i] >= 0.0 && y[i] <= 1.0)) throw NumericError(step, t, std::string(names[i]) + " outside [0,1]", y[i]);
        }
    };
    Trajectory traj = integrate(rhs, {rest.v, rest.m, rest.h, rest.n}, time, opts);
    traj.model = kModelName;
    traj.stimulus = stimulus.describe();
    return traj;
}

}  // namespace excitable::hh
