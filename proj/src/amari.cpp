#include "excitable/amari.hpp"

#include <algorithm>
#include <cmath>

namespace excitable::amari {

double firing_rate(double u, double theta, double slope) {
    return 1.0 / (1.0 + std::exp(-slope * (u - theta)));
}

Kernel make_kernel(const AmariParams& p, const SpatialGrid& grid) {
    return difference_kernel(p.sigma_e, p.sigma_i, grid, p.normalization, p.gain_e, p.gain_i);
}

double uniform_equilibrium(double w0, double theta, double slope) {
    // Roots of g(u) = u - w0 f(u) lie between 0 and w0 since f is in (0, 1).
    if (w0 == 0.0) return 0.0;
    auto g = [&](double u) { return u - w0 * firing_rate(u, theta, slope); };
    const double lo0 = std::min(0.0, w0) - 1e-9;
    const double hi0 = std::max(0.0, w0) + 1e-9;
    // g(lo0) < 0; scan upwards for the first sign change to get the lowest root.
    const int samples = 4096;
    double lo = lo0;
    double hi = hi0;
    for (int i = 1; i <= samples; ++i) {
        const double u = lo0 + (hi0 - lo0) * i / samples;
        if (g(u) >= 0.0) {
            hi = u;
            break;
        }
        lo = u;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Model::Model(AmariParams params, const SpatialGrid& grid, ConvolutionMethod method)
    : params_(params),
      grid_(grid),
      kernel_((require_valid(params), make_kernel(params, grid))),
      conv_(kernel_, method),
      rate_(grid.size()),
      input_(grid.size()) {}

void Model::rhs(std::span<const double> u, std::span<const double> i_app, std::span<double> du) {
    const std::size_t n = grid_.size();
    if (u.size() != n || i_app.size() != n || du.size() != n) {
        throw GridMismatchError("amari: field size does not match the grid");
    }
    for (std::size_t j = 0; j < n; ++j) rate_[j] = firing_rate(u[j], params_.theta, params_.slope);
    conv_.apply(rate_, du);
    const double inv_tau = 1.0 / params_.tau;
    for (std::size_t j = 0; j < n; ++j) du[j] = (-u[j] + du[j] + i_app[j]) * inv_tau;
}

std::vector<double> Model::rest_state(double tolerance) {
    const std::size_t n = grid_.size();
    const double u_star = uniform_equilibrium(kernel_.discrete_mass(), params_.theta, params_.slope);
    std::vector<double> u(n, u_star);
    std::vector<double> zero(n, 0.0), k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double dt = 0.02 * params_.tau;
    const std::size_t max_steps = 400000;
    for (std::size_t step = 0; step < max_steps; ++step) {
        rhs(u, zero, k1);
        double r = 0.0;
        for (double d : k1) r = std::max(r, std::abs(d));
        if (r < tolerance) return u;
        for (std::size_t j = 0; j < n; ++j) tmp[j] = u[j] + 0.5 * dt * k1[j];
        rhs(tmp, zero, k2);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = u[j] + 0.5 * dt * k2[j];
        rhs(tmp, zero, k3);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = u[j] + dt * k3[j];
        rhs(tmp, zero, k4);
        for (std::size_t j = 0; j < n; ++j) u[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    throw Error("amari: field did not settle to a rest state under zero input");
}

Result simulate_amari(const AmariParams& p, const StimulusProgram& stimulus, const SpatialGrid& grid,
                      const TimeGrid& time, const std::vector<double>& readout_times,
                      const SimulationOptions& options) {
    Model model(p, grid, options.method);
    return simulate_amari(p, stimulus, grid, time, readout_times, options, model.rest_state());
}

Result simulate_amari(const AmariParams& p, const StimulusProgram& stimulus, const SpatialGrid& grid,
                      const TimeGrid& time, const std::vector<double>& readout_times,
                      const SimulationOptions& options, std::vector<double> rest) {
    Model model(p, grid, options.method);
    const StimulusField field(stimulus, grid);
    std::vector<double> input(grid.size());
    auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        field.evaluate(t, input);
        model.rhs(y, input, dy);
    };

    Result result;
    result.rest = rest;
    std::vector<std::size_t> readout_steps;
    for (double t : readout_times) readout_steps.push_back(time.nearest_step(t));
    std::vector<double> rate(grid.size());

    IntegrateOptions opts;
    opts.stride = options.stride;
    opts.record = options.record;
    opts.layout = {{"u"}, grid.size()};
    opts.on_step = [&](std::size_t step, double t, std::span<const double> y) {
        for (std::size_t r = 0; r < readout_steps.size(); ++r) {
            if (readout_steps[r] != step) continue;
            rhs(t, y, rate);
            double m = 0.0;
            for (double d : rate) m = std::max(m, std::abs(d));
            result.readouts.push_back({t, std::vector<double>(y.begin(), y.end()), m});
        }
    };
    result.trajectory = integrate(rhs, std::move(rest), time, opts);
    result.trajectory.model = kModelName;
    result.trajectory.stimulus = stimulus.describe();
    std::stable_sort(result.readouts.begin(), result.readouts.end(),
                     [](const Readout& a, const Readout& b) { return a.t < b.t; });
    return result;
}

}  // namespace excitable::amari
