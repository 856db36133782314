#include "excitable/memristive.hpp"

#include <algorithm>
#include <cmath>

namespace excitable::memristive {

double total_current(const TemporalState& s, const MemTemporalParams& p) {
    const double g_e = relu_memductance(s.v_e, p.g_e, p.v_th_e);
    const double g_i = relu_memductance(s.v_i, p.g_i, p.v_th_i);
    return p.g_l * s.v + g_e * (s.v - p.e_e) + g_i * (s.v - p.e_i);
}

TemporalState temporal_rhs(const TemporalState& s, const MemTemporalParams& p, double i_app) {
    TemporalState d;
    d.v = (-total_current(s, p) + i_app) / p.C;
    d.v_e = (s.v - s.v_e) / p.tau_e;
    d.v_i = (s.v - s.v_i) / p.tau_i;
    return d;
}

StateLayout temporal_layout() { return {{"v", "v_e", "v_i"}, 1}; }

Trajectory simulate_temporal(const MemTemporalParams& p, const StimulusProgram& stimulus, const TimeGrid& time,
                             std::size_t stride, double x) {
    require_valid(p);
    auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        const TemporalState d = temporal_rhs({y[0], y[1], y[2]}, p, stimulus.value(x, t));
        dy[0] = d.v;
        dy[1] = d.v_e;
        dy[2] = d.v_i;
    };
    IntegrateOptions opts;
    opts.stride = stride;
    opts.layout = temporal_layout();
    Trajectory traj = integrate(rhs, {0.0, 0.0, 0.0}, time, opts);
    traj.model = kTemporalModel;
    traj.stimulus = stimulus.describe();
    return traj;
}

std::optional<Interval> positive_feedback_interval(const MemTemporalParams& p) {
    const double lo = p.v_th_e;
    const double hi = 0.5 * (-p.g_l / p.g_e + p.e_e + p.v_th_e);
    if (!(hi > lo)) return std::nullopt;
    return Interval{lo, hi};
}

double negative_feedback_bound(const MemTemporalParams& p) {
    const double crossing =
        (p.g_e * (p.e_e + p.v_th_e) + p.g_i * (p.e_i + p.v_th_i) - p.g_l) / (2.0 * (p.g_e + p.g_i));
    return std::max({crossing, p.v_th_e, p.v_th_i});
}

double quasi_static_current(const MemTemporalParams& p, double v, Regime regime) {
    const TemporalState s{v, v, regime == Regime::fast ? 0.0 : v};
    return total_current(s, p);
}

double differential_conductance(const MemTemporalParams& p, double v, Regime regime) {
    // d/dv [g relu(v - th)(v - E)] = g (2v - E - th) above threshold, 0 below.
    double d = p.g_l;
    if (v > p.v_th_e) d += p.g_e * (2.0 * v - p.e_e - p.v_th_e);
    if (regime == Regime::both_active && v > p.v_th_i) d += p.g_i * (2.0 * v - p.e_i - p.v_th_i);
    return d;
}

Kernel synapse_kernel(const SynapseParams& p, const SpatialGrid& grid) {
    return exponential_kernel(p.sigma, grid, p.normalization);
}

Synapse::Synapse(const SynapseParams& params, const SpatialGrid& grid, ConvolutionMethod method)
    : params_(params), kernel_(synapse_kernel(params, grid)), conv_(kernel_, method), filtered_(grid.size()) {}

void Synapse::filter_derivative(std::span<const double> v, std::span<const double> v_t, std::span<double> out) const {
    const double inv_tau = 1.0 / params_.tau;
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = (v[j] - v_t[j]) * inv_tau;
}

void Synapse::memductance(std::span<const double> v_t, std::span<double> g) {
    conv_.apply(v_t, filtered_);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = relu_memductance(filtered_[j], params_.g_max, params_.v_th);
}

SynapticStep synaptic_memductance_step(std::span<const double> v, std::span<const double> filter,
                                       const SynapseParams& params, const SpatialGrid& grid, double dt) {
    if (v.size() != grid.size() || filter.size() != grid.size()) {
        throw GridMismatchError("synaptic step: fields do not match the grid");
    }
    Synapse syn(params, grid);
    const std::size_t n = grid.size();
    std::vector<double> s(filter.begin(), filter.end()), k1(n), k2(n), k3(n), k4(n), tmp(n);
    syn.filter_derivative(v, s, k1);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = s[j] + 0.5 * dt * k1[j];
    syn.filter_derivative(v, tmp, k2);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = s[j] + 0.5 * dt * k2[j];
    syn.filter_derivative(v, tmp, k3);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = s[j] + dt * k3[j];
    syn.filter_derivative(v, tmp, k4);
    for (std::size_t j = 0; j < n; ++j) s[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    SynapticStep out{std::move(s), std::vector<double>(n)};
    syn.memductance(out.filter, out.memductance);
    return out;
}

StateLayout ei_layout(std::size_t points) { return {{"v_E", "v_I", "s_E", "s_I"}, points}; }

EIFieldModel::EIFieldModel(const MemSynapticParams& params, const SpatialGrid& grid, ConvolutionMethod method)
    : params_((require_valid(params), params)),
      n_(grid.size()),
      exc_(params.excitatory, grid, method),
      inh_(params.inhibitory, grid, method),
      g_e_(n_),
      g_i_(n_) {}

void EIFieldModel::rhs(std::span<const double> y, std::span<const double> i_e, std::span<const double> i_i,
                       std::span<double> dy) {
    const std::size_t n = n_;
    if (y.size() != 4 * n || dy.size() != 4 * n || i_e.size() != n || i_i.size() != n) {
        throw GridMismatchError("mem-spatial: state size does not match the grid");
    }
    const auto v_E = y.subspan(0, n), v_I = y.subspan(n, n), s_E = y.subspan(2 * n, n), s_I = y.subspan(3 * n, n);
    exc_.memductance(s_E, g_e_);
    inh_.memductance(s_I, g_i_);
    monitor_.observe(g_e_);
    monitor_.observe(g_i_);

    const double g_l = params_.g_l;
    const double E_e = params_.excitatory.e_rev;
    const double E_i = params_.inhibitory.e_rev;
    for (std::size_t j = 0; j < n; ++j) {
        const double ve = v_E[j], vi = v_I[j];
        const double itot_e = g_l * ve + g_e_[j] * (ve - E_e) + g_i_[j] * (ve - E_i);
        const double itot_i = g_l * vi + g_e_[j] * (vi - E_e) + g_i_[j] * (vi - E_i);
        dy[j] = (-itot_e + i_e[j]) / params_.C;
        dy[n + j] = (-itot_i + i_i[j]) / params_.C;
    }
    exc_.filter_derivative(v_E, s_E, dy.subspan(2 * n, n));
    inh_.filter_derivative(v_I, s_I, dy.subspan(3 * n, n));
}

StateLayout spatiotemporal_layout(std::size_t points) {
    return {{"v_E", "v_I", "ve_E", "vi_E", "ve_I", "vi_I", "s_E", "s_I"}, points};
}

SpatioTemporalModel::SpatioTemporalModel(const MemTemporalParams& intrinsic, const MemSynapticParams& synaptic,
                                         const SpatialGrid& grid, ConvolutionMethod method)
    : intrinsic_((require_valid(intrinsic), intrinsic)),
      synaptic_((require_valid(synaptic), synaptic)),
      n_(grid.size()),
      exc_(synaptic.excitatory, grid, method),
      inh_(synaptic.inhibitory, grid, method),
      g_e_(n_),
      g_i_(n_) {}

void SpatioTemporalModel::rhs(std::span<const double> y, std::span<const double> i_e, std::span<const double> i_i,
                              std::span<double> dy) {
    const std::size_t n = n_;
    if (y.size() != 8 * n || dy.size() != 8 * n || i_e.size() != n || i_i.size() != n) {
        throw GridMismatchError("mem-spatiotemporal: state size does not match the grid");
    }
    const auto v_E = y.subspan(0, n), v_I = y.subspan(n, n);
    const auto s_E = y.subspan(6 * n, n), s_I = y.subspan(7 * n, n);
    exc_.memductance(s_E, g_e_);
    inh_.memductance(s_I, g_i_);
    monitor_.observe(g_e_);
    monitor_.observe(g_i_);

    const auto& p = intrinsic_;
    const double E_syn_e = synaptic_.excitatory.e_rev;
    const double E_syn_i = synaptic_.inhibitory.e_rev;
    double g_min = std::numeric_limits<double>::infinity();
    // Population k = 0 (E) and 1 (I); each carries its own intrinsic filters.
    for (std::size_t k = 0; k < 2; ++k) {
        const auto v = y.subspan(k * n, n);
        const auto ve = y.subspan((2 + 2 * k) * n, n);
        const auto vi = y.subspan((3 + 2 * k) * n, n);
        const auto i_app = k == 0 ? i_e : i_i;
        auto dv = dy.subspan(k * n, n);
        auto dve = dy.subspan((2 + 2 * k) * n, n);
        auto dvi = dy.subspan((3 + 2 * k) * n, n);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = v[j];
            const double ge = relu_memductance(ve[j], p.g_e, p.v_th_e);
            const double gi = relu_memductance(vi[j], p.g_i, p.v_th_i);
            g_min = std::min({g_min, ge, gi});
            // Summation order matches temporal_rhs and EIFieldModel::rhs so that
            // zeroing either family of memductances reproduces them bit for bit.
            const double itot = p.g_l * x + ge * (x - p.e_e) + g_e_[j] * (x - E_syn_e) + gi * (x - p.e_i) +
                                g_i_[j] * (x - E_syn_i);
            dv[j] = (-itot + i_app[j]) / p.C;
            dve[j] = (x - ve[j]) / p.tau_e;
            dvi[j] = (x - vi[j]) / p.tau_i;
        }
    }
    if (g_min < monitor_.min_seen) monitor_.min_seen = g_min;
    exc_.filter_derivative(v_E, s_E, dy.subspan(6 * n, n));
    inh_.filter_derivative(v_I, s_I, dy.subspan(7 * n, n));
}

namespace {

template <typename ModelT>
FieldResult run_field(ModelT& model, std::size_t components, StateLayout layout, const char* name,
                      const StimulusProgram& stimulus, const SpatialGrid& grid, const TimeGrid& time,
                      const std::vector<double>& readout_times, const FieldOptions& options) {
    const std::size_t n = grid.size();
    const StimulusField field(stimulus, grid);
    const bool to_e = field.targets(StimulusTarget::excitatory);
    const bool to_i = field.targets(StimulusTarget::inhibitory);
    std::vector<double> drive(n), zero(n, 0.0);
    auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        field.evaluate(t, drive);
        model.rhs(y, to_e ? std::span<const double>(drive) : std::span<const double>(zero),
                  to_i ? std::span<const double>(drive) : std::span<const double>(zero), dy);
    };

    FieldResult result;
    std::vector<std::size_t> steps;
    for (double t : readout_times) steps.push_back(time.nearest_step(t));
    IntegrateOptions opts;
    opts.stride = options.stride;
    opts.record = options.record;
    opts.layout = std::move(layout);
    opts.on_step = [&](std::size_t step, double t, std::span<const double> y) {
        for (std::size_t s : steps) {
            if (s == step) result.readouts.push_back({t, std::vector<double>(y.begin(), y.begin() + n)});
        }
    };
    result.trajectory = integrate(rhs, std::vector<double>(components * n, 0.0), time, opts);
    result.trajectory.model = name;
    result.trajectory.stimulus = stimulus.describe();
    result.min_memductance = model.monitor().min_seen;
    std::stable_sort(result.readouts.begin(), result.readouts.end(),
                     [](const FieldReadout& a, const FieldReadout& b) { return a.t < b.t; });
    return result;
}

}  // namespace

FieldResult simulate_ei_field(const MemSynapticParams& p, const StimulusProgram& stimulus, const SpatialGrid& grid,
                              const TimeGrid& time, const std::vector<double>& readout_times,
                              const FieldOptions& options) {
    EIFieldModel model(p, grid, options.method);
    return run_field(model, 4, ei_layout(grid.size()), kSpatialModel, stimulus, grid, time, readout_times, options);
}

FieldResult simulate_spatiotemporal(const MemTemporalParams& intrinsic, const MemSynapticParams& synaptic,
                                    const StimulusProgram& stimulus, const SpatialGrid& grid, const TimeGrid& time,
                                    const std::vector<double>& readout_times, const FieldOptions& options) {
    SpatioTemporalModel model(intrinsic, synaptic, grid, options.method);
    return run_field(model, 8, spatiotemporal_layout(grid.size()), kSpatioTemporalModel, stimulus, grid, time,
                     readout_times, options);
}

std::vector<double> temporal_slice(const Trajectory& traj, std::size_t point) { return traj.series("v_E", point); }

std::vector<double> spatial_slice(const Trajectory& traj, double t) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < traj.times.size(); ++s) {
        if (std::abs(traj.times[s] - t) < std::abs(traj.times[best] - t)) best = s;
    }
    auto c = traj.component(best, "v_E");
    return {c.begin(), c.end()};
}

}  // namespace excitable::memristive
