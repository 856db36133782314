#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "excitable/core.hpp"
#include "excitable/numerics.hpp"
#include "excitable/stimulus.hpp"

namespace excitable::memristive {

/// g_max * max(0, v_f - v_th). Exactly 0 at the threshold.
inline double relu_memductance(double v_f, double g_max, double v_th) {
    const double d = v_f - v_th;
    return d > 0.0 ? g_max * d : 0.0;
}

// ---------------------------------------------------------------------------
// Temporal (point) neuron

struct TemporalState {
    double v = 0.0;
    double v_e = 0.0;  // fast low-pass of v driving g_e
    double v_i = 0.0;  // slow low-pass of v driving g_i

    friend bool operator==(const TemporalState&, const TemporalState&) = default;
};

/// i_tot = g_l v + g_e (v - E_e) + g_i (v - E_i) at the given state.
double total_current(const TemporalState& s, const MemTemporalParams& p);

/// C dv/dt = -i_tot + i_app;  tau_x dv_x/dt = v - v_x.
TemporalState temporal_rhs(const TemporalState& s, const MemTemporalParams& p, double i_app);

inline constexpr const char* kTemporalModel = "mem-temporal";
StateLayout temporal_layout();

/// Starts from rest (0, 0, 0). The stimulus is sampled at position x.
Trajectory simulate_temporal(const MemTemporalParams& p, const StimulusProgram& stimulus, const TimeGrid& time,
                             std::size_t stride = 1, double x = 0.0);

// ---------------------------------------------------------------------------
// Closed-form feedback criteria

struct Interval {
    double lo;
    double hi;
};

/// Open voltage interval of negative differential conductance on the fast
/// timescale (v_e tracks v, v_i at rest). Empty when hi <= lo.
std::optional<Interval> positive_feedback_interval(const MemTemporalParams& p);

/// Lower bound on v for positive differential conductance once both
/// memductances are active (v_e = v_i = v), the max of three terms.
double negative_feedback_bound(const MemTemporalParams& p);

enum class Regime {
    fast,         // v_e = v, v_i = 0
    both_active,  // v_e = v_i = v
};

/// i_tot(v) under the regime's quasi-static substitution.
double quasi_static_current(const MemTemporalParams& p, double v, Regime regime);
/// Analytic d i_tot / d v of quasi_static_current.
double differential_conductance(const MemTemporalParams& p, double v, Regime regime);

// ---------------------------------------------------------------------------
// Synaptic (spatial) memductances

/// Tracks the smallest memductance value emitted by a model. Relu makes it
/// non-negative by construction; the monitor lets callers assert it.
struct MemductanceMonitor {
    double min_seen = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;

    void observe(std::span<const double> g) noexcept {
        for (double x : g) min_seen = x < min_seen ? x : min_seen;
        ++evaluations;
    }
};

/// One synapse type: temporal low-pass, spatial convolution, relu.
///   tau dv_t/dt = v - v_t;   v_st = v_t * w;   g = g_max relu(v_st - v_th)
class Synapse {
public:
    Synapse(const SynapseParams& params, const SpatialGrid& grid,
            ConvolutionMethod method = ConvolutionMethod::spectral);

    /// d v_t / dt for presynaptic field v and filter state v_t.
    void filter_derivative(std::span<const double> v, std::span<const double> v_t, std::span<double> out) const;
    /// Memductance field from the filter state (spatial filtering after temporal).
    void memductance(std::span<const double> v_t, std::span<double> g);

    const SynapseParams& params() const noexcept { return params_; }
    const Kernel& kernel() const noexcept { return kernel_; }

private:
    SynapseParams params_;
    Kernel kernel_;
    Convolver conv_;
    std::vector<double> filtered_;
};

Kernel synapse_kernel(const SynapseParams& p, const SpatialGrid& grid);

struct SynapticStep {
    std::vector<double> filter;
    std::vector<double> memductance;
};

/// Advances the filter by one RK4 step of length dt with the presynaptic
/// field held fixed, then evaluates the memductance of the new filter state.
SynapticStep synaptic_memductance_step(std::span<const double> v, std::span<const double> filter,
                                       const SynapseParams& params, const SpatialGrid& grid, double dt);

// ---------------------------------------------------------------------------
// E-I field: g_e driven by v_E, g_i driven by v_I, both acting on both populations.

/// Components: v_E, v_I, s_E (filtered v_E), s_I (filtered v_I).
StateLayout ei_layout(std::size_t points);

class EIFieldModel {
public:
    EIFieldModel(const MemSynapticParams& params, const SpatialGrid& grid,
                 ConvolutionMethod method = ConvolutionMethod::spectral);

    /// i_E, i_I: applied current fields for each population.
    void rhs(std::span<const double> y, std::span<const double> i_e, std::span<const double> i_i,
             std::span<double> dy);

    const MemSynapticParams& params() const noexcept { return params_; }
    const MemductanceMonitor& monitor() const noexcept { return monitor_; }
    std::size_t size() const noexcept { return n_; }

private:
    MemSynapticParams params_;
    std::size_t n_;
    Synapse exc_;
    Synapse inh_;
    std::vector<double> g_e_, g_i_;
    MemductanceMonitor monitor_;
};

// ---------------------------------------------------------------------------
// Spatio-temporal model: intrinsic memductances per population plus synapses.

/// Components: v_E, v_I, ve_E, vi_E, ve_I, vi_I, s_E, s_I.
StateLayout spatiotemporal_layout(std::size_t points);

class SpatioTemporalModel {
public:
    SpatioTemporalModel(const MemTemporalParams& intrinsic, const MemSynapticParams& synaptic,
                        const SpatialGrid& grid, ConvolutionMethod method = ConvolutionMethod::spectral);

    void rhs(std::span<const double> y, std::span<const double> i_e, std::span<const double> i_i,
             std::span<double> dy);

    const MemductanceMonitor& monitor() const noexcept { return monitor_; }
    std::size_t size() const noexcept { return n_; }

private:
    MemTemporalParams intrinsic_;
    MemSynapticParams synaptic_;
    std::size_t n_;
    Synapse exc_;
    Synapse inh_;
    std::vector<double> g_e_, g_i_;
    MemductanceMonitor monitor_;
};

inline constexpr const char* kSpatialModel = "mem-spatial";
inline constexpr const char* kSpatioTemporalModel = "mem-spatiotemporal";

struct FieldReadout {
    double t;
    std::vector<double> v_e;
};

struct FieldResult {
    Trajectory trajectory;
    std::vector<FieldReadout> readouts;
    double min_memductance = std::numeric_limits<double>::infinity();
};

struct FieldOptions {
    std::size_t stride = 50;
    bool record = true;
    ConvolutionMethod method = ConvolutionMethod::spectral;
};

/// Rest initial state (all zero). Readouts capture v_E at the requested times.
FieldResult simulate_ei_field(const MemSynapticParams& p, const StimulusProgram& stimulus, const SpatialGrid& grid,
                              const TimeGrid& time, const std::vector<double>& readout_times,
                              const FieldOptions& options = {});

FieldResult simulate_spatiotemporal(const MemTemporalParams& intrinsic, const MemSynapticParams& synaptic,
                                    const StimulusProgram& stimulus, const SpatialGrid& grid, const TimeGrid& time,
                                    const std::vector<double>& readout_times, const FieldOptions& options = {});

/// v_E(x_j, .) over all snapshots.
std::vector<double> temporal_slice(const Trajectory& traj, std::size_t point);
/// v_E(., t) from the snapshot nearest to t.
std::vector<double> spatial_slice(const Trajectory& traj, double t);

}  // namespace excitable::memristive
