#pragma once

#include "excitable/core.hpp"
#include "excitable/stimulus.hpp"

namespace excitable::hh {

struct GatingValues {
    double m_inf, tau_m;
    double h_inf, tau_h;
    double n_inf, tau_n;
};

// Hodgkin-Huxley 1952 rate functions, modern sign convention (rest near -65 mV).
struct Rates {
    double alpha_m, beta_m;
    double alpha_h, beta_h;
    double alpha_n, beta_n;
};

Rates rates(double v);

/// x_inf = alpha / (alpha + beta), tau_x = 1 / (alpha + beta).
GatingValues gating_steady_state_and_tau(double v);

/// Sodium, potassium and leak currents summed (uA/cm^2, outward positive).
double ionic_current(const HHState& s, const HHParams& p);

/// C dv/dt = -(i_l + i_Na + i_K) + i_app with first-order gate kinetics.
HHState hh_rhs(const HHState& s, const HHParams& p, double i_app);

/// Voltage where the steady-state ionic current vanishes, gates at x_inf(v).
double resting_potential(const HHParams& p);
HHState resting_state(const HHParams& p);

inline constexpr const char* kModelName = "hh";
StateLayout layout();

/// Starts from the resting equilibrium. Gating variables are checked against
/// [0, 1] after every step.
Trajectory simulate_hh(const HHParams& p, const StimulusProgram& stimulus, const TimeGrid& time,
                       std::size_t stride = 1);

}  // namespace excitable::hh
