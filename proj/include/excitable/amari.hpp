#pragma once

#include <span>
#include <vector>

#include "excitable/core.hpp"
#include "excitable/numerics.hpp"
#include "excitable/stimulus.hpp"

namespace excitable::amari {

/// 1 / (1 + exp(-slope (u - theta))).
double firing_rate(double u, double theta, double slope = 5.0);

Kernel make_kernel(const AmariParams& p, const SpatialGrid& grid);

/// Smallest root of u = W0 f(u), the uniform equilibrium on the infinite line
/// for a kernel of total mass W0.
double uniform_equilibrium(double kernel_mass, double theta, double slope = 5.0);

/// tau du/dt = -u + (w * f(u)) + i_app on a fixed grid.
class Model {
public:
    Model(AmariParams params, const SpatialGrid& grid, ConvolutionMethod method = ConvolutionMethod::spectral);

    void rhs(std::span<const double> u, std::span<const double> i_app, std::span<double> du);

    /// Stationary field under zero input, relaxed from the uniform equilibrium
    /// of the discrete kernel mass. Away from the boundary it stays uniform;
    /// within a few sigma_I of the edges the truncated kernel bends it.
    std::vector<double> rest_state(double tolerance = 1e-12);

    const AmariParams& params() const noexcept { return params_; }
    const Kernel& kernel() const noexcept { return kernel_; }
    const SpatialGrid& grid() const noexcept { return grid_; }

private:
    AmariParams params_;
    SpatialGrid grid_;
    Kernel kernel_;
    Convolver conv_;
    std::vector<double> rate_;
    std::vector<double> input_;
};

inline constexpr const char* kModelName = "amari";

struct Readout {
    double t;
    std::vector<double> u;
    double max_abs_rate;  // max_x |du/dt| at the readout step
};

struct Result {
    Trajectory trajectory;
    std::vector<double> rest;
    std::vector<Readout> readouts;
};

struct SimulationOptions {
    std::size_t stride = 100;
    bool record = true;
    ConvolutionMethod method = ConvolutionMethod::spectral;
};

/// Starts from rest_state(); captures the field and max |du/dt| at each readout time.
Result simulate_amari(const AmariParams& p, const StimulusProgram& stimulus, const SpatialGrid& grid,
                      const TimeGrid& time, const std::vector<double>& readout_times,
                      const SimulationOptions& options = {});

/// Same, but reuses a precomputed rest state (calibration loops).
Result simulate_amari(const AmariParams& p, const StimulusProgram& stimulus, const SpatialGrid& grid,
                      const TimeGrid& time, const std::vector<double>& readout_times,
                      const SimulationOptions& options, std::vector<double> rest);

}  // namespace excitable::amari
