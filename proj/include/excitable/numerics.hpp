#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "excitable/core.hpp"

namespace excitable {

/// Even spatial kernel sampled at the grid offsets -(N-1)..(N-1).
///
/// Only the non-negative half is computed; negative offsets read the mirror,
/// so k(-j) == k(j) holds exactly.
class Kernel {
public:
    enum class Shape { exponential, difference };

    double at(std::ptrdiff_t offset) const noexcept {
        return half_[static_cast<std::size_t>(offset < 0 ? -offset : offset)];
    }
    /// Value at offsets 0..N-1.
    std::span<const double> half() const noexcept { return half_; }
    std::size_t grid_size() const noexcept { return half_.size(); }
    double dx() const noexcept { return dx_; }
    Shape shape() const noexcept { return shape_; }
    double sigma() const noexcept { return sigma_e_; }
    double sigma_e() const noexcept { return sigma_e_; }
    double sigma_i() const noexcept { return sigma_i_; }
    KernelNormalization normalization() const noexcept { return normalization_; }

    /// Discrete mass dx * sum over all 2N-1 offsets.
    double discrete_mass() const noexcept;
    /// Integral of the continuous profile over the whole real line.
    double continuum_mass() const noexcept { return continuum_mass_; }

    bool matches(const SpatialGrid& grid) const noexcept {
        return grid.size() == half_.size() && grid.dx() == dx_;
    }

private:
    friend Kernel exponential_kernel(double, const SpatialGrid&, KernelNormalization, double);
    friend Kernel difference_kernel(double, double, const SpatialGrid&, KernelNormalization, double, double);

    Kernel() = default;

    std::vector<double> half_;
    double dx_ = 0.0;
    Shape shape_ = Shape::exponential;
    double sigma_e_ = 0.0;
    double sigma_i_ = 0.0;
    double continuum_mass_ = 0.0;
    KernelNormalization normalization_ = KernelNormalization::raw;
};

/// k(x) = gain * c * exp(-|x|/sigma), c = 1 or 1/(2 sigma).
Kernel exponential_kernel(double sigma, const SpatialGrid& grid,
                          KernelNormalization normalization = KernelNormalization::unit_integral,
                          double gain = 1.0);

/// k(x) = gain_e c_e exp(-|x|/sigma_e) - gain_i c_i exp(-|x|/sigma_i), 0 < sigma_e < sigma_i.
Kernel difference_kernel(double sigma_e, double sigma_i, const SpatialGrid& grid,
                         KernelNormalization normalization = KernelNormalization::unit_integral,
                         double gain_e = 1.0, double gain_i = 1.0);

// Open-boundary convolution:
//   out_j = dx * sum_i k(x_j - x_i) field_i,   i, j in [0, N)
// Nothing outside the domain contributes and there is no wraparound.
std::vector<double> convolve_direct(std::span<const double> field, const Kernel& kernel, const SpatialGrid& grid);
std::vector<double> convolve_spectral(std::span<const double> field, const Kernel& kernel, const SpatialGrid& grid);

enum class ConvolutionMethod { direct, spectral };

/// Reusable convolution operator bound to one kernel.
///
/// Holds scratch buffers, so a single instance must not be applied from two
/// threads at once. Separate instances are independent.
class Convolver {
public:
    Convolver(const Kernel& kernel, ConvolutionMethod method = ConvolutionMethod::spectral);
    ~Convolver();
    Convolver(Convolver&&) noexcept;
    Convolver& operator=(Convolver&&) noexcept;
    Convolver(const Convolver&) = delete;
    Convolver& operator=(const Convolver&) = delete;

    void apply(std::span<const double> field, std::span<double> out);
    std::size_t size() const noexcept { return n_; }
    std::size_t padded_size() const noexcept { return m_; }
    ConvolutionMethod method() const noexcept { return method_; }

private:
    struct Fftw;

    ConvolutionMethod method_;
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    double dx_ = 0.0;
    std::vector<double> half_;
    std::unique_ptr<Fftw> fftw_;
};

// Fixed-step classical RK4.

using RhsFunction = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
using StepObserver = std::function<void(std::size_t step, double t, std::span<const double> y)>;

struct IntegrateOptions {
    std::size_t stride = 1;
    StateLayout layout;
    /// Called after the initial state (step 0) and after every step.
    StepObserver on_step;
    bool record = true;
};

/// Integrates y' = rhs(t, y) over the time grid. Snapshots are kept at steps
/// k with k % stride == 0. Throws NumericError naming the first non-finite
/// component.
Trajectory integrate(const RhsFunction& rhs, std::vector<double> y0, const TimeGrid& time,
                     const IntegrateOptions& options);

}  // namespace excitable
