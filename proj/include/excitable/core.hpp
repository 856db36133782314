#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace excitable {

// Error hierarchy. The CLI maps each type onto its own exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

class GridMismatchError : public Error {
public:
    using Error::Error;
};

// Raised by the integrator when a state component stops being finite, or by a
// model when a state invariant is broken.
class NumericError : public Error {
public:
    NumericError(std::size_t step, double t, std::string component, double value);
    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return t_; }
    const std::string& component() const noexcept { return component_; }

private:
    std::size_t step_;
    double t_;
    std::string component_;
};

/// Uniform 1-D discretization of [-L, L]. N is odd so x = 0 is a sample.
class SpatialGrid {
public:
    /// Throws ValidationError for even or too small N, or L <= 0.
    static SpatialGrid make(double half_length, std::size_t n_points);

    double half_length() const noexcept { return half_length_; }
    std::size_t size() const noexcept { return x_.size(); }
    double dx() const noexcept { return dx_; }
    std::size_t center() const noexcept { return x_.size() / 2; }
    double x(std::size_t j) const { return x_[j]; }
    std::span<const double> positions() const noexcept { return x_; }

    /// Index of the sample closest to position x (clamped to the domain).
    std::size_t nearest(double x) const;

    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
        return a.half_length_ == b.half_length_ && a.x_.size() == b.x_.size();
    }

private:
    SpatialGrid(double half_length, std::size_t n_points);

    double half_length_;
    double dx_;
    std::vector<double> x_;
};

class TimeGrid {
public:
    static TimeGrid make(double t_start, double t_end, double dt);

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    // Computed by multiplication, never by accumulation.
    double t(std::size_t k) const noexcept { return t_start_ + static_cast<double>(k) * dt_; }
    std::size_t nearest_step(double t) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    TimeGrid(double t_start, double t_end, double dt, std::size_t n_steps)
        : t_start_(t_start), t_end_(t_end), dt_(dt), n_steps_(n_steps) {}

    double t_start_;
    double t_end_;
    double dt_;
    std::size_t n_steps_;
};

enum class KernelNormalization { raw, unit_integral };

std::string to_string(KernelNormalization n);
KernelNormalization kernel_normalization_from_string(const std::string& s);

// Hodgkin-Huxley conductances (mS/cm^2), reversal potentials (mV), C in uF/cm^2.
struct HHParams {
    double C = 1.0;
    double g_na = 120.0;
    double g_k = 36.0;
    double g_l = 0.3;
    double e_na = 50.0;
    double e_k = -77.0;
    double e_l = -54.4;

    friend bool operator==(const HHParams&, const HHParams&) = default;
};

struct HHState {
    double v = 0.0;
    double m = 0.0;
    double h = 0.0;
    double n = 0.0;

    friend bool operator==(const HHState&, const HHState&) = default;
};

// Neural field with difference-of-exponentials kernel
//   w(x) = gain_e c_e exp(-|x|/sigma_e) - gain_i c_i exp(-|x|/sigma_i)
// where c_s = 1 (raw) or 1/(2 sigma_s) (unit integral).
struct AmariParams {
    double tau = 3.0;
    double sigma_e = 0.3;
    double sigma_i = 2.0;
    double theta = 0.4;
    double slope = 5.0;
    KernelNormalization normalization = KernelNormalization::unit_integral;
    double gain_e = 6.0;
    double gain_i = 18.0;

    friend bool operator==(const AmariParams&, const AmariParams&) = default;
};

// Memristive point neuron with one fast inward and one slow outward current.
struct MemTemporalParams {
    double C = 1.0;
    double g_l = 0.1;
    double g_e = 1.0;
    double g_i = 10.0;
    double e_e = 10.0;
    double e_i = -10.0;
    double tau_e = 0.1;
    double tau_i = 10.0;
    double v_th_e = 1.0;
    double v_th_i = 1.0;

    friend bool operator==(const MemTemporalParams&, const MemTemporalParams&) = default;
};

struct SynapseParams {
    double sigma = 0.5;
    double tau = 0.1;
    double v_th = 2.0;
    double g_max = 10.0;
    double e_rev = 10.0;
    KernelNormalization normalization = KernelNormalization::unit_integral;

    friend bool operator==(const SynapseParams&, const SynapseParams&) = default;
};

struct MemSynapticParams {
    double C = 1.0;
    double g_l = 0.1;
    SynapseParams excitatory{0.5, 0.1, 2.0, 10.0, 10.0, KernelNormalization::unit_integral};
    SynapseParams inhibitory{5.0, 1.0, 2.0, 3.0, -10.0, KernelNormalization::unit_integral};

    friend bool operator==(const MemSynapticParams&, const MemSynapticParams&) = default;
};

// Every violated invariant is reported, not just the first.
std::vector<std::string> validate(const HHParams& p);
std::vector<std::string> validate(const AmariParams& p);
std::vector<std::string> validate(const MemTemporalParams& p);
std::vector<std::string> validate(const MemSynapticParams& p);

template <typename Params>
void require_valid(const Params& p) {
    auto v = validate(p);
    if (!v.empty()) throw ValidationError(std::move(v));
}

// Flat structure-of-sequences layout: component c occupies
// [c * points, (c + 1) * points) of the state vector.
struct StateLayout {
    std::vector<std::string> components;
    std::size_t points = 1;

    std::size_t size() const noexcept { return components.size() * points; }
    std::size_t index_of(const std::string& component) const;
    std::string describe(std::size_t flat_index) const;

    friend bool operator==(const StateLayout&, const StateLayout&) = default;
};

struct Trajectory {
    std::string model;
    std::string stimulus;
    TimeGrid time = TimeGrid::make(0.0, 1.0, 1.0);
    std::size_t stride = 1;
    StateLayout layout;
    std::vector<double> times;
    std::vector<std::vector<double>> snapshots;

    std::size_t expected_snapshot_count() const noexcept { return time.n_steps() / stride + 1; }

    std::span<const double> component(std::size_t snapshot, const std::string& name) const;
    /// Time series of one component at one grid point over all snapshots.
    std::vector<double> series(const std::string& name, std::size_t point = 0) const;
};

}  // namespace excitable
