#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "excitable/core.hpp"

namespace excitable {

// A exp(-x^2 / 2 sigma_x^2) exp(-(t - t0)^2 / 2 sigma_t^2), centered at x = 0.
struct GaussianPulse {
    double amplitude = 0.0;
    double sigma_x = 1.0;
    double sigma_t = 1.0;
    double t0 = 0.0;

    friend bool operator==(const GaussianPulse&, const GaussianPulse&) = default;
};

// A on [t_on, t_off), spatially uniform.
struct RectangularPulse {
    double amplitude = 0.0;
    double t_on = 0.0;
    double t_off = 1.0;

    friend bool operator==(const RectangularPulse&, const RectangularPulse&) = default;
};

using Pulse = std::variant<GaussianPulse, RectangularPulse>;

enum class StimulusTarget { excitatory, inhibitory, both, point };

std::string to_string(StimulusTarget t);
StimulusTarget stimulus_target_from_string(const std::string& s);

double gaussian_pulse_value(const GaussianPulse& p, double x, double t);
/// Throws ValidationError when t_on >= t_off.
double rectangular_pulse_value(double amplitude, double t_on, double t_off, double t);
double pulse_value(const Pulse& p, double x, double t);
double& pulse_amplitude(Pulse& p);
double pulse_amplitude(const Pulse& p);

struct StimulusProgram {
    std::vector<Pulse> pulses;
    StimulusTarget target = StimulusTarget::excitatory;

    /// Sum of all pulses at (x, t).
    double value(double x, double t) const;
    std::vector<std::string> validate() const;
    /// Pulses whose (3 sigma) support leaves [t_start, t_end].
    std::vector<std::string> warnings(double t_start, double t_end) const;
    std::string describe() const;
    StimulusProgram scaled(double factor) const;

    friend bool operator==(const StimulusProgram&, const StimulusProgram&) = default;
};

/// Precomputed spatial profiles so evaluating i_app on the grid costs one
/// exp per pulse per time instead of one per sample.
class StimulusField {
public:
    StimulusField(const StimulusProgram& program, const SpatialGrid& grid);

    void evaluate(double t, std::span<double> out) const;
    bool targets(StimulusTarget population) const;

private:
    struct Term {
        double amplitude;
        std::vector<double> profile;
        Pulse pulse;
    };
    std::vector<Term> terms_;
    StimulusTarget target_;
    std::size_t n_;
};

}  // namespace excitable
