#include "excitable/stimulus.hpp"

#include <cmath>
#include <sstream>

namespace excitable {

namespace {

double temporal_factor(const Pulse& p, double t) {
    if (const auto* g = std::get_if<GaussianPulse>(&p)) {
        const double s = (t - g->t0) / g->sigma_t;
        return std::exp(-0.5 * s * s);
    }
    const auto& r = std::get<RectangularPulse>(p);
    return (t >= r.t_on && t < r.t_off) ? 1.0 : 0.0;
}

}  // namespace

std::string to_string(StimulusTarget t) {
    switch (t) {
        case StimulusTarget::excitatory: return "E";
        case StimulusTarget::inhibitory: return "I";
        case StimulusTarget::both: return "both";
        case StimulusTarget::point: return "point";
    }
    return "?";
}

StimulusTarget stimulus_target_from_string(const std::string& s) {
    if (s == "E") return StimulusTarget::excitatory;
    if (s == "I") return StimulusTarget::inhibitory;
    if (s == "both") return StimulusTarget::both;
    if (s == "point") return StimulusTarget::point;
    throw ValidationError({"stimulus target must be one of E, I, both, point; got '" + s + "'"});
}

double gaussian_pulse_value(const GaussianPulse& p, double x, double t) {
    const double sx = x / p.sigma_x;
    const double st = (t - p.t0) / p.sigma_t;
    // Same association as StimulusField::evaluate, so both paths agree bit for bit.
    return p.amplitude * std::exp(-0.5 * st * st) * std::exp(-0.5 * sx * sx);
}

double rectangular_pulse_value(double amplitude, double t_on, double t_off, double t) {
    if (!(t_on < t_off)) throw ValidationError({"rectangular pulse needs t_on < t_off"});
    return (t >= t_on && t < t_off) ? amplitude : 0.0;
}

double pulse_value(const Pulse& p, double x, double t) {
    if (const auto* g = std::get_if<GaussianPulse>(&p)) return gaussian_pulse_value(*g, x, t);
    const auto& r = std::get<RectangularPulse>(p);
    return rectangular_pulse_value(r.amplitude, r.t_on, r.t_off, t);
}

double& pulse_amplitude(Pulse& p) {
    return std::visit([](auto& q) -> double& { return q.amplitude; }, p);
}

double pulse_amplitude(const Pulse& p) {
    return std::visit([](const auto& q) { return q.amplitude; }, p);
}

double StimulusProgram::value(double x, double t) const {
    double s = 0.0;
    for (const auto& p : pulses) s += pulse_value(p, x, t);
    return s;
}

std::vector<std::string> StimulusProgram::validate() const {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const std::string tag = "pulse " + std::to_string(i) + ": ";
        if (const auto* g = std::get_if<GaussianPulse>(&pulses[i])) {
            if (!(g->sigma_x > 0)) v.push_back(tag + "sigma_x > 0");
            if (!(g->sigma_t > 0)) v.push_back(tag + "sigma_t > 0");
        } else {
            const auto& r = std::get<RectangularPulse>(pulses[i]);
            if (!(r.t_on < r.t_off)) v.push_back(tag + "t_on < t_off");
        }
    }
    return v;
}

std::vector<std::string> StimulusProgram::warnings(double t_start, double t_end) const {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        double lo, hi;
        if (const auto* g = std::get_if<GaussianPulse>(&pulses[i])) {
            lo = g->t0 - 3.0 * g->sigma_t;
            hi = g->t0 + 3.0 * g->sigma_t;
        } else {
            const auto& r = std::get<RectangularPulse>(pulses[i]);
            lo = r.t_on;
            hi = r.t_off;
        }
        if (lo < t_start || hi > t_end) {
            std::ostringstream os;
            os << "pulse " << i << " support [" << lo << ", " << hi << "] extends beyond the simulated window ["
               << t_start << ", " << t_end << "]";
            w.push_back(os.str());
        }
    }
    return w;
}

std::string StimulusProgram::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "target=" << to_string(target);
    for (const auto& p : pulses) {
        if (const auto* g = std::get_if<GaussianPulse>(&p)) {
            os << "; gaussian(A=" << g->amplitude << ", sigma_x=" << g->sigma_x << ", sigma_t=" << g->sigma_t
               << ", t0=" << g->t0 << ")";
        } else {
            const auto& r = std::get<RectangularPulse>(p);
            os << "; rect(A=" << r.amplitude << ", t_on=" << r.t_on << ", t_off=" << r.t_off << ")";
        }
    }
    return os.str();
}

StimulusProgram StimulusProgram::scaled(double factor) const {
    StimulusProgram s = *this;
    for (auto& p : s.pulses) pulse_amplitude(p) *= factor;
    return s;
}

StimulusField::StimulusField(const StimulusProgram& program, const SpatialGrid& grid)
    : target_(program.target), n_(grid.size()) {
    auto v = program.validate();
    if (!v.empty()) throw ValidationError(std::move(v));
    for (const auto& p : program.pulses) {
        Term term{pulse_amplitude(p), std::vector<double>(n_, 1.0), p};
        if (const auto* g = std::get_if<GaussianPulse>(&p)) {
            for (std::size_t j = 0; j < n_; ++j) {
                const double s = grid.x(j) / g->sigma_x;
                term.profile[j] = std::exp(-0.5 * s * s);
            }
        }
        terms_.push_back(std::move(term));
    }
}

void StimulusField::evaluate(double t, std::span<double> out) const {
    for (std::size_t j = 0; j < n_; ++j) out[j] = 0.0;
    for (const auto& term : terms_) {
        const double a = term.amplitude * temporal_factor(term.pulse, t);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < n_; ++j) out[j] += a * term.profile[j];
    }
}

bool StimulusField::targets(StimulusTarget population) const {
    if (target_ == StimulusTarget::both || target_ == StimulusTarget::point) return true;
    return target_ == population;
}

}  // namespace excitable
