#include "excitable/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace excitable {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::ostringstream os;
    os << "invalid parameters:";
    for (const auto& s : v) os << "\n  - " << s;
    return os.str();
}

std::string describe_numeric(std::size_t step, double t, const std::string& component, double value) {
    std::ostringstream os;
    os << "non-finite or invalid state at step " << step << " (t=" << t << "): " << component << " = " << value;
    return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

NumericError::NumericError(std::size_t step, double t, std::string component, double value)
    : Error(describe_numeric(step, t, component, value)), step_(step), t_(t), component_(std::move(component)) {}

SpatialGrid::SpatialGrid(double half_length, std::size_t n_points)
    : half_length_(half_length), dx_(2.0 * half_length / static_cast<double>(n_points - 1)), x_(n_points) {
    const std::size_t c = n_points / 2;
    // Mirror the left half so that x_j == -x_{N-1-j} bit for bit.
    for (std::size_t j = 0; j < c; ++j) {
        x_[j] = -static_cast<double>(c - j) * dx_;
        x_[n_points - 1 - j] = -x_[j];
    }
    x_[c] = 0.0;
}

SpatialGrid SpatialGrid::make(double half_length, std::size_t n_points) {
    std::vector<std::string> v;
    if (!(half_length > 0.0) || !std::isfinite(half_length)) v.push_back("half_length L > 0");
    if (n_points < 3) v.push_back("n_points N >= 3");
    if (n_points % 2 == 0) v.push_back("n_points N odd (x = 0 must be a sample)");
    if (!v.empty()) throw ValidationError(std::move(v));
    return SpatialGrid(half_length, n_points);
}

std::size_t SpatialGrid::nearest(double x) const {
    const double j = std::round((x + half_length_) / dx_);
    if (j <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(j), x_.size() - 1);
}

TimeGrid TimeGrid::make(double t_start, double t_end, double dt) {
    std::vector<std::string> v;
    if (!(dt > 0.0) || !std::isfinite(dt)) v.push_back("dt > 0");
    if (!(t_end > t_start)) v.push_back("t_end > t_start");
    if (!v.empty()) throw ValidationError(std::move(v));
    const auto n = static_cast<std::size_t>(std::llround((t_end - t_start) / dt));
    if (n == 0) throw ValidationError({"time window holds at least one step of dt"});
    return TimeGrid(t_start, t_end, dt, n);
}

std::size_t TimeGrid::nearest_step(double t) const {
    const double k = std::round((t - t_start_) / dt_);
    if (k <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(k), n_steps_);
}

std::string to_string(KernelNormalization n) {
    return n == KernelNormalization::raw ? "raw" : "unit_integral";
}

KernelNormalization kernel_normalization_from_string(const std::string& s) {
    if (s == "raw") return KernelNormalization::raw;
    if (s == "unit_integral" || s == "unit-integral") return KernelNormalization::unit_integral;
    throw ValidationError({"kernel normalization must be 'raw' or 'unit_integral', got '" + s + "'"});
}

std::vector<std::string> validate(const HHParams& p) {
    std::vector<std::string> v;
    if (!(p.C > 0)) v.push_back("C > 0");
    if (!(p.g_na > 0)) v.push_back("g_na > 0");
    if (!(p.g_k > 0)) v.push_back("g_k > 0");
    if (!(p.g_l > 0)) v.push_back("g_l > 0");
    if (!(p.e_na > p.e_l && p.e_l > p.e_k)) v.push_back("E_Na > E_L > E_K");
    return v;
}

std::vector<std::string> validate(const AmariParams& p) {
    std::vector<std::string> v;
    if (!(p.tau > 0)) v.push_back("tau > 0");
    if (!(p.sigma_e > 0)) v.push_back("sigma_E > 0");
    if (!(p.sigma_e < p.sigma_i)) v.push_back("sigma_E < sigma_I");
    if (p.slope != 5.0) v.push_back("firing-rate slope fixed at 5");
    if (!(p.gain_e >= 0)) v.push_back("gain_E >= 0");
    if (!(p.gain_i >= 0)) v.push_back("gain_I >= 0");
    if (!std::isfinite(p.theta)) v.push_back("theta finite");
    return v;
}

std::vector<std::string> validate(const MemTemporalParams& p) {
    std::vector<std::string> v;
    if (!(p.C > 0)) v.push_back("C > 0");
    if (!(p.g_l > 0)) v.push_back("g_l > 0");
    // A zero maximal memductance disables the channel; negative is never valid.
    if (!(p.g_e >= 0)) v.push_back("g_e >= 0");
    if (!(p.g_i >= 0)) v.push_back("g_i >= 0");
    if (!(p.tau_e > 0)) v.push_back("tau_{e,m} > 0");
    if (!(p.tau_e < p.tau_i)) v.push_back("tau_{e,m} < tau_{i,m}");
    if (!(p.e_e > 0)) v.push_back("E_e > 0");
    if (!(p.e_i < 0)) v.push_back("E_i < 0");
    if (!std::isfinite(p.v_th_e) || !std::isfinite(p.v_th_i)) v.push_back("thresholds finite");
    return v;
}

std::vector<std::string> validate(const MemSynapticParams& p) {
    std::vector<std::string> v;
    if (!(p.C > 0)) v.push_back("C > 0");
    if (!(p.g_l > 0)) v.push_back("g_l > 0");
    const auto& E = p.excitatory;
    const auto& I = p.inhibitory;
    if (!(E.sigma > 0)) v.push_back("sigma^E > 0");
    if (!(E.tau > 0)) v.push_back("tau_syn^E > 0");
    if (!(E.g_max >= 0)) v.push_back("g_syn^E >= 0");
    if (!(I.g_max >= 0)) v.push_back("g_syn^I >= 0");
    if (!(E.sigma < I.sigma)) v.push_back("sigma^E < sigma^I");
    if (!(E.tau < I.tau)) v.push_back("tau_syn^E < tau_syn^I");
    if (!std::isfinite(E.v_th) || !std::isfinite(I.v_th)) v.push_back("synaptic thresholds finite");
    return v;
}

std::size_t StateLayout::index_of(const std::string& component) const {
    auto it = std::find(components.begin(), components.end(), component);
    if (it == components.end()) throw std::out_of_range("unknown state component '" + component + "'");
    return static_cast<std::size_t>(it - components.begin());
}

std::string StateLayout::describe(std::size_t flat_index) const {
    const std::size_t c = flat_index / points;
    std::string name = c < components.size() ? components[c] : "?";
    if (points > 1) name += "[" + std::to_string(flat_index % points) + "]";
    return name;
}

std::span<const double> Trajectory::component(std::size_t snapshot, const std::string& name) const {
    const std::size_t c = layout.index_of(name);
    return std::span<const double>(snapshots.at(snapshot)).subspan(c * layout.points, layout.points);
}

std::vector<double> Trajectory::series(const std::string& name, std::size_t point) const {
    const std::size_t c = layout.index_of(name);
    std::vector<double> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back(s[c * layout.points + point]);
    return out;
}

}  // namespace excitable
