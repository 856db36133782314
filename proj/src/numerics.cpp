#include "excitable/numerics.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <sstream>

namespace excitable {

namespace {

// The FFTW planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

void check_field(std::span<const double> field, const Kernel& kernel, const SpatialGrid& grid) {
    if (field.size() != grid.size() || !kernel.matches(grid)) {
        std::ostringstream os;
        os << "grid mismatch: field has " << field.size() << " samples, grid " << grid.size()
           << " (dx=" << grid.dx() << "), kernel " << kernel.grid_size() << " (dx=" << kernel.dx() << ")";
        throw GridMismatchError(os.str());
    }
}

}  // namespace

double Kernel::discrete_mass() const noexcept {
    double s = half_.empty() ? 0.0 : half_[0];
    for (std::size_t j = 1; j < half_.size(); ++j) s += 2.0 * half_[j];
    return s * dx_;
}

Kernel exponential_kernel(double sigma, const SpatialGrid& grid, KernelNormalization normalization, double gain) {
    if (!(sigma > 0.0)) throw ValidationError({"kernel scale sigma > 0"});
    Kernel k;
    k.shape_ = Kernel::Shape::exponential;
    k.dx_ = grid.dx();
    k.sigma_e_ = sigma;
    k.normalization_ = normalization;
    const double c = gain * (normalization == KernelNormalization::unit_integral ? 1.0 / (2.0 * sigma) : 1.0);
    k.continuum_mass_ = c * 2.0 * sigma;
    k.half_.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        k.half_[j] = c * std::exp(-static_cast<double>(j) * grid.dx() / sigma);
    }
    return k;
}

Kernel difference_kernel(double sigma_e, double sigma_i, const SpatialGrid& grid, KernelNormalization normalization,
                         double gain_e, double gain_i) {
    std::vector<std::string> v;
    if (!(sigma_e > 0.0)) v.push_back("sigma_E > 0");
    if (!(sigma_e < sigma_i)) v.push_back("sigma_E < sigma_I");
    if (!v.empty()) throw ValidationError(std::move(v));
    const bool unit = normalization == KernelNormalization::unit_integral;
    const double ce = gain_e * (unit ? 1.0 / (2.0 * sigma_e) : 1.0);
    const double ci = gain_i * (unit ? 1.0 / (2.0 * sigma_i) : 1.0);
    Kernel k;
    k.shape_ = Kernel::Shape::difference;
    k.dx_ = grid.dx();
    k.sigma_e_ = sigma_e;
    k.sigma_i_ = sigma_i;
    k.normalization_ = normalization;
    k.continuum_mass_ = ce * 2.0 * sigma_e - ci * 2.0 * sigma_i;
    k.half_.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double r = static_cast<double>(j) * grid.dx();
        k.half_[j] = ce * std::exp(-r / sigma_e) - ci * std::exp(-r / sigma_i);
    }
    return k;
}

std::vector<double> convolve_direct(std::span<const double> field, const Kernel& kernel, const SpatialGrid& grid) {
    check_field(field, kernel, grid);
    std::vector<double> out(field.size());
    Convolver(kernel, ConvolutionMethod::direct).apply(field, out);
    return out;
}

std::vector<double> convolve_spectral(std::span<const double> field, const Kernel& kernel, const SpatialGrid& grid) {
    check_field(field, kernel, grid);
    std::vector<double> out(field.size());
    Convolver(kernel, ConvolutionMethod::spectral).apply(field, out);
    return out;
}

struct Convolver::Fftw {
    double* signal = nullptr;
    fftw_complex* spectrum = nullptr;
    std::vector<std::complex<double>> kernel_spectrum;
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    explicit Fftw(std::size_t m) {
        signal = fftw_alloc_real(m);
        spectrum = fftw_alloc_complex(m / 2 + 1);
        std::lock_guard lock(planner_mutex());
        // ESTIMATE picks the same algorithm every time, keeping runs bitwise reproducible.
        forward = fftw_plan_dft_r2c_1d(static_cast<int>(m), signal, spectrum, FFTW_ESTIMATE);
        inverse = fftw_plan_dft_c2r_1d(static_cast<int>(m), spectrum, signal, FFTW_ESTIMATE);
    }
    ~Fftw() {
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(forward);
            fftw_destroy_plan(inverse);
        }
        fftw_free(signal);
        fftw_free(spectrum);
    }
    Fftw(const Fftw&) = delete;
    Fftw& operator=(const Fftw&) = delete;
};

Convolver::Convolver(const Kernel& kernel, ConvolutionMethod method)
    : method_(method), n_(kernel.grid_size()), dx_(kernel.dx()), half_(kernel.half().begin(), kernel.half().end()) {
    if (method_ == ConvolutionMethod::direct) return;

    // Zero-padding to M >= 2N-1 makes the circular product equal the linear one.
    m_ = next_pow2(2 * n_ - 1);
    fftw_ = std::make_unique<Fftw>(m_);
    double* buf = fftw_->signal;
    for (std::size_t i = 0; i < m_; ++i) buf[i] = 0.0;
    buf[0] = half_[0];
    for (std::size_t j = 1; j < n_; ++j) {
        buf[j] = half_[j];
        buf[m_ - j] = half_[j];
    }
    fftw_execute(fftw_->forward);
    fftw_->kernel_spectrum.resize(m_ / 2 + 1);
    const double scale = dx_ / static_cast<double>(m_);
    for (std::size_t q = 0; q < m_ / 2 + 1; ++q) {
        fftw_->kernel_spectrum[q] = std::complex<double>(fftw_->spectrum[q][0], fftw_->spectrum[q][1]) * scale;
    }
}

Convolver::~Convolver() = default;
Convolver::Convolver(Convolver&&) noexcept = default;
Convolver& Convolver::operator=(Convolver&&) noexcept = default;

void Convolver::apply(std::span<const double> field, std::span<double> out) {
    if (field.size() != n_ || out.size() != n_) {
        throw GridMismatchError("grid mismatch: convolver bound to " + std::to_string(n_) + " samples, got " +
                                std::to_string(field.size()));
    }
    if (method_ == ConvolutionMethod::direct) {
        const auto n = static_cast<std::ptrdiff_t>(n_);
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::ptrdiff_t i = 0; i < n; ++i) {
                const std::ptrdiff_t d = j - i;
                s += half_[static_cast<std::size_t>(d < 0 ? -d : d)] * field[static_cast<std::size_t>(i)];
            }
            out[static_cast<std::size_t>(j)] = dx_ * s;
        }
        return;
    }

    double* buf = fftw_->signal;
    for (std::size_t i = 0; i < n_; ++i) buf[i] = field[i];
    for (std::size_t i = n_; i < m_; ++i) buf[i] = 0.0;
    fftw_execute(fftw_->forward);
    fftw_complex* s = fftw_->spectrum;
    for (std::size_t q = 0; q < m_ / 2 + 1; ++q) {
        const std::complex<double> z = std::complex<double>(s[q][0], s[q][1]) * fftw_->kernel_spectrum[q];
        s[q][0] = z.real();
        s[q][1] = z.imag();
    }
    fftw_execute(fftw_->inverse);
    for (std::size_t i = 0; i < n_; ++i) out[i] = buf[i];
}

Trajectory integrate(const RhsFunction& rhs, std::vector<double> y, const TimeGrid& time,
                     const IntegrateOptions& options) {
    if (options.stride == 0) throw ValidationError({"snapshot stride >= 1"});
    const std::size_t n = y.size();
    Trajectory traj;
    traj.time = time;
    traj.stride = options.stride;
    traj.layout = options.layout;
    if (traj.layout.components.empty()) {
        traj.layout.components = {"y"};
        traj.layout.points = n;
    }

    auto check_finite = [&](std::size_t step, double t) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(y[i])) throw NumericError(step, t, traj.layout.describe(i), y[i]);
        }
    };
    auto observe = [&](std::size_t step, double t) {
        if (options.on_step) options.on_step(step, t, y);
        if (options.record && step % options.stride == 0) {
            traj.times.push_back(t);
            traj.snapshots.push_back(y);
        }
    };

    check_finite(0, time.t(0));
    observe(0, time.t(0));

    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double dt = time.dt();
    const double half = 0.5 * dt;
    const double sixth = dt / 6.0;
    for (std::size_t k = 0; k < time.n_steps(); ++k) {
        const double t = time.t(k);
        rhs(t, y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + half * k1[i];
        rhs(t + half, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + half * k2[i];
        rhs(t + half, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
        rhs(t + dt, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) y[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        check_finite(k + 1, time.t(k + 1));
        observe(k + 1, time.t(k + 1));
    }
    return traj;
}

}  // namespace excitable
