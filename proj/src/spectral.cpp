#include "gcsf/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace gcsf {

namespace {

// The FFTW planner is not re-entrant; plan execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

AngleGrid::AngleGrid(std::size_t n) : n_(n), spacing_(2.0 * std::numbers::pi / static_cast<double>(n)) {
    if (n < 32 || !is_power_of_two(n)) {
        throw std::invalid_argument("grid size must be a power of two >= 32");
    }
}

std::vector<double> AngleGrid::thetas() const {
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = theta(j);
    return out;
}

double periodic_integral(std::span<const double> f) {
    double sum = 0.0;
    for (double v : f) sum += v;
    return sum * 2.0 * std::numbers::pi / static_cast<double>(f.size());
}

double scheme_spectral_factor(SpatialScheme scheme) {
    switch (scheme) {
        case SpatialScheme::fourier:
            return 1.0;
        case SpatialScheme::fd4:
            return 16.0 / (3.0 * std::numbers::pi * std::numbers::pi);
    }
    return 1.0;
}

PeriodicOps::PeriodicOps(std::size_t n) : n_(n) {
    if (n < 4 || n % 2 != 0) {
        throw std::invalid_argument("periodic grid size must be even");
    }
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(n);
    spec_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n / 2 + 1));
    auto* spec = reinterpret_cast<fftw_complex*>(spec_);
    plan_forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spec, FFTW_ESTIMATE);
    plan_inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real_, FFTW_ESTIMATE);
}

PeriodicOps::~PeriodicOps() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
    fftw_free(real_);
    fftw_free(spec_);
}

void PeriodicOps::forward(std::span<const double> f, double shift) {
    if (f.size() != n_) throw std::invalid_argument("array size does not match grid");
    for (std::size_t j = 0; j < n_; ++j) real_[j] = f[j] - shift;
    fftw_execute(static_cast<fftw_plan>(plan_forward_));
}

void PeriodicOps::inverse(std::span<double> out) {
    if (out.size() != n_) throw std::invalid_argument("array size does not match grid");
    fftw_execute(static_cast<fftw_plan>(plan_inverse_));
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = real_[j] * scale;
}

void PeriodicOps::first_derivative(std::span<const double> f, std::span<double> out, SpatialScheme scheme) {
    const std::size_t n = n_;
    if (scheme == SpatialScheme::fd4) {
        const double inv = 1.0 / (12.0 * 2.0 * std::numbers::pi / static_cast<double>(n));
        for (std::size_t j = 0; j < n; ++j) {
            const double fm2 = f[(j + n - 2) % n], fm1 = f[(j + n - 1) % n];
            const double fp1 = f[(j + 1) % n], fp2 = f[(j + 2) % n];
            out[j] = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) * inv;
        }
        return;
    }
    // Subtracting f_0 keeps constant profiles exactly constant.
    forward(f, f[0]);
    for (std::size_t m = 0; m <= n / 2; ++m) {
        spec_[m] *= std::complex<double>(0.0, static_cast<double>(m));
    }
    spec_[n / 2] = 0.0;
    inverse(out);
}

void PeriodicOps::second_derivative(std::span<const double> f, std::span<double> out, SpatialScheme scheme) {
    const std::size_t n = n_;
    if (scheme == SpatialScheme::fd4) {
        const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
        const double inv = 1.0 / (12.0 * h * h);
        for (std::size_t j = 0; j < n; ++j) {
            const double fm2 = f[(j + n - 2) % n], fm1 = f[(j + n - 1) % n];
            const double fp1 = f[(j + 1) % n], fp2 = f[(j + 2) % n];
            out[j] = (-fm2 + 16.0 * fm1 - 30.0 * f[j] + 16.0 * fp1 - fp2) * inv;
        }
        return;
    }
    forward(f, f[0]);
    for (std::size_t m = 0; m <= n / 2; ++m) {
        spec_[m] *= -static_cast<double>(m * m);
    }
    inverse(out);
}

void PeriodicOps::shifted_operator(std::span<const double> f, std::span<double> out, SpatialScheme scheme,
                                   bool dealias) {
    if (scheme == SpatialScheme::fourier && dealias) {
        const std::size_t n = n_;
        forward(f, 0.0);
        const std::size_t cutoff = n / 3;
        for (std::size_t m = 0; m <= n / 2; ++m) {
            spec_[m] *= (m > cutoff) ? 0.0 : 1.0 - static_cast<double>(m * m);
        }
        inverse(out);
        return;
    }
    second_derivative(f, out, scheme);
    for (std::size_t j = 0; j < n_; ++j) out[j] += f[j];
}

void PeriodicOps::solve_shifted(std::span<const double> rhs, std::span<double> out) {
    forward(rhs, 0.0);
    for (std::size_t m = 0; m <= n_ / 2; ++m) {
        if (m == 1) {
            spec_[m] = 0.0;
        } else {
            spec_[m] /= 1.0 - static_cast<double>(m * m);
        }
    }
    inverse(out);
}

void PeriodicOps::cumulative_integral(std::span<const double> f, std::span<double> out) {
    const std::size_t n = n_;
    forward(f, 0.0);
    const double mean = spec_[0].real() / static_cast<double>(n);
    spec_[0] = 0.0;
    spec_[n / 2] = 0.0;
    for (std::size_t m = 1; m < n / 2; ++m) {
        spec_[m] /= std::complex<double>(0.0, static_cast<double>(m));
    }
    inverse(out);
    const double origin = out[0];
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] += mean * h * static_cast<double>(j) - origin;
    }
}

std::vector<std::complex<double>> PeriodicOps::coefficients(std::span<const double> f) {
    forward(f, 0.0);
    std::vector<std::complex<double>> c(spec_, spec_ + n_ / 2 + 1);
    for (auto& v : c) v /= static_cast<double>(n_);
    return c;
}

PeriodicOps& periodic_ops(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<PeriodicOps>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<PeriodicOps>(n);
    return *slot;
}

TrigInterpolant::TrigInterpolant(std::span<const double> samples) {
    const std::size_t n = samples.size();
    const auto c = periodic_ops(n).coefficients(samples);
    a_.assign(n / 2 + 1, 0.0);
    b_.assign(n / 2 + 1, 0.0);
    a_[0] = c[0].real();
    for (std::size_t m = 1; m < n / 2; ++m) {
        a_[m] = 2.0 * c[m].real();
        b_[m] = -2.0 * c[m].imag();
    }
    a_[n / 2] = c[n / 2].real();
}

TrigInterpolant::Value TrigInterpolant::operator()(double theta) const {
    // cos(m t), sin(m t) by repeated rotation.
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double cm = 1.0, sm = 0.0;
    Value v{a_[0], 0.0, 0.0};
    for (std::size_t m = 1; m < a_.size(); ++m) {
        const double cn = cm * c1 - sm * s1;
        sm = sm * c1 + cm * s1;
        cm = cn;
        const double md = static_cast<double>(m);
        v.f += a_[m] * cm + b_[m] * sm;
        v.df += md * (b_[m] * cm - a_[m] * sm);
        v.d2f -= md * md * (a_[m] * cm + b_[m] * sm);
    }
    return v;
}

}  // namespace gcsf
