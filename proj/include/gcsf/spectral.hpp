#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gcsf {

/// Uniform periodic grid theta_j = 2 pi j / n on the tangent-angle circle.
class AngleGrid {
public:
    /// n must be a power of two and at least 32.
    explicit AngleGrid(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return spacing_; }
    double theta(std::size_t j) const noexcept { return spacing_ * static_cast<double>(j); }
    std::vector<double> thetas() const;

    friend bool operator==(const AngleGrid&, const AngleGrid&) = default;

private:
    std::size_t n_;
    double spacing_;
};

/// Periodic trapezoid rule over the full circle: dtheta * sum f_j.
double periodic_integral(std::span<const double> f);

enum class SpatialScheme { fourier, fd4 };

/// Largest |eigenvalue| of d^2/dtheta^2 on the grid, times dtheta^2 / pi^2.
/// Fourier: 1. Fourth-order central differences: 16 / (3 pi^2).
double scheme_spectral_factor(SpatialScheme scheme);

/// Differentiation, inversion and integration on one periodic grid size.
///
/// Owns its FFTW plans and scratch buffers, so an instance must not be used
/// from two threads at once. periodic_ops() hands out one instance per
/// (thread, n).
class PeriodicOps {
public:
    explicit PeriodicOps(std::size_t n);
    ~PeriodicOps();
    PeriodicOps(const PeriodicOps&) = delete;
    PeriodicOps& operator=(const PeriodicOps&) = delete;

    std::size_t size() const noexcept { return n_; }

    void first_derivative(std::span<const double> f, std::span<double> out,
                          SpatialScheme scheme = SpatialScheme::fourier);
    void second_derivative(std::span<const double> f, std::span<double> out,
                           SpatialScheme scheme = SpatialScheme::fourier);

    /// out = f'' + f. With dealias set, Fourier modes above n/3 are dropped.
    void shifted_operator(std::span<const double> f, std::span<double> out,
                          SpatialScheme scheme = SpatialScheme::fourier, bool dealias = false);

    /// Solves h'' + h = rhs in Fourier space. The cos/sin theta kernel modes of
    /// the solution are set to zero; the matching modes of rhs are ignored.
    void solve_shifted(std::span<const double> rhs, std::span<double> out);

    /// out_j = integral of f from 0 to theta_j. The mean of f integrates
    /// linearly, the rest spectrally.
    void cumulative_integral(std::span<const double> f, std::span<double> out);

    /// Fourier coefficients c_m = (1/n) sum_j f_j exp(-i m theta_j), m = 0..n/2.
    std::vector<std::complex<double>> coefficients(std::span<const double> f);

private:
    void forward(std::span<const double> f, double shift);
    void inverse(std::span<double> out);

    std::size_t n_;
    double* real_ = nullptr;
    std::complex<double>* spec_ = nullptr;
    void* plan_forward_ = nullptr;
    void* plan_inverse_ = nullptr;
};

/// Thread-local PeriodicOps for grid size n.
PeriodicOps& periodic_ops(std::size_t n);

/// Band-limited interpolant of periodic samples, evaluable anywhere on the
/// circle together with its first two derivatives.
class TrigInterpolant {
public:
    explicit TrigInterpolant(std::span<const double> samples);

    struct Value {
        double f;
        double df;
        double d2f;
    };

    Value operator()(double theta) const;
    double value(double theta) const { return (*this)(theta).f; }

private:
    std::vector<double> a_;  // cosine coefficients, m = 0..n/2
    std::vector<double> b_;  // sine coefficients
};

}  // namespace gcsf
