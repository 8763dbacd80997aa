#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace gcsf {

/// Normal speed v = G(k) k of the generalized curve shortening flow.
///
/// Holds G and its first two derivatives. Laws are immutable once built and
/// may be shared freely between threads. For the power family G(x) = x^(p-1)
/// the exponent is kept so that hot loops can avoid std::pow.
class SpeedLaw {
public:
    using Fn = std::function<double(double)>;

    SpeedLaw(std::string label, Fn g, Fn dg, Fn d2g, std::optional<Fn> tail_integral = std::nullopt);

    const std::string& label() const noexcept { return label_; }

    double g(double x) const;
    double dg(double x) const;
    double d2g(double x) const;

    /// Phi(k) = G(k) k and its derivatives. Throw EvaluationError for k <= 0
    /// or a non-finite result.
    double phi(double k) const;
    double phi_prime(double k) const;
    double phi_double_prime(double k) const;

    /// Nodewise Phi over an array; same checks as phi().
    void phi_into(std::span<const double> k, std::span<double> out) const;

    /// Largest k^2 Phi'(k) over the array (the diffusivity of the curvature PDE).
    double max_diffusivity(std::span<const double> k) const;

    bool has_closed_form_tail() const noexcept { return tail_.has_value(); }

    /// Integral of 1/(G(x) x^3) from k to infinity. Uses the closed form when
    /// one was supplied, otherwise adaptive quadrature.
    double tail_integral(double k) const;

    /// Exponent p when this law is x^(p-1).
    std::optional<double> power_exponent() const noexcept { return power_; }

    friend SpeedLaw power_law(double p);

private:
    std::string label_;
    Fn g_, dg_, d2g_;
    std::optional<Fn> tail_;
    std::optional<double> power_;
};

/// G(x) = x^(p-1), i.e. v = k^p. Rejects p <= 0 with std::invalid_argument.
SpeedLaw power_law(double p);

/// Parses "power:<p>" (p may be written as a fraction, e.g. "power:1/3").
SpeedLaw parse_law(const std::string& name);

struct HypothesisReport {
    bool h1_ok = true;
    bool h2_convexity_ok = true;
    bool h2_growth_ok = true;
    std::optional<double> witness_C0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    double worst_violation = 0.0;
    std::optional<double> witness_abscissa;

    bool all_ok() const noexcept { return h1_ok && h2_convexity_ok && h2_growth_ok; }
};

/// Numerically probes (H1) and (H2) on a log-spaced grid over [x_lo, x_hi].
///
/// (H1): G > 0 and G' >= 0 at every probe.
/// (H2) convexity: (G x^2)'' = Phi'' x + 2 Phi' >= -1e-10 max|G x^2|.
/// (H2) growth: witness_C0 is the smallest C0 with G' x <= C0 G on the upper
/// half of the probes; the check fails when G' x / G is still increasing over
/// the top quarter of the range (no bounded C0 in sight).
HypothesisReport check_hypotheses(const SpeedLaw& law, double x_lo, double x_hi, int n_probes = 256);

}  // namespace gcsf
