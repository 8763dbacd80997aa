#include "gcsf/speed_law.hpp"

#include "gcsf/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gcsf {

namespace {

double checked(double value, double x, const char* what) {
    if (!std::isfinite(value)) {
        throw EvaluationError(std::string("non-finite ") + what, x);
    }
    return value;
}

void require_positive(double k) {
    if (!(k > 0.0)) {
        throw EvaluationError("curvature must be positive", k);
    }
}

double parse_number(std::string_view text) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

SpeedLaw::SpeedLaw(std::string label, Fn g, Fn dg, Fn d2g, std::optional<Fn> tail_integral)
    : label_(std::move(label)), g_(std::move(g)), dg_(std::move(dg)), d2g_(std::move(d2g)),
      tail_(std::move(tail_integral)) {
    if (!g_ || !dg_ || !d2g_) {
        throw std::invalid_argument("speed law needs G, G' and G''");
    }
}

double SpeedLaw::g(double x) const { return checked(g_(x), x, "G"); }
double SpeedLaw::dg(double x) const { return checked(dg_(x), x, "G'"); }
double SpeedLaw::d2g(double x) const { return checked(d2g_(x), x, "G''"); }

double SpeedLaw::phi(double k) const {
    require_positive(k);
    return checked(g_(k) * k, k, "Phi");
}

double SpeedLaw::phi_prime(double k) const {
    require_positive(k);
    return checked(dg_(k) * k + g_(k), k, "Phi'");
}

double SpeedLaw::phi_double_prime(double k) const {
    require_positive(k);
    return checked(d2g_(k) * k + 2.0 * dg_(k), k, "Phi''");
}

void SpeedLaw::phi_into(std::span<const double> k, std::span<double> out) const {
    for (double v : k) {
        require_positive(v);
    }
    if (power_) {
        const double p = *power_;
        if (p == 1.0) {
            std::copy(k.begin(), k.end(), out.begin());
        } else if (p == 2.0) {
            for (std::size_t j = 0; j < k.size(); ++j) out[j] = k[j] * k[j];
        } else if (p == 3.0) {
            for (std::size_t j = 0; j < k.size(); ++j) out[j] = k[j] * k[j] * k[j];
        } else {
            for (std::size_t j = 0; j < k.size(); ++j) out[j] = std::pow(k[j], p);
        }
    } else {
        for (std::size_t j = 0; j < k.size(); ++j) out[j] = g_(k[j]) * k[j];
    }
    for (std::size_t j = 0; j < k.size(); ++j) {
        checked(out[j], k[j], "Phi");
    }
}

double SpeedLaw::max_diffusivity(std::span<const double> k) const {
    if (power_) {
        // k^2 Phi'(k) = p k^(p+1) is increasing, so the maximum sits at k_max.
        const double kmax = *std::max_element(k.begin(), k.end());
        return kmax * kmax * phi_prime(kmax);
    }
    double best = 0.0;
    for (double v : k) {
        best = std::max(best, v * v * phi_prime(v));
    }
    return best;
}

double SpeedLaw::tail_integral(double k) const {
    require_positive(k);
    if (tail_) {
        return checked((*tail_)(k), k, "tail integral");
    }
    // x = k/u maps [k, inf) onto (0, 1]; the integrand u / (G(k/u) k^2) is
    // bounded because G is positive and non-decreasing.
    auto integrand = [&](double u) { return u / (g_(k / u) * k * k); };
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 20, 1e-13, &error);
    if (!std::isfinite(value) || error > 1e-9 * std::abs(value)) {
        throw EvaluationError("tail integral quadrature did not converge", k);
    }
    return value;
}

SpeedLaw power_law(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("power law exponent must be positive");
    }
    std::ostringstream label;
    label << "power p=" << p;
    SpeedLaw law(
        label.str(), [p](double x) { return std::pow(x, p - 1.0); },
        [p](double x) { return p == 1.0 ? 0.0 : (p - 1.0) * std::pow(x, p - 2.0); },
        [p](double x) { return (p == 1.0 || p == 2.0) ? 0.0 : (p - 1.0) * (p - 2.0) * std::pow(x, p - 3.0); },
        [p](double k) { return std::pow(k, -(p + 1.0)) / (p + 1.0); });
    law.power_ = p;
    return law;
}

SpeedLaw parse_law(const std::string& name) {
    constexpr std::string_view prefix = "power:";
    if (name.rfind(prefix, 0) != 0) {
        throw std::invalid_argument("unknown speed law '" + name + "' (expected power:<p>)");
    }
    std::string_view arg(name);
    arg.remove_prefix(prefix.size());
    const auto slash = arg.find('/');
    double p = 0.0;
    if (slash == std::string_view::npos) {
        p = parse_number(arg);
    } else {
        const double den = parse_number(arg.substr(slash + 1));
        p = parse_number(arg.substr(0, slash)) / den;
    }
    return power_law(p);
}

HypothesisReport check_hypotheses(const SpeedLaw& law, double x_lo, double x_hi, int n_probes) {
    if (!(x_lo > 0.0) || !(x_hi > x_lo)) {
        throw std::invalid_argument("probe range must satisfy 0 < x_lo < x_hi");
    }
    if (n_probes < 16) {
        throw std::invalid_argument("at least 16 probes are required");
    }

    HypothesisReport report;
    report.x_lo = x_lo;
    report.x_hi = x_hi;

    const auto n = static_cast<std::size_t>(n_probes);
    std::vector<double> xs(n), g(n), dg(n), convex(n), ratio(n);
    const double step = std::log(x_hi / x_lo) / static_cast<double>(n - 1);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (i + 1 == n) ? x_hi : x_lo * std::exp(step * static_cast<double>(i));
        xs[i] = x;
        g[i] = law.g(x);
        dg[i] = law.dg(x);
        convex[i] = law.phi_double_prime(x) * x + 2.0 * law.phi_prime(x);
        scale = std::max(scale, std::abs(g[i] * x * x));
    }

    auto record = [&](double magnitude, double x) {
        if (magnitude > report.worst_violation) {
            report.worst_violation = magnitude;
            report.witness_abscissa = x;
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (!(g[i] > 0.0)) {
            report.h1_ok = false;
            record(std::max(-g[i], std::numeric_limits<double>::min()), xs[i]);
        }
        if (dg[i] < 0.0) {
            report.h1_ok = false;
            record(-dg[i], xs[i]);
        }
        const double floor = -1e-10 * scale;
        if (convex[i] < floor) {
            report.h2_convexity_ok = false;
            record(floor - convex[i], xs[i]);
        }
    }

    // Growth condition, only meaningful where G > 0.
    const std::size_t half = n / 2;
    const std::size_t three_quarter = (3 * n) / 4;
    double c0 = 0.0;
    double third_quarter_max = -std::numeric_limits<double>::infinity();
    double top_quarter_max = -std::numeric_limits<double>::infinity();
    std::size_t top_arg = n - 1;
    for (std::size_t i = half; i < n; ++i) {
        ratio[i] = dg[i] * xs[i] / g[i];
        if (!std::isfinite(ratio[i])) {
            report.h2_growth_ok = false;
            record(std::numeric_limits<double>::max(), xs[i]);
            continue;
        }
        c0 = std::max(c0, ratio[i]);
        if (i < three_quarter) {
            third_quarter_max = std::max(third_quarter_max, ratio[i]);
        } else if (ratio[i] > top_quarter_max) {
            top_quarter_max = ratio[i];
            top_arg = i;
        }
    }
    const double excess = top_quarter_max - third_quarter_max;
    if (excess > 1e-9 * (1.0 + std::abs(third_quarter_max))) {
        report.h2_growth_ok = false;
        record(excess, xs[top_arg]);
    }
    if (report.h2_growth_ok) {
        report.witness_C0 = c0;
    }
    return report;
}

}  // namespace gcsf
