#include "detail.hpp"
#include "gcsf/errors.hpp"
#include "gcsf/geometry.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace gcsf {

namespace detail {

void require_nondegenerate(const SupportProfile& sp) {
    std::vector<double> radius(sp.h.size());
    periodic_ops(sp.h.size()).shifted_operator(sp.h, radius);
    const auto [lo, hi] = std::minmax_element(radius.begin(), radius.end());
    if (!(*lo > 0.0)) {
        throw ConvexityLossError("h'' + h <= 0", static_cast<std::size_t>(lo - radius.begin()));
    }
    // k_max / k_min = max radius of curvature / min radius of curvature.
    if (*hi / *lo > 1e8) {
        throw DegenerateProfileError("k_max / k_min exceeds 1e8; profile is numerically non-convex");
    }
}

}  // namespace detail

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

struct Minimax {
    double r = 0.0;
    Vec2 c;
};

bool invert(const Mat3& m, Mat3& inv) {
    const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    if (!(std::abs(det) > 1e-300)) return false;
    const double id = 1.0 / det;
    inv[0][0] = c00 * id;
    inv[1][0] = c01 * id;
    inv[2][0] = c02 * id;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * id;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * id;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * id;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * id;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * id;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * id;
    return true;
}

Vec3 column(double theta) { return {1.0, std::sin(theta), -std::cos(theta)}; }

struct Peak {
    double value = 0.0;
    double theta = 0.0;
};

/// Local maxima of g(theta) = f(theta) - c . n(theta) on the band-limited
/// interpolant of f: grid scan, then safeguarded Newton within one cell.
class PeakFinder {
public:
    explicit PeakFinder(std::span<const double> f)
        : f_(f.begin(), f.end()),
          interp_(f),
          dtheta_(2.0 * std::numbers::pi / static_cast<double>(f.size())),
          sin_t_(f.size()),
          cos_t_(f.size()) {
        for (std::size_t j = 0; j < f.size(); ++j) {
            sin_t_[j] = std::sin(dtheta_ * static_cast<double>(j));
            cos_t_[j] = std::cos(dtheta_ * static_cast<double>(j));
        }
    }

    double dtheta() const { return dtheta_; }
    double value(double theta) const { return interp_.value(theta); }

    /// Every local maximum. Near the optimum the peaks are level to within
    /// grid error, so all of them are refined rather than the best few.
    std::vector<Peak> all(Vec2 c) const {
        const std::size_t n = f_.size();
        std::vector<Peak> out;
        auto g = [&](std::size_t j) { return f_[j] - (c.x * sin_t_[j] - c.y * cos_t_[j]); };
        for (std::size_t j = 0; j < n; ++j) {
            const double gj = g(j);
            if (gj >= g((j + n - 1) % n) && gj >= g((j + 1) % n)) {
                out.push_back(refine(dtheta_ * static_cast<double>(j), c));
            }
        }
        return out;
    }

    Peak top(Vec2 c) const {
        Peak best{-std::numeric_limits<double>::infinity(), 0.0};
        for (const Peak& p : all(c)) {
            if (p.value > best.value) best = p;
        }
        return best;
    }

    Peak refine(double centre, Vec2 c) const {
        auto eval = [&](double t) {
            const auto v = interp_(t);
            const double s = std::sin(t), co = std::cos(t);
            return std::array<double, 3>{v.f - (c.x * s - c.y * co), v.df - (c.x * co + c.y * s),
                                         v.d2f + (c.x * s - c.y * co)};
        };
        double th = centre;
        auto g = eval(th);
        for (int it = 0; it < 30; ++it) {
            double step = (g[2] < 0.0) ? -g[1] / g[2] : (g[1] > 0.0 ? 0.25 : -0.25) * dtheta_;
            step = std::clamp(step, -dtheta_, dtheta_);
            double trial = std::clamp(th + step, centre - dtheta_, centre + dtheta_);
            auto gt = eval(trial);
            int halvings = 0;
            while (gt[0] < g[0] && halvings < 30) {
                trial = th + 0.5 * (trial - th);
                gt = eval(trial);
                ++halvings;
            }
            if (gt[0] < g[0]) break;
            const double moved = std::abs(trial - th);
            th = trial;
            g = gt;
            if (moved < 1e-15) break;
        }
        return {g[0], th};
    }

private:
    std::vector<double> f_;
    TrigInterpolant interp_;
    double dtheta_;
    std::vector<double> sin_t_, cos_t_;
};

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi)); }

/// Two antipodal contacts leave the centre free to first order along the
/// common tangent direction; the simplex then approaches the optimum only by
/// crowding basis points onto one peak, and stalls. Here the two peaks are
/// kept level by moving c along their normal while a scalar search runs
/// along the tangent.
Minimax polish_antipodal(const PeakFinder& pf, Vec2 c0, Peak p1, Peak p2, double scale) {
    const Vec2 along = outward_normal(p1.theta);
    const Vec2 across{-along.y, along.x};
    auto level = [&](double s) {
        Vec2 c{c0.x + s * across.x, c0.y + s * across.y};
        Peak a = p1, b = p2;
        for (int it = 0; it < 8; ++it) {
            a = pf.refine(a.theta, c);
            b = pf.refine(b.theta, c);
            const Vec2 na = outward_normal(a.theta), nb = outward_normal(b.theta);
            // d(value)/dc = -n at the peak.
            const double slope = -((na.x - nb.x) * along.x + (na.y - nb.y) * along.y);
            const double phi = a.value - b.value;
            if (std::abs(phi) <= 1e-16 * scale || !(std::abs(slope) > 1e-3)) break;
            const double t = -phi / slope;
            c = {c.x + t * along.x, c.y + t * along.y};
        }
        return c;
    };
    auto objective = [&](double s) { return pf.top(level(s)).value; };
    const double span = 0.05 * scale;
    const auto [s_best, f_best] = boost::math::tools::brent_find_minima(objective, -span, span, 52);
    (void)f_best;
    const Vec2 c = level(s_best);
    return {pf.top(c).value, c};
}

/// min over c of max over theta of f(theta) - c . n(theta).
///
/// Primal simplex on the dual LP
///   max sum w_i f(theta_i)  s.t.  sum w_i = 1, sum w_i n(theta_i) = 0, w >= 0,
/// whose multipliers are (r, c). Pricing picks the direction where
/// f - c . n - r is largest on the interpolant. The reported r is the true
/// maximum at the reported centre, so it is always attained.
Minimax minimax_center(std::span<const double> f) {
    const PeakFinder pf(f);
    double scale = 0.0;
    for (double v : f) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1e-300);
    const double tol = 1e-14 * scale;

    std::array<double, 3> basis = {0.0, 2.0 * std::numbers::pi / 3.0, 4.0 * std::numbers::pi / 3.0};
    std::array<double, 3> fb{};
    for (int i = 0; i < 3; ++i) fb[i] = pf.value(basis[i]);

    Vec2 centre;
    for (int iter = 0; iter < 200; ++iter) {
        Mat3 m{}, inv{};
        for (int i = 0; i < 3; ++i) {
            const Vec3 a = column(basis[i]);
            for (int row = 0; row < 3; ++row) m[row][i] = a[row];
        }
        if (!invert(m, inv)) break;
        Vec3 w{}, y{};
        for (int i = 0; i < 3; ++i) {
            w[i] = inv[i][0];
            y[i] = inv[0][i] * fb[0] + inv[1][i] * fb[1] + inv[2][i] * fb[2];
        }
        centre = {y[1], y[2]};
        const Peak top = pf.top(centre);
        if (top.value - y[0] <= tol) break;

        const Vec3 a = column(top.theta);
        Vec3 d{};
        for (int i = 0; i < 3; ++i) d[i] = inv[i][0] * a[0] + inv[i][1] * a[1] + inv[i][2] * a[2];
        int leave = -1;
        double ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 3; ++i) {
            if (d[i] > 1e-14) {
                const double q = std::max(w[i], 0.0) / d[i];
                if (q < ratio || (q == ratio && leave >= 0 && d[i] > d[leave])) {
                    ratio = q;
                    leave = i;
                }
            }
        }
        if (leave < 0) break;
        bool repeated = false;
        for (int i = 0; i < 3; ++i) repeated = repeated || angle_gap(basis[i], top.theta) < 1e-13;
        if (repeated) break;
        basis[leave] = top.theta;
        fb[leave] = pf.value(top.theta);
    }

    Minimax best{pf.top(centre).value, centre};
    std::vector<Peak> peaks = pf.all(centre);
    std::sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) { return x.value > y.value; });
    if (peaks.size() >= 2) {
        for (std::size_t i = 1; i < peaks.size(); ++i) {
            if (best.r - peaks[i].value > 1e-6 * scale) break;
            if (std::abs(angle_gap(peaks[0].theta, peaks[i].theta) - std::numbers::pi) < 0.2) {
                const Minimax cand = polish_antipodal(pf, centre, peaks[0], peaks[i], scale);
                if (cand.r < best.r) best = cand;
                break;
            }
        }
    }
    return best;
}

}  // namespace

Radii radii(const SupportProfile& sp) {
    detail::require_nondegenerate(sp);
    Radii out;
    const Minimax outer = minimax_center(sp.h);
    out.r_out = outer.r;
    out.out_center = outer.c;

    std::vector<double> neg(sp.h.size());
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -sp.h[j];
    const Minimax inner = minimax_center(neg);
    out.r_in = -inner.r;
    out.in_center = {-inner.c.x, -inner.c.y};
    return out;
}

}  // namespace gcsf
