#include "gcsf/geometry.hpp"

#include "detail.hpp"
#include "gcsf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gcsf {

namespace {

constexpr double kPi = std::numbers::pi;

void require_size(const AngleGrid& grid, std::size_t size) {
    if (grid.size() != size) {
        throw std::invalid_argument("profile length does not match grid size");
    }
}

}  // namespace

CurvatureProfile::CurvatureProfile(AngleGrid g, std::vector<double> values, double time)
    : grid(g), k(std::move(values)), t(time) {
    require_size(grid, k.size());
    for (std::size_t j = 0; j < k.size(); ++j) {
        if (!(k[j] > 0.0) || !std::isfinite(k[j])) {
            throw ConvexityLossError("curvature must be positive and finite", j);
        }
    }
}

double CurvatureProfile::k_min() const { return *std::min_element(k.begin(), k.end()); }
double CurvatureProfile::k_max() const { return *std::max_element(k.begin(), k.end()); }

SupportProfile::SupportProfile(AngleGrid g, std::vector<double> values, double time)
    : grid(g), h(std::move(values)), t(time) {
    require_size(grid, h.size());
    std::vector<double> radius(h.size());
    periodic_ops(h.size()).shifted_operator(h, radius);
    for (std::size_t j = 0; j < radius.size(); ++j) {
        if (!(radius[j] > 0.0) || !std::isfinite(radius[j])) {
            throw ConvexityLossError("support function has h'' + h <= 0", j);
        }
    }
}

double ClosureResidual::norm() const { return std::hypot(cos_part, sin_part); }

PlaneCurve reconstruct(const CurvatureProfile& kp) {
    const std::size_t n = kp.grid.size();
    std::vector<double> fx(n), fy(n), x(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double th = kp.grid.theta(j);
        fx[j] = std::cos(th) / kp.k[j];
        fy[j] = std::sin(th) / kp.k[j];
    }
    auto& ops = periodic_ops(n);
    ops.cumulative_integral(fx, x);
    ops.cumulative_integral(fy, y);
    PlaneCurve curve{kp.grid, std::vector<Vec2>(n)};
    for (std::size_t j = 0; j < n; ++j) curve.points[j] = {x[j], y[j]};
    return curve;
}

ClosureResidual closure_residual(const CurvatureProfile& kp) {
    double cx = 0.0, sx = 0.0;
    for (std::size_t j = 0; j < kp.k.size(); ++j) {
        const double th = kp.grid.theta(j);
        cx += std::cos(th) / kp.k[j];
        sx += std::sin(th) / kp.k[j];
    }
    const double h = kp.grid.spacing();
    return {cx * h, sx * h};
}

double length_of(const CurvatureProfile& kp) {
    double sum = 0.0;
    for (double v : kp.k) sum += 1.0 / v;
    return sum * kp.grid.spacing();
}

double curvature_energy(const CurvatureProfile& kp) { return periodic_integral(kp.k); }

double area_of(const PlaneCurve& curve) {
    const std::size_t n = curve.points.size();
    std::vector<double> x(n), y(n), dx(n), dy(n);
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = curve.points[j].x;
        y[j] = curve.points[j].y;
    }
    auto& ops = periodic_ops(n);
    ops.first_derivative(x, dx);
    ops.first_derivative(y, dy);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += x[j] * dy[j] - y[j] * dx[j];
    return 0.5 * sum * curve.grid.spacing();
}

double area_from_support(const SupportProfile& sp) {
    const std::size_t n = sp.h.size();
    std::vector<double> radius(n);
    periodic_ops(n).shifted_operator(sp.h, radius);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += sp.h[j] * radius[j];
    return 0.5 * sum * sp.grid.spacing();
}

SupportProfile support_from_curvature_unchecked(const CurvatureProfile& kp) {
    const std::size_t n = kp.k.size();
    std::vector<double> radius(n), h(n);
    for (std::size_t j = 0; j < n; ++j) radius[j] = 1.0 / kp.k[j];
    periodic_ops(n).solve_shifted(radius, h);
    return SupportProfile(kp.grid, std::move(h), kp.t);
}

SupportProfile support_from_curvature(const CurvatureProfile& kp, double rel_tol) {
    const double residual = closure_residual(kp).norm();
    const double L = length_of(kp);
    if (residual > rel_tol * L) {
        throw NotClosedError("curvature profile is not closed: residual " + std::to_string(residual) +
                             " exceeds " + std::to_string(rel_tol) + " L");
    }
    return support_from_curvature_unchecked(kp);
}

CurvatureProfile k_from_support(const SupportProfile& sp, SpatialScheme scheme) {
    const std::size_t n = sp.h.size();
    std::vector<double> k(n);
    periodic_ops(n).shifted_operator(sp.h, k, scheme);
    for (std::size_t j = 0; j < n; ++j) {
        if (!(k[j] > 0.0)) {
            throw ConvexityLossError("h'' + h <= 0", j);
        }
        k[j] = 1.0 / k[j];
    }
    return CurvatureProfile(sp.grid, std::move(k), sp.t);
}

PlaneCurve curve_from_support(const SupportProfile& sp) {
    const std::size_t n = sp.h.size();
    std::vector<double> dh(n);
    periodic_ops(n).first_derivative(sp.h, dh);
    PlaneCurve curve{sp.grid, std::vector<Vec2>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        const double th = sp.grid.theta(j);
        const Vec2 nrm = outward_normal(th);
        curve.points[j] = {sp.h[j] * nrm.x + dh[j] * std::cos(th), sp.h[j] * nrm.y + dh[j] * std::sin(th)};
    }
    return curve;
}

Vec2 steiner_point(const SupportProfile& sp) {
    Vec2 s;
    for (std::size_t j = 0; j < sp.h.size(); ++j) {
        const Vec2 nrm = outward_normal(sp.grid.theta(j));
        s.x += sp.h[j] * nrm.x;
        s.y += sp.h[j] * nrm.y;
    }
    const double scale = sp.grid.spacing() / kPi;
    return {s.x * scale, s.y * scale};
}

SupportProfile translate(const SupportProfile& sp, Vec2 c) {
    std::vector<double> h = sp.h;
    for (std::size_t j = 0; j < h.size(); ++j) {
        const Vec2 nrm = outward_normal(sp.grid.theta(j));
        h[j] += c.x * nrm.x + c.y * nrm.y;
    }
    return SupportProfile(sp.grid, std::move(h), sp.t);
}

double hausdorff_to_unit_disk(const SupportProfile& sp) {
    detail::require_nondegenerate(sp);
    const Vec2 s = steiner_point(sp);
    double worst = 0.0;
    for (std::size_t j = 0; j < sp.h.size(); ++j) {
        const Vec2 nrm = outward_normal(sp.grid.theta(j));
        const double centred = sp.h[j] - (s.x * nrm.x + s.y * nrm.y);
        worst = std::max(worst, std::abs(centred - 1.0));
    }
    return worst;
}

SupportProfile normalize(const SupportProfile& sp, double area) {
    if (!(area > 0.0)) {
        throw std::invalid_argument("area must be positive");
    }
    const double scale = std::sqrt(kPi / area);
    std::vector<double> h = sp.h;
    for (double& v : h) v *= scale;
    return SupportProfile(sp.grid, std::move(h), sp.t);
}

SupportProfile normalize(const SupportProfile& sp) { return normalize(sp, area_from_support(sp)); }

GeometrySummary summarize(const CurvatureProfile& kp, const SupportProfile& sp) {
    GeometrySummary s;
    s.t = kp.t;
    s.L = length_of(kp);
    s.A = area_from_support(sp);
    const Radii r = radii(sp);
    s.r_in = r.r_in;
    s.r_out = r.r_out;
    s.k_min = kp.k_min();
    s.k_max = kp.k_max();
    s.closure_residual = closure_residual(kp).norm();
    s.iso_ratio = s.L * s.L / s.A;
    const double spread = s.r_out - s.r_in;
    s.bonnesen_gap = s.iso_ratio - 4.0 * kPi - kPi * kPi * spread * spread / s.A;
    s.total_curvature_sq = curvature_energy(kp);
    s.gage_deficit = 1.0 - (kPi * s.L / s.A) / s.total_curvature_sq;
    s.hausdorff = hausdorff_to_unit_disk(normalize(sp, s.A));
    return s;
}

}  // namespace gcsf
