#pragma once

#include "gcsf/spectral.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace gcsf {

// Conventions. theta is the tangent angle, the unit tangent is
// T = (cos theta, sin theta), the outward normal is n = (sin theta, -cos theta),
// and curves wind counterclockwise. The support function is h = <x, n>, so
// h'' + h = 1/k and the boundary point with normal n(theta) is h n + h' T.

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 outward_normal(double theta) noexcept { return {std::sin(theta), -std::cos(theta)}; }

/// Curvature sampled on the angle grid at time t. All k_j > 0.
struct CurvatureProfile {
    CurvatureProfile(AngleGrid grid, std::vector<double> k, double t = 0.0);

    AngleGrid grid;
    std::vector<double> k;
    double t = 0.0;

    double k_min() const;
    double k_max() const;
};

/// Support function sampled on the angle grid. h'' + h > 0 at every node.
struct SupportProfile {
    SupportProfile(AngleGrid grid, std::vector<double> h, double t = 0.0);

    AngleGrid grid;
    std::vector<double> h;
    double t = 0.0;
};

struct PlaneCurve {
    AngleGrid grid;
    std::vector<Vec2> points;
};

struct ClosureResidual {
    double cos_part = 0.0;
    double sin_part = 0.0;
    double norm() const;
};

struct Radii {
    double r_in = 0.0;
    double r_out = 0.0;
    Vec2 in_center;
    Vec2 out_center;
};

/// Scalar observables of one snapshot.
struct GeometrySummary {
    double t = 0.0;
    double L = 0.0;
    double A = 0.0;
    double r_in = 0.0;
    double r_out = 0.0;
    double k_min = 0.0;
    double k_max = 0.0;
    double closure_residual = 0.0;
    double iso_ratio = 0.0;
    double bonnesen_gap = 0.0;
    double gage_deficit = 0.0;
    double hausdorff = 0.0;          // normalized curve vs unit disk
    double total_curvature_sq = 0.0;  // integral of k^2 ds = integral of k dtheta
};

/// Curve through the origin at theta = 0, built by integrating
/// (cos theta, sin theta)/k. The last point falls short of closing the loop
/// by exactly the closure residual.
PlaneCurve reconstruct(const CurvatureProfile& kp);

/// (integral of cos/k, integral of sin/k); both vanish for a closed curve.
ClosureResidual closure_residual(const CurvatureProfile& kp);

/// L = integral of dtheta / k.
double length_of(const CurvatureProfile& kp);

/// Shoelace area (1/2) integral of (x y' - y x') dtheta, with spectral
/// derivatives of the sampled points.
double area_of(const PlaneCurve& curve);

/// A = (1/2) integral of h (h'' + h) dtheta.
double area_from_support(const SupportProfile& sp);

/// integral of k^2 ds = integral of k dtheta.
double curvature_energy(const CurvatureProfile& kp);

/// Solves h'' + h = 1/k with the Steiner point pinned at the origin.
/// Throws NotClosedError when the closure residual exceeds rel_tol * L.
SupportProfile support_from_curvature(const CurvatureProfile& kp, double rel_tol = 1e-6);

/// Same solve without the closure check; the first harmonics of 1/k are
/// discarded.
SupportProfile support_from_curvature_unchecked(const CurvatureProfile& kp);

/// k = 1 / (h'' + h). Throws ConvexityLossError naming the first bad node.
CurvatureProfile k_from_support(const SupportProfile& sp, SpatialScheme scheme = SpatialScheme::fourier);

/// Points h n + h' T of the curve described by a support profile.
PlaneCurve curve_from_support(const SupportProfile& sp);

/// s = (1/pi) integral of h n dtheta.
Vec2 steiner_point(const SupportProfile& sp);

/// h(theta) + c . n(theta): the same body moved by c.
SupportProfile translate(const SupportProfile& sp, Vec2 c);

/// Largest inscribed and smallest circumscribed circle.
///
/// Both are semi-infinite linear programs in (center, radius). Each is solved
/// by a simplex exchange on the dual, with the most violated direction found
/// on the band-limited interpolant of h, so contacts between grid nodes are
/// resolved to roundoff. Throws DegenerateProfileError when k_max/k_min > 1e8.
Radii radii(const SupportProfile& sp);

/// sup |h_c - 1| where h_c is h recentred on its Steiner point; for convex
/// bodies this is the Hausdorff distance to the unit disk.
double hausdorff_to_unit_disk(const SupportProfile& sp);

/// Scales h by sqrt(pi / A).
SupportProfile normalize(const SupportProfile& sp, double area);
SupportProfile normalize(const SupportProfile& sp);

/// All observables of a snapshot. kp and sp must describe the same curve.
GeometrySummary summarize(const CurvatureProfile& kp, const SupportProfile& sp);

}  // namespace gcsf
