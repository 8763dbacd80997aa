#pragma once

#include "gcsf/flow.hpp"
#include "gcsf/geometry.hpp"

#include <span>
#include <vector>

namespace gcsf {

/// Exact shrinking circle under v = k^p: R(t)^(p+1) = R0^(p+1) - (p+1) t.
struct CircleSolution {
    CircleSolution(double R0, double p);

    double R0;
    double p;

    double omega() const;
};

struct CircleState {
    double R = 0.0;
    double k = 0.0;
    double L = 0.0;
    double A = 0.0;
};

/// Rejects t outside [0, omega).
CircleState circle_state(const CircleSolution& sol, double t);

/// Constant-curvature profile of a circle of radius R.
CurvatureProfile circle_profile(double R, const AngleGrid& grid, double t = 0.0);

/// Ellipse with semi-axes a >= b > 0, centred at the origin, axis a along y:
///   h(theta) = sqrt(a^2 cos^2 + b^2 sin^2),  k(theta) = h^3 / (a^2 b^2).
CurvatureProfile ellipse_profile(double a, double b, const AngleGrid& grid);
SupportProfile ellipse_support(double a, double b, const AngleGrid& grid);

struct PolygonMeasures {
    double L = 0.0;
    double A = 0.0;
    double r_in = 0.0;
    double r_out = 0.0;
    double hausdorff = 0.0;  // to the unit disk, after centring on the Steiner point
};

/// Direct measurements of a convex counterclockwise polygon (64 to 8192
/// vertices). Radii come from dense zooming grid searches over centres;
/// Hausdorff distance from a two-sided point-set comparison. Quadratic cost.
/// Throws std::invalid_argument on non-convex or clockwise input.
PolygonMeasures polygon_brute_force(std::span<const Vec2> points);

/// Two-sided Hausdorff distance between two convex polygons, computed
/// from vertex-to-polygon distances.
double polygon_hausdorff(std::span<const Vec2> a, std::span<const Vec2> b);

/// Analytically generated circle trajectory at the given times, with
/// summaries computed by the geometry module.
Trajectory circle_trajectory(const CircleSolution& sol, const AngleGrid& grid, std::span<const double> times);

}  // namespace gcsf
