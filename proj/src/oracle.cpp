#include "gcsf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gcsf {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len2 = ex * ex + ey * ey;
    double s = len2 > 0.0 ? ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::hypot(p.x - (a.x + s * ex), p.y - (a.y + s * ey));
}

bool inside(std::span<const Vec2> poly, Vec2 p) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cross(poly[i], poly[(i + 1) % n], p) < 0.0) return false;
    }
    return true;
}

double distance_to_polygon(std::span<const Vec2> poly, Vec2 p) {
    if (inside(poly, p)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        best = std::min(best, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    }
    return best;
}

void require_convex(std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    if (n < 64 || n > 8192) throw std::invalid_argument("polygon must have 64 to 8192 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) > 0.0)) {
            throw std::invalid_argument("polygon is not strictly convex and counterclockwise at vertex " +
                                        std::to_string((i + 1) % n));
        }
    }
}

/// Optimises f over a square by repeatedly scanning a grid and zooming in on
/// the best cell. f must be unimodal (concave for maximisation).
Vec2 zoom_search(const std::function<double(Vec2)>& f, Vec2 centre, double half_width, bool maximise) {
    constexpr int cells = 20;
    const double stop = 1e-13 * half_width;
    while (half_width > stop) {
        Vec2 best = centre;
        double best_val = maximise ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        for (int i = 0; i <= cells; ++i) {
            for (int j = 0; j <= cells; ++j) {
                const Vec2 c{centre.x - half_width + 2.0 * half_width * i / cells,
                             centre.y - half_width + 2.0 * half_width * j / cells};
                const double v = f(c);
                if (maximise ? v > best_val : v < best_val) {
                    best_val = v;
                    best = c;
                }
            }
        }
        centre = best;
        half_width *= 2.0 * 2.0 / cells;
    }
    return centre;
}

}  // namespace

CircleSolution::CircleSolution(double r0, double exponent) : R0(r0), p(exponent) {
    if (!(R0 > 0.0) || !(p > 0.0)) throw std::invalid_argument("circle solution needs R0 > 0 and p > 0");
}

double CircleSolution::omega() const { return std::pow(R0, p + 1.0) / (p + 1.0); }

CircleState circle_state(const CircleSolution& sol, double t) {
    if (!(t >= 0.0) || !(t < sol.omega())) throw std::invalid_argument("t must lie in [0, omega)");
    CircleState s;
    s.R = std::pow(std::pow(sol.R0, sol.p + 1.0) - (sol.p + 1.0) * t, 1.0 / (sol.p + 1.0));
    s.k = 1.0 / s.R;
    s.L = 2.0 * kPi * s.R;
    s.A = kPi * s.R * s.R;
    return s;
}

CurvatureProfile circle_profile(double R, const AngleGrid& grid, double t) {
    if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
    return CurvatureProfile(grid, std::vector<double>(grid.size(), 1.0 / R), t);
}

SupportProfile ellipse_support(double a, double b, const AngleGrid& grid) {
    if (!(a >= b && b > 0.0)) throw std::invalid_argument("ellipse needs a >= b > 0");
    std::vector<double> h(grid.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        const double c = std::cos(grid.theta(j)), s = std::sin(grid.theta(j));
        h[j] = std::sqrt(a * a * c * c + b * b * s * s);
    }
    return SupportProfile(grid, std::move(h));
}

CurvatureProfile ellipse_profile(double a, double b, const AngleGrid& grid) {
    if (!(a >= b && b > 0.0)) throw std::invalid_argument("ellipse needs a >= b > 0");
    std::vector<double> k(grid.size());
    for (std::size_t j = 0; j < k.size(); ++j) {
        const double c = std::cos(grid.theta(j)), s = std::sin(grid.theta(j));
        const double q = a * a * c * c + b * b * s * s;
        k[j] = q * std::sqrt(q) / (a * a * b * b);
    }
    return CurvatureProfile(grid, std::move(k));
}

double polygon_hausdorff(std::span<const Vec2> a, std::span<const Vec2> b) {
    // Distance to a convex set is convex, so its sup over a polygon sits at a vertex.
    double worst = 0.0;
    for (const Vec2& p : a) worst = std::max(worst, distance_to_polygon(b, p));
    for (const Vec2& p : b) worst = std::max(worst, distance_to_polygon(a, p));
    return worst;
}

PolygonMeasures polygon_brute_force(std::span<const Vec2> pts) {
    require_convex(pts);
    const std::size_t n = pts.size();
    PolygonMeasures m;

    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[(i + 1) % n];
        m.L += dist(p, q);
        twice_area += p.x * q.y - q.x * p.y;
    }
    m.A = 0.5 * twice_area;

    Vec2 lo = pts[0], hi = pts[0];
    for (const Vec2& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const Vec2 box_centre{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
    const double half = 0.5 * std::max(hi.x - lo.x, hi.y - lo.y);

    auto farthest = [&](Vec2 c) {
        double r = 0.0;
        for (const Vec2& p : pts) r = std::max(r, dist(p, c));
        return r;
    };
    // Signed distance to each edge line; positive inside. The minimum over
    // edges is the distance to the boundary for interior points.
    auto clearance = [&](Vec2 c) {
        double r = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& p = pts[i];
            const Vec2& q = pts[(i + 1) % n];
            r = std::min(r, cross(p, q, c) / dist(p, q));
        }
        return r;
    };
    m.r_out = farthest(zoom_search(farthest, box_centre, half, false));
    m.r_in = clearance(zoom_search(clearance, box_centre, half, true));

    // Steiner point of a polygon: vertices weighted by their exterior angles.
    Vec2 s;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& prev = pts[(i + n - 1) % n];
        const Vec2& cur = pts[i];
        const Vec2& next = pts[(i + 1) % n];
        const double a_in = std::atan2(cur.y - prev.y, cur.x - prev.x);
        const double a_out = std::atan2(next.y - cur.y, next.x - cur.x);
        double turn = a_out - a_in;
        while (turn < 0.0) turn += 2.0 * kPi;
        while (turn >= 2.0 * kPi) turn -= 2.0 * kPi;
        s.x += turn * cur.x;
        s.y += turn * cur.y;
    }
    s = {s.x / (2.0 * kPi), s.y / (2.0 * kPi)};

    std::vector<Vec2> centred(pts.begin(), pts.end());
    for (Vec2& p : centred) p = {p.x - s.x, p.y - s.y};
    // Sup over the disk of the distance to the polygon sits on the circle.
    constexpr std::size_t circle_samples = 4096;
    double worst = 0.0;
    for (const Vec2& p : centred) worst = std::max(worst, std::max(0.0, std::hypot(p.x, p.y) - 1.0));
    for (std::size_t i = 0; i < circle_samples; ++i) {
        const double a = 2.0 * kPi * static_cast<double>(i) / circle_samples;
        worst = std::max(worst, distance_to_polygon(centred, {std::cos(a), std::sin(a)}));
    }
    m.hausdorff = worst;
    return m;
}

Trajectory circle_trajectory(const CircleSolution& sol, const AngleGrid& grid, std::span<const double> times) {
    Trajectory traj;
    traj.law_label = "power p=" + std::to_string(sol.p);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const CircleState st = circle_state(sol, times[i]);
        CurvatureProfile kp = circle_profile(st.R, grid, times[i]);
        SupportProfile sp(grid, std::vector<double>(grid.size(), st.R), times[i]);
        GeometrySummary summary = summarize(kp, sp);
        traj.snapshots.push_back(Snapshot{i, std::move(kp), std::move(sp), summary, std::nullopt});
    }
    traj.stop_reason = StopReason::area_floor;
    traj.stop_detail = "analytic";
    if (!traj.snapshots.empty()) {
        const double t_last = traj.final().t();
        traj.omega = BlowUpEstimate{t_last, sol.omega(), sol.omega(), sol.omega(), "exact"};
        traj.asymptotic = traj.final().summary.k_max >= 10.0 * traj.initial().summary.k_max;
    }
    return traj;
}

}  // namespace gcsf
