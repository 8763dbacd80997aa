#pragma once

#include "gcsf/geometry.hpp"
#include "gcsf/speed_law.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gcsf {

enum class Formulation { curvature, support, both };
enum class StopReason { area_floor, curvature_cap, step_limit, convexity_loss };

std::string to_string(Formulation f);
std::string to_string(StopReason r);
Formulation parse_formulation(const std::string& s);

/// Step-size and stopping controls shared by single runs and containment runs.
struct RunControl {
    /// Fraction of the explicit stability bound used per step. RK4 is stable
    /// for c_cfl up to about 0.56 with the Fourier operator.
    double c_cfl = 0.4;
    /// Stop once A <= area_fraction * A(0).
    double area_fraction = 1e-3;
    /// Stop once k_max >= k_cap. Defaults to 1e6 k_max(0).
    std::optional<double> k_cap;
    std::uint64_t max_steps = 100'000'000;
    /// Snapshot every this many accepted steps (0: off).
    std::uint64_t snapshot_every = 0;
    /// Snapshot whenever A has fallen by this factor since the last snapshot
    /// (0: off). Gives snapshots evenly spaced in log(omega - t).
    double snapshot_area_ratio = 0.98;
    SpatialScheme scheme = SpatialScheme::fourier;
    bool dealias = false;
};

struct FlowConfig {
    FlowConfig(SpeedLaw law, std::variant<CurvatureProfile, SupportProfile> initial);

    SpeedLaw law;
    std::variant<CurvatureProfile, SupportProfile> initial;
    RunControl control;
    Formulation formulation = Formulation::curvature;
    /// When set, run() refuses laws failing (H1)/(H2) on [k_min(0)/2, k_cap].
    bool require_hypotheses = true;
};

struct BlowUpEstimate {
    double t_ref = 0.0;  // time the bracket was computed at
    double omega_lo = 0.0;
    double omega_mid = 0.0;
    double omega_hi = 0.0;
    std::string method;  // "closed-form" or "quadrature"

    double width() const { return omega_hi - omega_lo; }
};

struct Snapshot {
    std::uint64_t step = 0;
    CurvatureProfile curvature;
    SupportProfile support;
    GeometrySummary summary;
    /// Sup-norm curvature difference between the two formulations (both only).
    std::optional<double> formulation_gap;

    double t() const { return curvature.t; }
};

struct StepStats {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    double dt_min = 0.0;
    double dt_max = 0.0;
};

struct Trajectory {
    std::string law_label;
    Formulation formulation = Formulation::curvature;
    std::vector<Snapshot> snapshots;
    StopReason stop_reason = StopReason::step_limit;
    std::string stop_detail;
    std::optional<BlowUpEstimate> omega;
    /// k_max at the last snapshot reached 10 k_max(0).
    bool asymptotic = false;
    StepStats stats;
    std::optional<double> max_formulation_gap;

    const Snapshot& initial() const { return snapshots.front(); }
    const Snapshot& final() const { return snapshots.back(); }
};

/// dk/dt = k^2 (Phi(k)'' + Phi(k)) on the grid.
std::vector<double> rhs_curvature(const CurvatureProfile& kp, const SpeedLaw& law,
                                  SpatialScheme scheme = SpatialScheme::fourier, bool dealias = false);

/// dh/dt = -Phi(1 / (h'' + h)). Throws ConvexityLossError on h'' + h <= 0.
std::vector<double> rhs_support(const SupportProfile& sp, const SpeedLaw& law,
                                SpatialScheme scheme = SpatialScheme::fourier);

/// dt = c_cfl dtheta^2 / (2 max(k^2 Phi'(k)) d_scheme).
double stable_dt(const CurvatureProfile& kp, const SpeedLaw& law, double c_cfl,
                 SpatialScheme scheme = SpatialScheme::fourier);

/// One classical RK4 step. Returns nullopt (input untouched) when any stage
/// leaves the convex cone: k <= 0, h'' + h <= 0, or a non-finite value.
std::optional<CurvatureProfile> step(const CurvatureProfile& kp, const SpeedLaw& law, double dt,
                                     SpatialScheme scheme = SpatialScheme::fourier, bool dealias = false);
std::optional<SupportProfile> step(const SupportProfile& sp, const SpeedLaw& law, double dt,
                                   SpatialScheme scheme = SpatialScheme::fourier);

/// Integrates until a stop criterion fires. Loss of convexity ends the run
/// with StopReason::convexity_loss rather than an exception. Throws
/// HypothesisError when require_hypotheses is set and the law fails the check.
Trajectory run(const FlowConfig& config);

/// Bracket for omega from the state at time t:
///   omega_lo = t + tail(k_max),  omega_hi = t + tail(k_min),
/// where tail(k) is the integral of 1/(G(x) x^3) over [k, inf).
BlowUpEstimate bracket_blowup(double t, double k_min, double k_max, const SpeedLaw& law);

/// Bracket at the final snapshot. Requires k_max to have grown tenfold.
BlowUpEstimate estimate_blowup(const Trajectory& traj, const SpeedLaw& law);

struct ContainmentResult {
    std::vector<double> times;
    std::vector<double> min_gap;  // min over theta of h_outer - h_inner
    double tolerance = 0.0;       // 1e-8 L_outer(0)
    bool contained = true;        // min_gap >= -tolerance throughout
    StopReason stop_reason = StopReason::step_limit;
    std::string stopped_by;  // "inner" or "outer"
};

/// Co-evolves two support profiles with a shared step size and tracks the
/// pointwise ordering of their support functions. Requires
/// h_outer >= h_inner at t = 0 in the common coordinates.
ContainmentResult containment_run(const SupportProfile& outer, const SupportProfile& inner, const SpeedLaw& law,
                                  const RunControl& control = {});

}  // namespace gcsf
