#pragma once

#include "gcsf/flow.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gcsf {

enum class MonitorStatus { pass, fail, inconclusive };

std::string to_string(MonitorStatus s);

/// Outcome of one monitor over a trajectory. Margins are signed, negative
/// meaning a violation; status is pass exactly when worst_margin >= -tolerance
/// (unless the monitor could not decide).
struct MonitorReport {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;
    double worst_margin = 0.0;
    double tolerance = 0.0;
    std::optional<double> first_violation_time;
    MonitorStatus status = MonitorStatus::pass;
    /// False for monitors that only inform (liminf trends) or whose claim does
    /// not apply to the law (roundness for p < 1).
    bool asserted = true;
    std::string note;
    std::map<std::string, double> details;

    bool pass() const { return status == MonitorStatus::pass; }
};

/// Roundness conclusions are asserted only for laws inside the hypotheses;
/// power laws with p < 1 are treated as demonstrations.
bool roundness_applicable(const SpeedLaw& law);

/// L^2/A non-increasing between snapshots, slack 1e-8 relative.
/// Throws std::invalid_argument with fewer than two snapshots.
MonitorReport monitor_iso_ratio(const Trajectory& traj);

/// L^2/A within 1% of 4 pi at the final snapshot, once A <= 0.01 A(0).
MonitorReport monitor_iso_limit(const Trajectory& traj, const SpeedLaw& law);

/// L^2/A - 4 pi - pi^2 (r_out - r_in)^2 / A >= -1e-7 L^2/A.
MonitorReport monitor_bonnesen(const Trajectory& traj);

/// F = 1 - (pi L / A) / integral k^2 ds lies in [0, 1).
MonitorReport monitor_gage(const Trajectory& traj);

/// L (integral k^2 ds - pi L / A) over late snapshots; informational.
MonitorReport monitor_energy_deficit(const Trajectory& traj);

/// max |dPhi/dtheta|^2 <= max(2 max_{s<=t} Phi^2, max_{t=0}(|dPhi/dtheta|^2 + 2 Phi^2)).
MonitorReport monitor_gradient_estimate(const Trajectory& traj, const SpeedLaw& law);

/// k_min/k_max and r_in/r_out both >= 0.95 at the final snapshot.
MonitorReport monitor_ratio_asymptotics(const Trajectory& traj, const SpeedLaw& law);

/// rho = tail(k) / (omega_mid - t) within 0.05 of 1 at the final snapshot.
MonitorReport monitor_blowup_integral(const Trajectory& traj, const SpeedLaw& law);

/// Finite-difference dL/dt and dA/dt against -integral G(k) k dtheta and
/// -integral G(k) dtheta, within 1% at interior snapshots.
MonitorReport monitor_evolution_identities(const Trajectory& traj, const SpeedLaw& law);

/// k_min non-decreasing, slack 1e-10 relative.
MonitorReport monitor_kmin_monotone(const Trajectory& traj);

/// Closure residual <= 1e-6 L at every snapshot.
MonitorReport monitor_closure_drift(const Trajectory& traj);

/// max |k r_in - 1| <= 0.05 at the final snapshot.
MonitorReport monitor_k_rin(const Trajectory& traj, const SpeedLaw& law);

/// Hausdorff distance of the normalized curve to the unit disk below 0.02.
MonitorReport monitor_hausdorff(const Trajectory& traj, const SpeedLaw& law);

/// Sup-norm gap between curvature-form and support-form runs while A >= 0.01 A(0).
MonitorReport monitor_formulation_gap(const Trajectory& traj);

/// Every applicable monitor. Monitors that cannot run on this trajectory are
/// returned as inconclusive.
std::vector<MonitorReport> run_all_monitors(const Trajectory& traj, const SpeedLaw& law);

/// True when no asserted monitor failed.
bool monitors_pass(const std::vector<MonitorReport>& reports);

/// Aligned plain-text table: monitor, status, worst margin, violation time.
std::string format_monitor_table(const std::vector<MonitorReport>& reports);

}  // namespace gcsf
