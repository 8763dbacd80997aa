#include "gcsf/diagnostics.hpp"

#include "gcsf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gcsf {

namespace {

constexpr double kPi = std::numbers::pi;

void require_snapshots(const Trajectory& traj, std::size_t count, const char* name) {
    if (traj.snapshots.size() < count) {
        throw std::invalid_argument(std::string(name) + ": insufficient data (need " + std::to_string(count) +
                                    " snapshots)");
    }
}

// Sets worst margin, first violation and status from per-point margins.
void settle(MonitorReport& r, const std::vector<double>& times, const std::vector<double>& margins) {
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < margins.size(); ++i) {
        r.worst_margin = std::min(r.worst_margin, margins[i]);
        if (margins[i] < -r.tolerance && !r.first_violation_time) r.first_violation_time = times[i];
    }
    if (margins.empty()) r.worst_margin = 0.0;
    r.status = r.worst_margin >= -r.tolerance ? MonitorStatus::pass : MonitorStatus::fail;
}

bool reached_late_regime(const Trajectory& traj) {
    return traj.final().summary.A <= 0.01 * traj.initial().summary.A;
}

void mark_inconclusive(MonitorReport& r, const std::string& why) {
    r.status = MonitorStatus::inconclusive;
    r.note = why;
}

}  // namespace

std::string to_string(MonitorStatus s) {
    switch (s) {
        case MonitorStatus::pass:
            return "pass";
        case MonitorStatus::fail:
            return "fail";
        case MonitorStatus::inconclusive:
            return "inconclusive";
    }
    return "inconclusive";
}

bool roundness_applicable(const SpeedLaw& law) {
    const auto p = law.power_exponent();
    return !p || *p >= 1.0;
}

MonitorReport monitor_iso_ratio(const Trajectory& traj) {
    require_snapshots(traj, 2, "iso_ratio");
    MonitorReport r;
    r.name = "iso_ratio_monotone";
    std::vector<double> margins, mt;
    double scale = 0.0;
    for (const auto& s : traj.snapshots) {
        r.times.push_back(s.t());
        r.values.push_back(s.summary.iso_ratio);
        scale = std::max(scale, s.summary.iso_ratio);
    }
    for (std::size_t i = 1; i < r.values.size(); ++i) {
        margins.push_back(r.values[i - 1] - r.values[i]);
        mt.push_back(r.times[i]);
    }
    r.tolerance = 1e-8 * scale;
    settle(r, mt, margins);
    r.details["final"] = r.values.back();
    r.details["final_over_4pi"] = r.values.back() / (4.0 * kPi);
    return r;
}

MonitorReport monitor_iso_limit(const Trajectory& traj, const SpeedLaw& law) {
    require_snapshots(traj, 1, "iso_limit");
    MonitorReport r;
    r.name = "iso_ratio_limit";
    r.asserted = roundness_applicable(law);
    r.tolerance = 0.0;
    const auto& last = traj.final().summary;
    const double rel = last.iso_ratio / (4.0 * kPi) - 1.0;
    r.times = {last.t};
    r.values = {rel};
    settle(r, r.times, {0.01 - std::abs(rel)});
    if (!reached_late_regime(traj)) mark_inconclusive(r, "run stopped before A <= 0.01 A(0)");
    return r;
}

MonitorReport monitor_bonnesen(const Trajectory& traj) {
    require_snapshots(traj, 1, "bonnesen");
    MonitorReport r;
    r.name = "bonnesen";
    double scale = 0.0;
    for (const auto& s : traj.snapshots) {
        r.times.push_back(s.t());
        r.values.push_back(s.summary.bonnesen_gap);
        scale = std::max(scale, s.summary.iso_ratio);
    }
    r.tolerance = 1e-7 * scale;
    settle(r, r.times, r.values);
    return r;
}

MonitorReport monitor_gage(const Trajectory& traj) {
    require_snapshots(traj, 1, "gage");
    MonitorReport r;
    r.name = "gage_deficit";
    r.tolerance = 1e-9;
    std::vector<double> margins;
    for (const auto& s : traj.snapshots) {
        const double F = s.summary.gage_deficit;
        r.times.push_back(s.t());
        r.values.push_back(F);
        margins.push_back(std::min(F, 1.0 - F));
    }
    settle(r, r.times, margins);
    r.details["initial"] = r.values.front();
    r.details["final"] = r.values.back();
    return r;
}

MonitorReport monitor_energy_deficit(const Trajectory& traj) {
    require_snapshots(traj, 2, "energy_deficit");
    MonitorReport r;
    r.name = "energy_deficit_liminf";
    r.asserted = false;
    for (const auto& s : traj.snapshots) {
        const auto& g = s.summary;
        r.times.push_back(s.t());
        r.values.push_back(g.L * (g.total_curvature_sq - kPi * g.L / g.A));
    }
    const std::size_t late = r.values.size() - std::max<std::size_t>(1, r.values.size() / 4);
    const double late_min = *std::min_element(r.values.begin() + static_cast<std::ptrdiff_t>(late), r.values.end());
    r.details["initial"] = r.values.front();
    r.details["late_min"] = late_min;
    r.worst_margin = r.values.front() - late_min;
    r.tolerance = 1e-9 * std::max(1.0, std::abs(r.values.front()));
    r.status = r.worst_margin >= -r.tolerance ? MonitorStatus::pass : MonitorStatus::inconclusive;
    if (r.status == MonitorStatus::inconclusive) r.note = "late values have not fallen below the initial value";
    return r;
}

MonitorReport monitor_gradient_estimate(const Trajectory& traj, const SpeedLaw& law) {
    require_snapshots(traj, 1, "gradient_estimate");
    MonitorReport r;
    r.name = "gradient_estimate";
    r.tolerance = 1e-6;
    const std::size_t n = traj.initial().curvature.k.size();
    auto& ops = periodic_ops(n);
    std::vector<double> phi(n), dphi(n), margins;
    double running_phi_sq = 0.0;
    double initial_bound = 0.0;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const auto& s = traj.snapshots[i];
        law.phi_into(s.curvature.k, phi);
        ops.first_derivative(phi, dphi);
        double lhs = 0.0, phi_sq = 0.0, both = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            lhs = std::max(lhs, dphi[j] * dphi[j]);
            phi_sq = std::max(phi_sq, phi[j] * phi[j]);
            both = std::max(both, dphi[j] * dphi[j] + 2.0 * phi[j] * phi[j]);
        }
        if (i == 0) initial_bound = both;
        running_phi_sq = std::max(running_phi_sq, phi_sq);
        const double rhs = std::max(2.0 * running_phi_sq, initial_bound);
        r.times.push_back(s.t());
        r.values.push_back(lhs / rhs);
        margins.push_back(1.0 - lhs / rhs);
    }
    settle(r, r.times, margins);
    return r;
}

MonitorReport monitor_ratio_asymptotics(const Trajectory& traj, const SpeedLaw& law) {
    require_snapshots(traj, 1, "ratio_asymptotics");
    MonitorReport r;
    r.name = "ratio_asymptotics";
    r.asserted = roundness_applicable(law);
    for (const auto& s : traj.snapshots) {
        r.times.push_back(s.t());
        r.values.push_back(s.summary.k_min / s.summary.k_max);
    }
    const auto& last = traj.final().summary;
    const double kr = last.k_min / last.k_max;
    const double rr = last.r_in / last.r_out;
    r.details["k_ratio_final"] = kr;
    r.details["r_ratio_final"] = rr;
    r.tolerance = 0.0;
    settle(r, {last.t}, {std::min(kr, rr) - 0.95});
    if (!reached_late_regime(traj)) mark_inconclusive(r, "run stopped before A <= 0.01 A(0)");
    return r;
}

MonitorReport monitor_blowup_integral(const Trajectory& traj, const SpeedLaw& law) {
    require_snapshots(traj, 1, "blowup_integral");
    MonitorReport r;
    r.name = "blowup_integral";
    r.asserted = roundness_applicable(law);
    r.tolerance = 0.0;
    if (!traj.omega) {
        mark_inconclusive(r, "no omega bracket");
        return r;
    }
    const BlowUpEstimate& om = *traj.omega;
    auto deviation = [&](const Snapshot& s, double omega) {
        double worst = 0.0;
        for (double k : s.curvature.k) {
            worst = std::max(worst, std::abs(law.tail_integral(k) / (omega - s.t()) - 1.0));
        }
        return worst;
    };
    for (const auto& s : traj.snapshots) {
        if (!(om.omega_mid > s.t())) continue;
        r.times.push_back(s.t());
        r.values.push_back(deviation(s, om.omega_mid));
    }
    const Snapshot& last = traj.final();
    const double remaining = om.omega_mid - last.t();
    if (!(remaining > 0.0)) {
        mark_inconclusive(r, "omega estimate does not exceed the final time");
        return r;
    }
    const double dev = deviation(last, om.omega_mid);
    r.details["max_dev_mid"] = dev;
    r.details["max_dev_lo"] = om.omega_lo > last.t() ? deviation(last, om.omega_lo)
                                                     : std::numeric_limits<double>::infinity();
    r.details["max_dev_hi"] = deviation(last, om.omega_hi);
    r.details["bracket_width_over_remaining"] = om.width() / remaining;
    settle(r, {last.t()}, {0.05 - dev});
    if (!traj.asymptotic) {
        mark_inconclusive(r, "k_max has not grown tenfold");
    } else if (om.width() > 0.1 * remaining) {
        mark_inconclusive(r, "omega bracket wider than 0.1 (omega - t)");
    }
    return r;
}

MonitorReport monitor_evolution_identities(const Trajectory& traj, const SpeedLaw& law) {
    require_snapshots(traj, 3, "evolution_identities");
    MonitorReport r;
    r.name = "evolution_identities";
    r.tolerance = 0.0;
    const auto& snaps = traj.snapshots;
    std::vector<double> margins, scratch(snaps.front().curvature.k.size());
    double worst_L = 0.0, worst_A = 0.0;
    for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
        const double t0 = snaps[i - 1].t(), t1 = snaps[i].t(), t2 = snaps[i + 1].t();
        const double h1 = t1 - t0, h2 = t2 - t1;
        // Three-point derivative at t1 on a nonuniform stencil.
        auto ddt = [&](double f0, double f1, double f2) {
            return -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 + h1 / (h2 * (h1 + h2)) * f2;
        };
        const double dL = ddt(snaps[i - 1].summary.L, snaps[i].summary.L, snaps[i + 1].summary.L);
        const double dA = ddt(snaps[i - 1].summary.A, snaps[i].summary.A, snaps[i + 1].summary.A);
        const auto& k = snaps[i].curvature.k;
        law.phi_into(k, scratch);
        const double rate_L = -periodic_integral(scratch);
        for (std::size_t j = 0; j < k.size(); ++j) scratch[j] = law.g(k[j]);
        const double rate_A = -periodic_integral(scratch);
        const double err_L = std::abs(dL - rate_L) / std::abs(rate_L);
        const double err_A = std::abs(dA - rate_A) / std::abs(rate_A);
        worst_L = std::max(worst_L, err_L);
        worst_A = std::max(worst_A, err_A);
        r.times.push_back(t1);
        r.values.push_back(std::max(err_L, err_A));
        margins.push_back(0.01 - std::max(err_L, err_A));
    }
    settle(r, r.times, margins);
    r.details["worst_dLdt"] = worst_L;
    r.details["worst_dAdt"] = worst_A;
    return r;
}

MonitorReport monitor_kmin_monotone(const Trajectory& traj) {
    require_snapshots(traj, 2, "kmin_monotone");
    MonitorReport r;
    r.name = "kmin_monotone";
    r.tolerance = 1e-10;
    std::vector<double> margins, mt;
    for (const auto& s : traj.snapshots) {
        r.times.push_back(s.t());
        r.values.push_back(s.summary.k_min);
    }
    for (std::size_t i = 1; i < r.values.size(); ++i) {
        margins.push_back((r.values[i] - r.values[i - 1]) / r.values[i - 1]);
        mt.push_back(r.times[i]);
    }
    settle(r, mt, margins);
    return r;
}

MonitorReport monitor_closure_drift(const Trajectory& traj) {
    require_snapshots(traj, 1, "closure_drift");
    MonitorReport r;
    r.name = "closure_drift";
    r.tolerance = 0.0;
    std::vector<double> margins;
    for (const auto& s : traj.snapshots) {
        const double rel = s.summary.closure_residual / s.summary.L;
        r.times.push_back(s.t());
        r.values.push_back(rel);
        margins.push_back(1e-6 - rel);
    }
    settle(r, r.times, margins);
    return r;
}

MonitorReport monitor_k_rin(const Trajectory& traj, const SpeedLaw& law) {
    require_snapshots(traj, 1, "k_rin");
    MonitorReport r;
    r.name = "k_times_r_in";
    r.asserted = roundness_applicable(law);
    r.tolerance = 0.0;
    for (const auto& s : traj.snapshots) {
        double worst = 0.0;
        for (double k : s.curvature.k) worst = std::max(worst, std::abs(k * s.summary.r_in - 1.0));
        r.times.push_back(s.t());
        r.values.push_back(worst);
    }
    settle(r, {r.times.back()}, {0.05 - r.values.back()});
    if (!reached_late_regime(traj)) mark_inconclusive(r, "run stopped before A <= 0.01 A(0)");
    return r;
}

MonitorReport monitor_hausdorff(const Trajectory& traj, const SpeedLaw& law) {
    require_snapshots(traj, 1, "hausdorff");
    MonitorReport r;
    r.name = "hausdorff_roundness";
    r.asserted = roundness_applicable(law);
    r.tolerance = 0.0;
    for (const auto& s : traj.snapshots) {
        r.times.push_back(s.t());
        r.values.push_back(s.summary.hausdorff);
    }
    settle(r, {r.times.back()}, {0.02 - r.values.back()});
    if (!reached_late_regime(traj)) mark_inconclusive(r, "run stopped before A <= 0.01 A(0)");
    return r;
}

MonitorReport monitor_formulation_gap(const Trajectory& traj) {
    require_snapshots(traj, 1, "formulation_gap");
    MonitorReport r;
    r.name = "formulation_gap";
    r.asserted = false;
    r.tolerance = 0.0;
    const double A0 = traj.initial().summary.A;
    std::vector<double> margins;
    for (const auto& s : traj.snapshots) {
        if (!s.formulation_gap || s.summary.A < 0.01 * A0) continue;
        r.times.push_back(s.t());
        r.values.push_back(*s.formulation_gap);
        margins.push_back(1e-5 - *s.formulation_gap);
    }
    if (margins.empty()) {
        mark_inconclusive(r, "trajectory was not run in both formulations");
        return r;
    }
    settle(r, r.times, margins);
    return r;
}

std::vector<MonitorReport> run_all_monitors(const Trajectory& traj, const SpeedLaw& law) {
    std::vector<MonitorReport> out;
    auto guarded = [&](const char* name, auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            MonitorReport r;
            r.name = name;
            r.asserted = false;
            mark_inconclusive(r, e.what());
            out.push_back(std::move(r));
        }
    };
    guarded("iso_ratio_monotone", [&] { return monitor_iso_ratio(traj); });
    guarded("iso_ratio_limit", [&] { return monitor_iso_limit(traj, law); });
    guarded("bonnesen", [&] { return monitor_bonnesen(traj); });
    guarded("gage_deficit", [&] { return monitor_gage(traj); });
    guarded("energy_deficit_liminf", [&] { return monitor_energy_deficit(traj); });
    guarded("gradient_estimate", [&] { return monitor_gradient_estimate(traj, law); });
    guarded("ratio_asymptotics", [&] { return monitor_ratio_asymptotics(traj, law); });
    guarded("blowup_integral", [&] { return monitor_blowup_integral(traj, law); });
    guarded("evolution_identities", [&] { return monitor_evolution_identities(traj, law); });
    guarded("kmin_monotone", [&] { return monitor_kmin_monotone(traj); });
    guarded("closure_drift", [&] { return monitor_closure_drift(traj); });
    guarded("k_times_r_in", [&] { return monitor_k_rin(traj, law); });
    guarded("hausdorff_roundness", [&] { return monitor_hausdorff(traj, law); });
    if (traj.formulation == Formulation::both) {
        guarded("formulation_gap", [&] { return monitor_formulation_gap(traj); });
    }
    return out;
}

bool monitors_pass(const std::vector<MonitorReport>& reports) {
    return std::none_of(reports.begin(), reports.end(),
                        [](const MonitorReport& r) { return r.asserted && r.status == MonitorStatus::fail; });
}

std::string format_monitor_table(const std::vector<MonitorReport>& reports) {
    std::size_t width = 7;
    for (const auto& r : reports) width = std::max(width, r.name.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width) + 2) << "monitor" << std::setw(14) << "status"
       << std::setw(10) << "asserted" << std::setw(16) << "worst_margin"
       << "violation_t\n";
    for (const auto& r : reports) {
        std::ostringstream margin;
        margin << std::setprecision(6) << r.worst_margin;
        std::ostringstream when;
        if (r.first_violation_time) {
            when << std::setprecision(9) << *r.first_violation_time;
        } else {
            when << "-";
        }
        os << std::left << std::setw(static_cast<int>(width) + 2) << r.name << std::setw(14) << to_string(r.status)
           << std::setw(10) << (r.asserted ? "yes" : "no") << std::setw(16) << margin.str() << when.str() << "\n";
    }
    return os.str();
}

}  // namespace gcsf
