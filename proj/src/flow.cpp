#include "gcsf/flow.hpp"

#include "gcsf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gcsf {

namespace {

constexpr double kPi = std::numbers::pi;

bool all_positive(std::span<const double> v) {
    for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) return false;
    }
    return true;
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

double dt_from_diffusivity(double diffusivity, double dtheta, double c_cfl, SpatialScheme scheme) {
    return c_cfl * dtheta * dtheta / (2.0 * diffusivity * scheme_spectral_factor(scheme));
}

// Right-hand sides and RK4 stages with preallocated scratch for one grid size.
class Integrator {
public:
    Integrator(std::size_t n, const SpeedLaw& law, SpatialScheme scheme, bool dealias)
        : law_(law), scheme_(scheme), dealias_(dealias), ops_(periodic_ops(n)), phi_(n), tmp_(n), stage_(n),
          r1_(n), r2_(n), r3_(n), r4_(n) {}

    void rhs_curvature(std::span<const double> k, std::span<double> out) {
        law_.phi_into(k, phi_);
        ops_.shifted_operator(phi_, tmp_, scheme_, dealias_);
        for (std::size_t j = 0; j < k.size(); ++j) out[j] = k[j] * k[j] * tmp_[j];
    }

    void rhs_support(std::span<const double> h, std::span<double> out) {
        curvature_of_support(h, tmp_);
        law_.phi_into(tmp_, out);
        for (double& v : out) v = -v;
    }

    /// k = 1 / (h'' + h); throws ConvexityLossError on a non-positive radius.
    void curvature_of_support(std::span<const double> h, std::span<double> k) {
        ops_.shifted_operator(h, k, scheme_);
        for (std::size_t j = 0; j < k.size(); ++j) {
            if (!(k[j] > 0.0) || !std::isfinite(k[j])) {
                throw ConvexityLossError("h'' + h <= 0", j);
            }
            k[j] = 1.0 / k[j];
        }
    }

    /// Advances state in place; leaves it untouched and returns false when a
    /// stage leaves the admissible set.
    bool rk4(Formulation form, std::vector<double>& state, double dt) {
        const std::size_t n = state.size();
        auto rhs = [&](std::span<const double> x, std::span<double> out) {
            if (form == Formulation::support) {
                rhs_support(x, out);
            } else {
                if (!all_positive(x)) throw ConvexityLossError("k <= 0", 0);
                rhs_curvature(x, out);
            }
            if (!all_finite(out)) throw EvaluationError("non-finite right-hand side", 0.0);
        };
        try {
            rhs(state, r1_);
            for (std::size_t j = 0; j < n; ++j) stage_[j] = state[j] + 0.5 * dt * r1_[j];
            rhs(stage_, r2_);
            for (std::size_t j = 0; j < n; ++j) stage_[j] = state[j] + 0.5 * dt * r2_[j];
            rhs(stage_, r3_);
            for (std::size_t j = 0; j < n; ++j) stage_[j] = state[j] + dt * r3_[j];
            rhs(stage_, r4_);
            for (std::size_t j = 0; j < n; ++j) {
                stage_[j] = state[j] + dt / 6.0 * (r1_[j] + 2.0 * r2_[j] + 2.0 * r3_[j] + r4_[j]);
            }
            if (form == Formulation::support) {
                curvature_of_support(stage_, tmp_);
            } else if (!all_positive(stage_)) {
                return false;
            }
        } catch (const Error&) {
            return false;
        }
        state.swap(stage_);
        return true;
    }

    double diffusivity(Formulation form, std::span<const double> state) {
        if (form == Formulation::support) {
            curvature_of_support(state, tmp_);
            return law_.max_diffusivity(tmp_);
        }
        return law_.max_diffusivity(state);
    }

    /// Enclosed area from either state.
    double area(Formulation form, std::span<const double> state) {
        const std::size_t n = state.size();
        if (form == Formulation::support) {
            ops_.shifted_operator(state, tmp_, scheme_);
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) sum += state[j] * tmp_[j];
            return 0.5 * sum * 2.0 * kPi / static_cast<double>(n);
        }
        for (std::size_t j = 0; j < n; ++j) phi_[j] = 1.0 / state[j];
        ops_.solve_shifted(phi_, tmp_);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += tmp_[j] * phi_[j];
        return 0.5 * sum * 2.0 * kPi / static_cast<double>(n);
    }

    double k_max(Formulation form, std::span<const double> state) {
        if (form == Formulation::support) {
            curvature_of_support(state, tmp_);
            return *std::max_element(tmp_.begin(), tmp_.end());
        }
        return *std::max_element(state.begin(), state.end());
    }

private:
    const SpeedLaw& law_;
    SpatialScheme scheme_;
    bool dealias_;
    PeriodicOps& ops_;
    std::vector<double> phi_, tmp_, stage_, r1_, r2_, r3_, r4_;
};

void validate(const RunControl& c) {
    if (!(c.c_cfl > 0.0 && c.c_cfl <= 1.0)) throw std::invalid_argument("c_cfl must lie in (0, 1]");
    if (!(c.area_fraction > 0.0 && c.area_fraction < 1.0)) {
        throw std::invalid_argument("area fraction must lie in (0, 1)");
    }
    if (!(c.snapshot_area_ratio >= 0.0 && c.snapshot_area_ratio < 1.0)) {
        throw std::invalid_argument("snapshot area ratio must lie in [0, 1)");
    }
    if (c.max_steps == 0) throw std::invalid_argument("max_steps must be positive");
}

double sup_difference(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    return worst;
}

}  // namespace

std::string to_string(Formulation f) {
    switch (f) {
        case Formulation::curvature:
            return "curvature";
        case Formulation::support:
            return "support";
        case Formulation::both:
            return "both";
    }
    return "curvature";
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::area_floor:
            return "area-floor";
        case StopReason::curvature_cap:
            return "curvature-cap";
        case StopReason::step_limit:
            return "step-limit";
        case StopReason::convexity_loss:
            return "convexity-loss";
    }
    return "step-limit";
}

Formulation parse_formulation(const std::string& s) {
    if (s == "curvature") return Formulation::curvature;
    if (s == "support") return Formulation::support;
    if (s == "both") return Formulation::both;
    throw std::invalid_argument("unknown formulation '" + s + "' (expected curvature, support or both)");
}

FlowConfig::FlowConfig(SpeedLaw l, std::variant<CurvatureProfile, SupportProfile> init)
    : law(std::move(l)), initial(std::move(init)) {}

std::vector<double> rhs_curvature(const CurvatureProfile& kp, const SpeedLaw& law, SpatialScheme scheme,
                                  bool dealias) {
    Integrator integ(kp.k.size(), law, scheme, dealias);
    std::vector<double> out(kp.k.size());
    integ.rhs_curvature(kp.k, out);
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (!std::isfinite(out[j])) throw EvaluationError("non-finite curvature rate", kp.k[j]);
    }
    return out;
}

std::vector<double> rhs_support(const SupportProfile& sp, const SpeedLaw& law, SpatialScheme scheme) {
    Integrator integ(sp.h.size(), law, scheme, false);
    std::vector<double> out(sp.h.size());
    integ.rhs_support(sp.h, out);
    return out;
}

double stable_dt(const CurvatureProfile& kp, const SpeedLaw& law, double c_cfl, SpatialScheme scheme) {
    return dt_from_diffusivity(law.max_diffusivity(kp.k), kp.grid.spacing(), c_cfl, scheme);
}

std::optional<CurvatureProfile> step(const CurvatureProfile& kp, const SpeedLaw& law, double dt,
                                     SpatialScheme scheme, bool dealias) {
    Integrator integ(kp.k.size(), law, scheme, dealias);
    std::vector<double> state = kp.k;
    if (!integ.rk4(Formulation::curvature, state, dt)) return std::nullopt;
    return CurvatureProfile(kp.grid, std::move(state), kp.t + dt);
}

std::optional<SupportProfile> step(const SupportProfile& sp, const SpeedLaw& law, double dt, SpatialScheme scheme) {
    Integrator integ(sp.h.size(), law, scheme, false);
    std::vector<double> state = sp.h;
    if (!integ.rk4(Formulation::support, state, dt)) return std::nullopt;
    try {
        return SupportProfile(sp.grid, std::move(state), sp.t + dt);
    } catch (const ConvexityLossError&) {
        // The scheme's operator accepted the state but the Fourier check did not.
        return std::nullopt;
    }
}

BlowUpEstimate bracket_blowup(double t, double k_min, double k_max, const SpeedLaw& law) {
    if (!(k_min > 0.0) || !(k_max >= k_min)) {
        throw std::invalid_argument("bracket_blowup needs 0 < k_min <= k_max");
    }
    BlowUpEstimate est;
    est.t_ref = t;
    est.omega_lo = t + law.tail_integral(k_max);
    est.omega_hi = t + law.tail_integral(k_min);
    est.omega_mid = 0.5 * (est.omega_lo + est.omega_hi);
    est.method = law.has_closed_form_tail() ? "closed-form" : "quadrature";
    return est;
}

BlowUpEstimate estimate_blowup(const Trajectory& traj, const SpeedLaw& law) {
    if (traj.snapshots.empty()) throw std::invalid_argument("empty trajectory");
    const auto& first = traj.initial().summary;
    const auto& last = traj.final().summary;
    if (last.k_max < 10.0 * first.k_max) {
        throw std::invalid_argument("trajectory has not reached the asymptotic regime (k_max < 10 k_max(0))");
    }
    return bracket_blowup(last.t, last.k_min, last.k_max, law);
}

Trajectory run(const FlowConfig& cfg) {
    const RunControl& ctl = cfg.control;
    validate(ctl);
    const SpeedLaw& law = cfg.law;

    const bool from_curvature = std::holds_alternative<CurvatureProfile>(cfg.initial);
    const CurvatureProfile k0 = from_curvature ? std::get<CurvatureProfile>(cfg.initial)
                                               : k_from_support(std::get<SupportProfile>(cfg.initial), ctl.scheme);
    const SupportProfile h0 =
        from_curvature ? support_from_curvature(k0) : std::get<SupportProfile>(cfg.initial);
    const AngleGrid grid = k0.grid;
    const std::size_t n = grid.size();

    const double kmax0 = k0.k_max();
    const double k_cap = ctl.k_cap.value_or(1e6 * kmax0);
    if (!(k_cap > kmax0)) throw std::invalid_argument("k_cap must exceed the initial k_max");

    if (cfg.require_hypotheses) {
        const HypothesisReport rep = check_hypotheses(law, 0.5 * k0.k_min(), k_cap);
        if (!rep.all_ok()) {
            std::string which = !rep.h1_ok ? "(H1)" : (!rep.h2_convexity_ok ? "(H2) convexity" : "(H2) growth");
            throw HypothesisError("speed law " + law.label() + " fails " + which + " near x = " +
                                  std::to_string(rep.witness_abscissa.value_or(0.0)));
        }
    }

    Trajectory traj;
    traj.law_label = law.label();
    traj.formulation = cfg.formulation;

    const bool evolve_k = cfg.formulation != Formulation::support;
    const bool evolve_h = cfg.formulation != Formulation::curvature;
    const Formulation primary = evolve_k ? Formulation::curvature : Formulation::support;

    std::vector<double> kstate = k0.k;
    std::vector<double> hstate = h0.h;
    Integrator integ(n, law, ctl.scheme, ctl.dealias);
    auto primary_state = [&]() -> std::vector<double>& { return evolve_k ? kstate : hstate; };

    double t = 0.0;
    std::uint64_t steps = 0;

    auto record = [&](bool final_record) {
        if (!traj.snapshots.empty() && traj.snapshots.back().step == steps) return true;
        try {
            std::optional<CurvatureProfile> kp;
            std::optional<SupportProfile> sp;
            if (evolve_k) {
                kp.emplace(grid, kstate, t);
                sp.emplace(support_from_curvature_unchecked(*kp));
            } else {
                sp.emplace(grid, hstate, t);
                kp.emplace(k_from_support(*sp, ctl.scheme));
            }
            std::optional<double> gap;
            if (evolve_k && evolve_h) {
                const CurvatureProfile other = k_from_support(SupportProfile(grid, hstate, t), ctl.scheme);
                gap = sup_difference(kp->k, other.k);
                traj.max_formulation_gap = std::max(traj.max_formulation_gap.value_or(0.0), *gap);
            }
            GeometrySummary summary = summarize(*kp, *sp);
            traj.snapshots.push_back(Snapshot{steps, std::move(*kp), std::move(*sp), summary, gap});
            return true;
        } catch (const Error& e) {
            if (!final_record) {
                traj.stop_reason = StopReason::convexity_loss;
                traj.stop_detail = e.what();
            }
            return false;
        }
    };

    if (!record(false)) {
        throw ConvexityLossError("initial profile is not admissible: " + traj.stop_detail, 0);
    }
    const double A0 = traj.snapshots.front().summary.A;
    double A_last_snap = A0;

    const double t_scale = 1.0 / (kmax0 * kmax0 * law.g(kmax0));
    const double dt_floor = 1e-14 * t_scale;
    traj.stats.dt_min = std::numeric_limits<double>::infinity();

    bool stopped = false;
    while (!stopped) {
        if (steps >= ctl.max_steps) {
            traj.stop_reason = StopReason::step_limit;
            traj.stop_detail = "reached " + std::to_string(ctl.max_steps) + " steps";
            break;
        }
        double diff = 0.0;
        try {
            if (evolve_k) diff = std::max(diff, integ.diffusivity(Formulation::curvature, kstate));
            if (evolve_h) diff = std::max(diff, integ.diffusivity(Formulation::support, hstate));
        } catch (const Error& e) {
            traj.stop_reason = StopReason::convexity_loss;
            traj.stop_detail = e.what();
            break;
        }
        double dt = dt_from_diffusivity(diff, grid.spacing(), ctl.c_cfl, ctl.scheme);

        bool accepted = false;
        while (!accepted) {
            std::vector<double> k_try = kstate;
            std::vector<double> h_try = hstate;
            const bool ok_k = !evolve_k || integ.rk4(Formulation::curvature, k_try, dt);
            const bool ok_h = ok_k && (!evolve_h || integ.rk4(Formulation::support, h_try, dt));
            if (ok_k && ok_h) {
                kstate.swap(k_try);
                hstate.swap(h_try);
                accepted = true;
                break;
            }
            ++traj.stats.rejected;
            dt *= 0.5;
            if (dt < dt_floor) break;
        }
        if (!accepted) {
            traj.stop_reason = StopReason::convexity_loss;
            traj.stop_detail = "step rejected down to dt below 1e-14 t_scale at t = " + std::to_string(t);
            break;
        }

        t += dt;
        ++steps;
        ++traj.stats.accepted;
        traj.stats.dt_min = std::min(traj.stats.dt_min, dt);
        traj.stats.dt_max = std::max(traj.stats.dt_max, dt);

        double A = 0.0, kmax = 0.0;
        try {
            A = integ.area(primary, primary_state());
            kmax = integ.k_max(primary, primary_state());
        } catch (const Error& e) {
            traj.stop_reason = StopReason::convexity_loss;
            traj.stop_detail = e.what();
            break;
        }
        // Area floor is tested first so that it wins a tie.
        if (A <= ctl.area_fraction * A0) {
            traj.stop_reason = StopReason::area_floor;
            traj.stop_detail = "A fell below " + std::to_string(ctl.area_fraction) + " A(0)";
            stopped = true;
        } else if (kmax >= k_cap) {
            traj.stop_reason = StopReason::curvature_cap;
            traj.stop_detail = "k_max reached the cap " + std::to_string(k_cap);
            stopped = true;
        }

        const bool cadence = (ctl.snapshot_every > 0 && steps % ctl.snapshot_every == 0) ||
                             (ctl.snapshot_area_ratio > 0.0 && A <= ctl.snapshot_area_ratio * A_last_snap);
        if (stopped || cadence) {
            if (!record(false)) break;
            A_last_snap = A;
        }
    }
    record(true);
    if (traj.stats.accepted == 0) traj.stats.dt_min = 0.0;

    const auto& last = traj.final().summary;
    traj.asymptotic = last.k_max >= 10.0 * kmax0;
    try {
        traj.omega = bracket_blowup(last.t, last.k_min, last.k_max, law);
    } catch (const Error&) {
        traj.omega.reset();
    }
    return traj;
}

ContainmentResult containment_run(const SupportProfile& outer, const SupportProfile& inner, const SpeedLaw& law,
                                  const RunControl& ctl) {
    validate(ctl);
    if (!(outer.grid == inner.grid)) throw std::invalid_argument("containment pair must share a grid");
    const AngleGrid grid = outer.grid;
    const std::size_t n = grid.size();

    ContainmentResult res;
    res.tolerance = 1e-8 * length_of(k_from_support(outer, ctl.scheme));
    const double gap0 = [&] {
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) g = std::min(g, outer.h[j] - inner.h[j]);
        return g;
    }();
    if (gap0 < -res.tolerance) {
        throw std::invalid_argument("containment precondition fails: h_outer < h_inner at t = 0");
    }

    Integrator integ(n, law, ctl.scheme, false);
    std::vector<double> ho = outer.h, hi = inner.h;
    const double Ao0 = integ.area(Formulation::support, ho);
    const double Ai0 = integ.area(Formulation::support, hi);
    const double kmax0 = std::max(integ.k_max(Formulation::support, ho), integ.k_max(Formulation::support, hi));
    const double k_cap = ctl.k_cap.value_or(1e6 * kmax0);
    const double t_scale = 1.0 / (kmax0 * kmax0 * law.g(kmax0));

    double t = 0.0;
    std::uint64_t steps = 0, last_recorded = std::numeric_limits<std::uint64_t>::max();
    double Ai_last = Ai0, Ao_last = Ao0;
    auto record = [&] {
        if (last_recorded == steps) return;
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) g = std::min(g, ho[j] - hi[j]);
        res.times.push_back(t);
        res.min_gap.push_back(g);
        if (g < -res.tolerance) res.contained = false;
        last_recorded = steps;
    };
    record();

    while (true) {
        if (steps >= ctl.max_steps) {
            res.stop_reason = StopReason::step_limit;
            break;
        }
        double dt = 0.0;
        try {
            const double diff =
                std::max(integ.diffusivity(Formulation::support, ho), integ.diffusivity(Formulation::support, hi));
            dt = dt_from_diffusivity(diff, grid.spacing(), ctl.c_cfl, ctl.scheme);
        } catch (const Error&) {
            res.stop_reason = StopReason::convexity_loss;
            break;
        }
        bool accepted = false;
        while (dt >= 1e-14 * t_scale) {
            std::vector<double> o = ho, i = hi;
            if (integ.rk4(Formulation::support, o, dt) && integ.rk4(Formulation::support, i, dt)) {
                ho.swap(o);
                hi.swap(i);
                accepted = true;
                break;
            }
            dt *= 0.5;
        }
        if (!accepted) {
            res.stop_reason = StopReason::convexity_loss;
            break;
        }
        t += dt;
        ++steps;

        const double Ao = integ.area(Formulation::support, ho);
        const double Ai = integ.area(Formulation::support, hi);
        bool stop = false;
        if (Ai <= ctl.area_fraction * Ai0 || Ao <= ctl.area_fraction * Ao0) {
            res.stop_reason = StopReason::area_floor;
            res.stopped_by = Ai <= ctl.area_fraction * Ai0 ? "inner" : "outer";
            stop = true;
        } else {
            const double ki = integ.k_max(Formulation::support, hi);
            const double ko = integ.k_max(Formulation::support, ho);
            if (ki >= k_cap || ko >= k_cap) {
                res.stop_reason = StopReason::curvature_cap;
                res.stopped_by = ki >= k_cap ? "inner" : "outer";
                stop = true;
            }
        }
        const double r = ctl.snapshot_area_ratio;
        const bool cadence = (ctl.snapshot_every > 0 && steps % ctl.snapshot_every == 0) ||
                             (r > 0.0 && (Ai <= r * Ai_last || Ao <= r * Ao_last));
        if (cadence || stop) {
            record();
            Ai_last = Ai;
            Ao_last = Ao;
        }
        if (stop) break;
    }
    record();
    return res;
}

}  // namespace gcsf
