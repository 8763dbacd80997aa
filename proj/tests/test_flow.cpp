#include "gcsf/errors.hpp"
#include "gcsf/flow.hpp"
#include "gcsf/oracle.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gcsf;
using testing::pi;

TEST_CASE("curvature right-hand side") {
    const AngleGrid g(64);
    for (double R : {0.5, 1.0, 3.0}) {
        const auto r1 = rhs_curvature(circle_profile(R, g), power_law(1));
        for (double v : r1) CHECK(v == doctest::Approx(1.0 / (R * R * R)).epsilon(1e-14));
        for (double p : {1.0 / 3.0, 2.0, 3.0}) {
            const auto rp = rhs_curvature(circle_profile(R, g), power_law(p));
            for (double v : rp) CHECK(v == doctest::Approx(std::pow(R, -p - 2.0)).epsilon(1e-13));
        }
    }
    std::vector<double> k(64);
    for (std::size_t j = 0; j < 64; ++j) k[j] = 1.0 + 0.01 * std::cos(g.theta(j));
    const auto r = rhs_curvature(CurvatureProfile(g, k), power_law(1));
    for (std::size_t j = 0; j < 64; ++j) {
        const double expected = k[j] * k[j] * (-0.01 * std::cos(g.theta(j)) + k[j]);
        CHECK(std::abs(r[j] - expected) < 1e-12);
    }
}

TEST_CASE("support right-hand side") {
    const AngleGrid g(64);
    for (double R : {0.5, 2.0}) {
        for (double v : rhs_support(SupportProfile(g, std::vector<double>(64, R)), power_law(1))) {
            CHECK(v == doctest::Approx(-1.0 / R).epsilon(1e-14));
        }
        for (double v : rhs_support(SupportProfile(g, std::vector<double>(64, R)), power_law(2.5))) {
            CHECK(v == doctest::Approx(-std::pow(R, -2.5)).epsilon(1e-13));
        }
    }
    const AngleGrid g512(512);
    const SpeedLaw law = power_law(2);
    const SupportProfile e = ellipse_support(2.0, 1.0, g512);
    const auto dh = rhs_support(e, law);
    const CurvatureProfile k = k_from_support(e);
    for (std::size_t j = 0; j < 512; ++j) CHECK(std::abs(dh[j] + law.phi(k.k[j])) < 1e-12);
}

TEST_CASE("one RK4 step of a circle") {
    const AngleGrid g(64);
    const auto next = step(circle_profile(1.0, g), power_law(1), 1e-4);
    REQUIRE(next);
    const double exact = 1.0 / std::sqrt(1.0 - 2e-4);
    for (double v : next->k) CHECK(std::abs(v - exact) < 1e-15);
    CHECK(next->t == doctest::Approx(1e-4));

    const auto hnext = step(SupportProfile(g, std::vector<double>(64, 1.0)), power_law(1), 1e-4);
    REQUIRE(hnext);
    for (double v : hnext->h) CHECK(std::abs(v - std::sqrt(1.0 - 2e-4)) < 1e-15);
}

TEST_CASE("a step keeps the closure residual") {
    const AngleGrid g(256);
    const SpeedLaw law = power_law(1);
    const CurvatureProfile kp = ellipse_profile(2.0, 1.0, g);
    const double dt = stable_dt(kp, law, 0.4);
    const auto next = step(kp, law, dt);
    REQUIRE(next);
    const double before = closure_residual(kp).norm();
    const double after = closure_residual(*next).norm();
    CHECK(std::abs(after - before) <= 1e-12 * length_of(kp));
}

TEST_CASE("steps above the stability bound are rejected") {
    const AngleGrid g(128);
    const SpeedLaw law = power_law(1);
    const CurvatureProfile kp = ellipse_profile(3.0, 1.0, g);
    const std::vector<double> before = kp.k;
    const auto next = step(kp, law, 200.0 * stable_dt(kp, law, 1.0));
    CHECK_FALSE(next);
    CHECK(kp.k == before);
    const SupportProfile sp = ellipse_support(3.0, 1.0, g);
    CHECK_FALSE(step(sp, law, 200.0 * stable_dt(kp, law, 1.0)));
}

TEST_CASE("stable step size scaling") {
    const SpeedLaw p1 = power_law(1);
    const double dt256 = stable_dt(circle_profile(1.0, AngleGrid(256)), p1, 0.5);
    const double dt512 = stable_dt(circle_profile(1.0, AngleGrid(512)), p1, 0.5);
    CHECK(dt512 == doctest::Approx(dt256 / 4.0).epsilon(1e-14));
    const double dtg = 2.0 * pi / 256;
    CHECK(dt256 == doctest::Approx(0.5 * dtg * dtg / 2.0).epsilon(1e-14));

    const double dt_big = stable_dt(circle_profile(0.5, AngleGrid(256)), p1, 0.5);
    CHECK(dt_big == doctest::Approx(dt256 / 4.0).epsilon(1e-14));

    const SpeedLaw p3 = power_law(3);
    const double dt_p3 = stable_dt(circle_profile(0.5, AngleGrid(256)), p3, 0.5);
    CHECK(dt_p3 == doctest::Approx(dt256 / 48.0).epsilon(1e-14));

    const double dt_fd4 = stable_dt(circle_profile(1.0, AngleGrid(256)), p1, 0.5, SpatialScheme::fd4);
    CHECK(dt_fd4 == doctest::Approx(dt256 * 3.0 * pi * pi / 16.0).epsilon(1e-14));
}

TEST_CASE("blow-up bracket") {
    const SpeedLaw law = power_law(1);
    const double k = 1.0 / std::sqrt(0.2);
    const BlowUpEstimate b = bracket_blowup(0.4, k, k, law);
    CHECK(b.omega_lo == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(b.omega_hi == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(b.method == "closed-form");
    const BlowUpEstimate e = bracket_blowup(0.0, 0.25, 2.0, law);
    CHECK(e.omega_lo == doctest::Approx(0.125));
    CHECK(e.omega_hi == doctest::Approx(8.0));
    CHECK(e.omega_mid == doctest::Approx(0.5 * (0.125 + 8.0)));
    CHECK_THROWS_AS(bracket_blowup(0.0, 2.0, 1.0, law), std::invalid_argument);
}

TEST_CASE("circle run stops at the area floor near the exact time") {
    FlowConfig cfg(power_law(1), circle_profile(1.0, AngleGrid(64)));
    cfg.control.area_fraction = 0.01;
    const Trajectory traj = run(cfg);
    CHECK(traj.stop_reason == StopReason::area_floor);
    const double t_floor = (1.0 - 0.01) / 2.0;
    CHECK(traj.final().t() >= t_floor);
    CHECK(traj.final().t() < t_floor + 1e-4);
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
        CHECK(traj.snapshots[i].t() > traj.snapshots[i - 1].t());
    }
    CHECK(traj.stats.accepted > 0);
    CHECK(traj.stats.dt_min <= traj.stats.dt_max);
    CHECK(traj.snapshots.size() > 100);
    const BlowUpEstimate om = estimate_blowup(traj, cfg.law);
    CHECK(om.omega_lo == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("run refuses laws outside the hypotheses unless allowed") {
    FlowConfig cfg(power_law(1.0 / 3.0), circle_profile(1.0, AngleGrid(32)));
    CHECK_THROWS_AS(run(cfg), HypothesisError);
    cfg.require_hypotheses = false;
    cfg.control.area_fraction = 1e-3;
    const Trajectory traj = run(cfg);
    REQUIRE(traj.omega);
    CHECK(traj.final().t() < 0.75);
    // The bracket is exact for a circle; the slack covers time-stepping error.
    CHECK(traj.omega->omega_lo == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(traj.omega->omega_hi == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("ellipse keeps k_min non-decreasing") {
    FlowConfig cfg(power_law(1), ellipse_profile(2.0, 1.0, AngleGrid(128)));
    cfg.control.area_fraction = 0.05;
    const Trajectory traj = run(cfg);
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
        const double prev = traj.snapshots[i - 1].summary.k_min;
        CHECK(traj.snapshots[i].summary.k_min >= prev * (1.0 - 1e-10));
    }
}

TEST_CASE("stop criteria") {
    SUBCASE("curvature cap") {
        FlowConfig cfg(power_law(1), circle_profile(1.0, AngleGrid(32)));
        cfg.control.k_cap = 3.0;
        const Trajectory traj = run(cfg);
        CHECK(traj.stop_reason == StopReason::curvature_cap);
        CHECK(traj.final().summary.k_max >= 3.0);
        CHECK(traj.final().summary.A > 1e-3 * pi);
    }
    SUBCASE("step limit") {
        FlowConfig cfg(power_law(1), circle_profile(1.0, AngleGrid(32)));
        cfg.control.max_steps = 10;
        const Trajectory traj = run(cfg);
        CHECK(traj.stop_reason == StopReason::step_limit);
        CHECK(traj.stats.accepted == 10);
        CHECK(traj.final().step == 10);
    }
    SUBCASE("area floor wins a tie") {
        // A <= 0.01 pi and k >= 10 are the same condition for the unit circle.
        FlowConfig cfg(power_law(1), circle_profile(1.0, AngleGrid(32)));
        cfg.control.area_fraction = 0.01;
        cfg.control.k_cap = 10.0;
        const Trajectory traj = run(cfg);
        CHECK(traj.stop_reason == StopReason::area_floor);
        CHECK(traj.final().summary.k_max >= 10.0);
    }
    SUBCASE("snapshot cadence by steps") {
        FlowConfig cfg(power_law(1), circle_profile(1.0, AngleGrid(32)));
        cfg.control.max_steps = 100;
        cfg.control.snapshot_every = 10;
        cfg.control.snapshot_area_ratio = 0.0;
        const Trajectory traj = run(cfg);
        CHECK(traj.snapshots.size() == 11);
    }
    SUBCASE("invalid controls") {
        FlowConfig cfg(power_law(1), circle_profile(1.0, AngleGrid(32)));
        cfg.control.area_fraction = 1.5;
        CHECK_THROWS_AS(run(cfg), std::invalid_argument);
        cfg.control.area_fraction = 0.1;
        cfg.control.c_cfl = 2.0;
        CHECK_THROWS_AS(run(cfg), std::invalid_argument);
        cfg.control.c_cfl = 0.4;
        cfg.control.k_cap = 0.5;
        CHECK_THROWS_AS(run(cfg), std::invalid_argument);
    }
}

TEST_CASE("estimate_blowup needs the asymptotic regime") {
    FlowConfig cfg(power_law(1), circle_profile(1.0, AngleGrid(32)));
    cfg.control.area_fraction = 0.5;
    const Trajectory traj = run(cfg);
    CHECK_FALSE(traj.asymptotic);
    CHECK_THROWS_AS(estimate_blowup(traj, cfg.law), std::invalid_argument);
}

TEST_CASE("formulations agree") {
    FlowConfig cfg(power_law(1), ellipse_profile(2.0, 1.0, AngleGrid(128)));
    cfg.formulation = Formulation::both;
    cfg.control.area_fraction = 0.2;
    const Trajectory traj = run(cfg);
    REQUIRE(traj.max_formulation_gap);
    CHECK(*traj.max_formulation_gap < 1e-6);
    for (const auto& s : traj.snapshots) CHECK(s.formulation_gap);

    FlowConfig sup(power_law(1), ellipse_support(2.0, 1.0, AngleGrid(128)));
    sup.formulation = Formulation::support;
    sup.control.area_fraction = 0.2;
    const Trajectory ts = run(sup);
    CHECK(ts.final().summary.A <= 0.2 * ts.initial().summary.A);
}

TEST_CASE("fourth-order spatial scheme runs") {
    FlowConfig cfg(power_law(1), ellipse_profile(2.0, 1.0, AngleGrid(128)));
    cfg.control.scheme = SpatialScheme::fd4;
    cfg.control.area_fraction = 0.1;
    const Trajectory traj = run(cfg);
    CHECK(traj.stop_reason == StopReason::area_floor);
    FlowConfig ref(power_law(1), ellipse_profile(2.0, 1.0, AngleGrid(128)));
    ref.control.area_fraction = 0.1;
    const Trajectory tr = run(ref);
    CHECK(traj.final().t() == doctest::Approx(tr.final().t()).epsilon(1e-4));
}

TEST_CASE("dealiased run matches the plain run on a smooth profile") {
    FlowConfig cfg(power_law(1), ellipse_profile(1.5, 1.0, AngleGrid(256)));
    cfg.control.dealias = true;
    cfg.control.area_fraction = 0.3;
    const Trajectory a = run(cfg);
    cfg.control.dealias = false;
    const Trajectory b = run(cfg);
    CHECK(a.final().t() == doctest::Approx(b.final().t()).epsilon(1e-6));
}

TEST_CASE("convexity loss ends the run without throwing") {
    // G blows up past k = 3, so the run cannot continue.
    const SpeedLaw wall(
        "wall", [](double x) { return x < 3.0 ? 1.0 : std::numeric_limits<double>::infinity(); },
        [](double) { return 0.0; }, [](double) { return 0.0; });
    FlowConfig cfg(wall, circle_profile(1.0, AngleGrid(32)));
    cfg.require_hypotheses = false;
    const Trajectory traj = run(cfg);
    CHECK(traj.stop_reason == StopReason::convexity_loss);
    CHECK_FALSE(traj.stop_detail.empty());
    CHECK(traj.final().summary.k_max < 3.0);
}

TEST_CASE("containment") {
    const SpeedLaw law = power_law(1);
    SUBCASE("concentric circles") {
        const AngleGrid g(64);
        const ContainmentResult r = containment_run(SupportProfile(g, std::vector<double>(64, 2.0)),
                                                    SupportProfile(g, std::vector<double>(64, 1.0)), law);
        CHECK(r.contained);
        CHECK(r.stopped_by == "inner");
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            const double t = r.times[i];
            CHECK(std::abs(r.min_gap[i] - (std::sqrt(4.0 - 2.0 * t) - std::sqrt(1.0 - 2.0 * t))) < 1e-9);
        }
    }
    SUBCASE("identical curves") {
        const SupportProfile e = ellipse_support(1.5, 1.0, AngleGrid(64));
        RunControl ctl;
        ctl.area_fraction = 0.1;
        const ContainmentResult r = containment_run(e, e, law, ctl);
        for (double gap : r.min_gap) CHECK(gap == 0.0);
    }
    SUBCASE("precondition") {
        const AngleGrid g(64);
        CHECK_THROWS_AS(containment_run(SupportProfile(g, std::vector<double>(64, 1.0)),
                                        SupportProfile(g, std::vector<double>(64, 2.0)), law),
                        std::invalid_argument);
        CHECK_THROWS_AS(containment_run(SupportProfile(g, std::vector<double>(64, 2.0)),
                                        SupportProfile(AngleGrid(32), std::vector<double>(32, 1.0)), law),
                        std::invalid_argument);
    }
}
