#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "singode/integrate.hpp"
#include "singode/named_systems.hpp"
#include "support/oracles.hpp"

using namespace singode;

TEST_CASE("registry resolves the three systems and rejects unknown names") {
    CHECK(load_example("fast_blowup").spec.dim == 2);
    CHECK(load_example("linear_slaving").spec.dim == 3);
    CHECK(load_example("rotation").spec.dim == 3);
    CHECK_THROWS_AS(load_example("lorenz"), UnknownName);
}

TEST_CASE("factorizations match the defining equations") {
    const NamedSystem fb = make_fast_blowup();
    Vec u(2);
    u << 1.0, 1.0;
    const Vec f = fb.spec.F(u);
    CHECK(f[0] == Catch::Approx(-1.0));
    CHECK(f[1] == Catch::Approx(-1.0));
    CHECK(fb.spec.zeta(u) == Catch::Approx(1.0));

    const NamedSystem sl = make_linear_slaving();
    // equilibrium axis
    for (double eps : {-0.2, 0.0, 0.4}) {
        Vec p(1);
        p << eps;
        CHECK(sl.spec.F(sl.equilibria.parameterization(p)).norm() == 0.0);
    }

    const NamedSystem rot = make_rotation();
    Vec r0(3);
    r0 << 0.3, -0.4, 0.2;
    const Vec fr = rot.spec.F(r0);
    CHECK(fr[0] == Catch::Approx(-0.4));
    CHECK(fr[1] == Catch::Approx(-0.3));
    CHECK(fr[2] == 0.0);
}

TEST_CASE("analytic solutions satisfy the singular equation (finite differences)") {
    const double dt = 1e-6;
    for (const char* name : {"fast_blowup", "linear_slaving", "rotation"}) {
        const NamedSystem ns = load_example(name);
        Vec u0(ns.spec.dim);
        if (ns.spec.dim == 2)
            u0 << 0.9, 0.7;
        else
            u0 << 0.9, 0.7, 0.3;
        for (double t : {0.1, 0.3}) {
            const Vec um = ns.analytic_solution(t - dt, u0);
            const Vec up = ns.analytic_solution(t + dt, u0);
            const Vec u = ns.analytic_solution(t, u0);
            const Vec lhs = (up - um) / (2.0 * dt);
            const Vec rhs = ns.spec.F(u) / ns.spec.zeta(u);
            INFO(name);
            CHECK((lhs - rhs).norm() <= 1e-6 * (1.0 + rhs.norm()));
        }
    }
}

TEST_CASE("fast blow-up oracle cross-checked by high-resolution fixed-step integration") {
    const NamedSystem fb = make_fast_blowup();
    Vec u0(2);
    u0 << 1.0, 1.0;
    // independent RK4 at h = 1e-8 on the singular right-hand side
    const Vec num = oracles::rk4_fixed(
        [&](const Vec& u) { return Vec(fb.spec.F(u) / fb.spec.zeta(u)); }, u0, 0.5, 1e-8);
    const Vec formula = analytic_oracle("fast_blowup", 0.5, u0);
    CHECK(std::abs(num[0] - formula[0]) <= 1e-9);
    CHECK(std::abs(num[1] - formula[1]) <= 1e-9);
    CHECK(formula[0] == Catch::Approx(0.45312).margin(1e-5));
    CHECK(formula[1] == Catch::Approx(std::exp(-0.5)).margin(1e-12));
}

TEST_CASE("analytic oracle refuses queries past the blow-up time") {
    Vec u0(2);
    u0 << 1.0, 1.0;
    CHECK_THROWS_AS(analytic_oracle("fast_blowup", 0.8, u0), SingularEvaluation);
    CHECK_NOTHROW(analytic_oracle("fast_blowup", 0.69, u0));
}

TEST_CASE("blow-up time formula") {
    Vec u0(2);
    u0 << 1.0, 1.0;
    CHECK(fast_blowup_tstar(u0) == Catch::Approx(std::log(2.0)));
    // no blow-up when 2 u2 <= u1^2
    Vec safe(2);
    safe << 1.0, 0.4;
    CHECK(std::isinf(fast_blowup_tstar(safe)));
}

TEST_CASE("integration matches the analytic oracles within 10x tolerance") {
    IntegrationOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;

    const NamedSystem sl = make_linear_slaving();
    Vec s0(3);
    s0 << 1.0, 1.0, 0.2;
    const Trajectory st = integrate_singular(sl.spec, s0, 1.0, opts);
    for (size_t i = 0; i < st.samples.size(); i += 5) {
        const auto& smp = st.samples[i];
        CHECK((smp.u - sl.analytic_solution(smp.t, s0)).norm() <= 1e-8);
    }

    const NamedSystem rot = make_rotation();
    Vec r0(3);
    r0 << 1.0, 0.0, 0.5;
    const Trajectory rt = integrate_singular(rot.spec, r0, 1.0, opts);
    for (size_t i = 0; i < rt.samples.size(); i += 5) {
        const auto& smp = rt.samples[i];
        CHECK((smp.u - rot.analytic_solution(smp.t, r0)).norm() <= 1e-8);
    }

    const NamedSystem fb = make_fast_blowup();
    Vec f0(2);
    f0 << 1.0, 1.0;
    const Trajectory ft = integrate_singular(fb.spec, f0, 0.6, opts);
    for (size_t i = 0; i < ft.samples.size(); i += 5) {
        const auto& smp = ft.samples[i];
        CHECK((smp.u - fb.analytic_solution(smp.t, f0)).norm() <= 1e-8);
    }
}

TEST_CASE("rotation solution on the eps axis is constant") {
    Vec u0(3);
    u0 << 0.0, 0.0, 0.3;
    const Vec u = analytic_oracle("rotation", 2.0, u0);
    CHECK((u - u0).norm() == 0.0);
}

TEST_CASE("detected singularity times match the formula on random states") {
    const NamedSystem fb = make_fast_blowup();
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> u1d(0.2, 1.0), pad(0.05, 0.8);
    for (int i = 0; i < 10; ++i) {
        const double u1 = u1d(rng);
        const double u2 = 0.5 * u1 * u1 * 1.2 + pad(rng);  // ensures 2 u2 > u1^2
        Vec u0(2);
        u0 << u1, u2;
        const double t_pred = fb.blowup_time(u0);
        const Trajectory traj = integrate_singular(fb.spec, u0, t_pred + 2.0);
        REQUIRE(traj.termination == Termination::singularity_reached);
        CHECK(std::abs(*traj.t_star - t_pred) <= 1e-3);
    }
}

TEST_CASE("expected hypothesis patterns are recorded") {
    CHECK(make_fast_blowup().expected.h4 == false);
    CHECK(make_fast_blowup().expected.h2_numerical_fail);
    CHECK(make_rotation().expected.h2 == false);
    CHECK(make_linear_slaving().expected.h1);
    CHECK(make_linear_slaving().expected.h5);
}
