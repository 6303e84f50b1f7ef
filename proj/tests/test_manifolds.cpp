#include <catch2/catch_amalgamated.hpp>

#include "singode/integrate.hpp"
#include "singode/manifolds.hpp"
#include "singode/named_systems.hpp"

using namespace singode;

namespace {

// x' = x y, y' = -y - x^2: the graph y = h(x) has h(x) = -x^2 - 2x^4 + ...
SystemSpec make_xy_system() {
    PolyVec F(2, MultiPoly(2));
    F[0] = MultiPoly::variable(2, 0).mul(MultiPoly::variable(2, 1));
    F[1] = MultiPoly::variable(2, 1, -1.0) -
           MultiPoly::variable(2, 0).mul(MultiPoly::variable(2, 0));
    return make_poly_system(F, MultiPoly::variable(2, 0), Vec::Zero(2), "xy_demo");
}

}  // namespace

TEST_CASE("center manifold coefficient from the order-matching solve") {
    const SystemSpec spec = make_xy_system();
    const TaylorManifold cm = center_manifold(spec, 3);
    REQUIRE(cm.graph_dim() == 1);
    REQUIRE(cm.codim() == 1);
    // orient the degree-2 coefficient by the domain direction (basis sign free)
    const double sx = cm.domain(0, 0), sy = cm.codomain(1, 0);
    const double a = cm.h[0].coeff({2}) * sy / (sx * sx);
    CHECK(a == Catch::Approx(-1.0).margin(1e-10));
    CHECK(cm.h[0].coeff({3}) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("degree-4 coefficient continues the expansion") {
    const SystemSpec spec = make_xy_system();
    const TaylorManifold cm = center_manifold(spec, 4);
    const double sx = cm.domain(0, 0), sy = cm.codomain(1, 0);
    CHECK(cm.h[0].coeff({4}) * sy / std::pow(sx, 4) == Catch::Approx(-2.0).margin(1e-10));
}

TEST_CASE("invariance residual scales like r^(order+1)") {
    const SystemSpec spec = make_xy_system();
    const TaylorManifold cm = center_manifold(spec, 3);
    ManifoldOptions opts;
    double prev = 0.0;
    for (double r = 1e-3; r <= 1e-2; r *= 2.0) {
        const double d = detail::max_defect_on_sphere(spec, cm, r, opts);
        if (prev > 0.0) {
            const double ratio = d / prev;
            CHECK(ratio >= std::pow(2.0, cm.order + 1) / 2.0);
            CHECK(ratio <= std::pow(2.0, cm.order + 1) * 2.0);
        }
        prev = d;
    }
}

TEST_CASE("linear slaving: center manifold is the invariant coordinate plane") {
    const NamedSystem sl = make_linear_slaving();
    const TaylorManifold cm = center_manifold(sl.spec, 3);
    CHECK(cm.graph_dim() == 2);
    REQUIRE(cm.codim() == 1);
    CHECK(cm.h[0].terms().empty());  // all nonlinear coefficients vanish
    CHECK(cm.residual <= 1e-13);
}

TEST_CASE("purely hyperbolic system has no center directions") {
    PolyVec F(2, MultiPoly(2));
    F[0] = MultiPoly::variable(2, 0, -5.0);
    F[1] = MultiPoly::variable(2, 1, -2.0);
    const SystemSpec spec =
        make_poly_system(F, MultiPoly::variable(2, 0), Vec::Zero(2), "hyperbolic");
    CHECK_THROWS_AS(center_manifold(spec, 2), NoCenterDirections);
}

TEST_CASE("local invariance: orbits stay near the computed graph") {
    const SystemSpec spec = make_xy_system();
    const TaylorManifold cm = center_manifold(spec, 3);
    ManifoldOptions mopts;
    const double r = 0.05;
    const double defect0 = detail::max_defect_on_sphere(spec, cm, r, mopts);
    Vec x0(1);
    x0 << r;
    const Vec u0 = cm.lift(x0);
    const Trajectory orbit = integrate_desingularized(spec, u0, 1.0);
    for (const auto& s : orbit.samples) CHECK(cm.defect(s.u) <= 10.0 * defect0);
}

TEST_CASE("reduced slow field on linear slaving removes the singular factor") {
    const NamedSystem sl = make_linear_slaving();
    const TaylorManifold cm = center_manifold(sl.spec, 3);
    const ReducedSlowField g = reduced_slow_field(sl.spec, cm);

    // Graph coordinates of (u1, 0, eps): evaluate the lifted field and map
    // back. Expected reduced dynamics: du1/dt = -5 u1, deps/dt = 0.
    for (double u1 : {0.05, -0.03}) {
        for (double eps : {0.08, 1e-6, 0.0}) {
            Vec u(3);
            u << u1, 0.0, eps;
            const Vec x = cm.coords(u);
            const Vec gx = g(x);
            const Vec lifted_rate = cm.domain * gx;  // back to ambient coordinates
            CHECK(lifted_rate[0] == Catch::Approx(-5.0 * u1).margin(2e-6));
            CHECK(std::abs(lifted_rate[1]) <= 1e-8);
            CHECK(std::abs(lifted_rate[2]) <= 2e-6);
        }
    }
}

TEST_CASE("reduced field with a genuine pole is rejected") {
    const NamedSystem fb = make_fast_blowup();
    const TaylorManifold cm = center_manifold(fb.spec, 3);
    CHECK(cm.graph_dim() == 2);  // nilpotent linearization, full center space
    CHECK_THROWS_AS(reduced_slow_field(fb.spec, cm), DivisionDefect);
}

TEST_CASE("field proportional to zeta reduces to a constant") {
    // F = zeta * (0, 0.8): the quotient field is constant, including on S.
    PolyVec F(2, MultiPoly(2));
    F[0] = MultiPoly(2);
    F[1] = MultiPoly::variable(2, 0, 0.8);  // zeta * 0.8 with zeta = u1
    const SystemSpec spec =
        make_poly_system(F, MultiPoly::variable(2, 0), Vec::Zero(2), "proportional");
    const TaylorManifold cm = center_manifold(spec, 2);
    REQUIRE(cm.graph_dim() == 2);
    const ReducedSlowField g = reduced_slow_field(spec, cm);
    for (double a : {-0.05, 0.0, 0.03}) {
        for (double b : {-0.04, 0.02}) {
            Vec x(2);
            x << a, b;
            const Vec gx = g(x);
            CHECK(gx[0] == Catch::Approx(0.0).margin(1e-7));
            CHECK(gx[1] == Catch::Approx(0.8).margin(1e-6));
        }
    }
}
