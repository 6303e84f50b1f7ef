// The three built-in analytic systems, shipped as polynomial SystemSpecs with
// closed-form solutions and the expected hypothesis audit pattern.
//
//   fast_blowup     du1/dt = -u2/u1, du2/dt = -u2        (zeta = u1)
//   linear_slaving  du1/dt = -5u1, du2/dt = -u2/eps      (zeta = eps, state 3)
//   rotation        du1/dt = u2/eps, du2/dt = -u1/eps    (zeta = eps, state 3)
//
// The slaving and rotation systems carry eps as a state with zero derivative,
// so their equilibrium axes are genuine manifolds inside the state space.
#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "singode/hypotheses.hpp"
#include "singode/system.hpp"

namespace singode {

struct ExpectedHypotheses {
    // Pattern asserted by the source analysis; `true` = expected to pass.
    bool h1 = true, h2 = true, h3 = true, h4 = true, h5 = true;
    // Extra failures the numerical audit is known to surface beyond the
    // asserted pattern (see NamedSystem::notes).
    bool h2_numerical_fail = false;
};

struct NamedSystem {
    std::string name;
    SystemSpec spec;
    EquilibriumManifold equilibria;
    ExpectedHypotheses expected;
    // Closed-form solution map (t, U0) -> U(t), when one exists.
    std::function<Vec(double, const Vec&)> analytic_solution;
    // Blow-up time t*(U0) for orbits that reach the singular set; +inf
    // otherwise. Only meaningful for fast_blowup.
    std::function<double(const Vec&)> blowup_time;
    std::string notes;
};

// t* = ln(2 u2 / (2 u2 - u1^2)) for 2 u2 > u1^2 > 0, from separating
// variables in d(u1^2)/dt = -2 u2.
inline double fast_blowup_tstar(const Vec& u0) {
    const double a = u0[0], b = u0[1];
    if (2.0 * b > a * a && a * a > 0.0) return std::log(2.0 * b / (2.0 * b - a * a));
    return std::numeric_limits<double>::infinity();
}

inline NamedSystem make_fast_blowup() {
    NamedSystem ns;
    ns.name = "fast_blowup";
    PolyVec F(2, MultiPoly(2));
    F[0] = MultiPoly::variable(2, 1, -1.0);                         // -u2
    F[1] = MultiPoly::variable(2, 1, -1.0).mul(MultiPoly::variable(2, 0));  // -u2 u1
    ns.spec = make_poly_system(F, MultiPoly::variable(2, 0), Vec::Zero(2), ns.name);

    ns.equilibria.dimension = 1;
    ns.equilibria.parameterization = [](const Vec& s) {
        Vec u(2);
        u << s[0], 0.0;
        return u;
    };

    ns.expected.h4 = false;
    ns.expected.h2_numerical_fail = true;
    ns.notes =
        "The desingularized linearization at the origin is nilpotent with full "
        "center space, so the numerical audit reports a second failure (h2) on "
        "top of the asserted h4 failure.";

    // u1(t)^2 = u1(0)^2 + 2 u2(0) (e^{-t} - 1), u2(t) = u2(0) e^{-t}.
    ns.analytic_solution = [](double t, const Vec& u0) {
        const double sq = u0[0] * u0[0] + 2.0 * u0[1] * (std::exp(-t) - 1.0);
        if (sq < 0.0) throw SingularEvaluation("fast_blowup analytic solution past blow-up time");
        Vec u(2);
        u << std::sqrt(sq), u0[1] * std::exp(-t);
        return u;
    };
    ns.blowup_time = fast_blowup_tstar;
    return ns;
}

inline NamedSystem make_linear_slaving() {
    NamedSystem ns;
    ns.name = "linear_slaving";
    // F = zeta * (du/dt) = (-5 u1 eps, -u2, 0) with zeta = eps.
    PolyVec F(3, MultiPoly(3));
    F[0] = MultiPoly::variable(3, 0, -5.0).mul(MultiPoly::variable(3, 2));
    F[1] = MultiPoly::variable(3, 1, -1.0);
    F[2] = MultiPoly(3);
    ns.spec = make_poly_system(F, MultiPoly::variable(3, 2), Vec::Zero(3), ns.name);

    ns.equilibria.dimension = 1;
    ns.equilibria.parameterization = [](const Vec& s) {
        Vec u(3);
        u << 0.0, 0.0, s[0];
        return u;
    };

    ns.analytic_solution = [](double t, const Vec& u0) {
        Vec u(3);
        u << u0[0] * std::exp(-5.0 * t), u0[1] * std::exp(-t / u0[2]), u0[2];
        return u;
    };
    return ns;
}

inline NamedSystem make_rotation() {
    NamedSystem ns;
    ns.name = "rotation";
    // F = (u2, -u1, 0) with zeta = eps.
    PolyVec F(3, MultiPoly(3));
    F[0] = MultiPoly::variable(3, 1);
    F[1] = MultiPoly::variable(3, 0, -1.0);
    F[2] = MultiPoly(3);
    ns.spec = make_poly_system(F, MultiPoly::variable(3, 2), Vec::Zero(3), ns.name);

    ns.equilibria.dimension = 1;
    ns.equilibria.parameterization = [](const Vec& s) {
        Vec u(3);
        u << 0.0, 0.0, s[0];
        return u;
    };

    ns.expected.h2 = false;

    // u1 = A cos(t/eps) + B sin(t/eps) with A = u1(0), B = u2(0).
    ns.analytic_solution = [](double t, const Vec& u0) {
        const double w = t / u0[2];
        Vec u(3);
        u << u0[0] * std::cos(w) + u0[1] * std::sin(w),
            -u0[0] * std::sin(w) + u0[1] * std::cos(w), u0[2];
        return u;
    };
    return ns;
}

inline NamedSystem load_example(const std::string& name) {
    if (name == "fast_blowup") return make_fast_blowup();
    if (name == "linear_slaving") return make_linear_slaving();
    if (name == "rotation") return make_rotation();
    throw UnknownName("load_example: unknown system '" + name +
                      "' (expected fast_blowup, linear_slaving or rotation)");
}

// Closed-form state at time t from U0; throws when the orbit has already
// reached the singular set.
inline Vec analytic_oracle(const std::string& name, double t, const Vec& u0) {
    NamedSystem ns = load_example(name);
    if (!ns.analytic_solution) throw Error("analytic_oracle: no closed form for " + name);
    if (ns.blowup_time && t >= ns.blowup_time(u0))
        throw SingularEvaluation("analytic_oracle: t past the blow-up time");
    return ns.analytic_solution(t, u0);
}

}  // namespace singode
