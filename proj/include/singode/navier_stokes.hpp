// One-dimensional compressible Navier-Stokes in Eulerian coordinates: the
// symmetrized steady/travelling-wave blocks, their reduction to a singular
// system in U = (rho, v, e, z1, z2) with zeta = v - sigma, steady viscous
// profiles along stable fibers, and the self-consistency residual against the
// conservation-form equations.
//
// The symmetrizer is the row scaling diag(p_rho/rho^2, 1/rho, p_e/(rho p)) of
// the quasilinear steady system (mass, momentum, energy with v x momentum
// removed), which makes the first-order coefficient matrix symmetric at
// z = 0 with a11 = p_rho/rho^2. The dissipative heating term nu v_x^2 and the
// transport-coefficient derivatives live in the state-dependent parts of the
// blocks.
#pragma once

#include <cmath>
#include <functional>

#include "singode/block_reduction.hpp"
#include "singode/hypotheses.hpp"
#include "singode/integrate.hpp"
#include "singode/manifolds.hpp"
#include "singode/system.hpp"

namespace singode {

struct GasModel {
    double gamma = 1.4;
    double R_gas = 1.0;
    std::function<double(double)> nu;      // viscosity(rho) > 0
    std::function<double(double)> k_heat;  // heat conduction(rho) > 0
    std::function<double(double, double)> p;      // pressure(rho, e) > 0
    std::function<double(double, double)> p_rho;  // > 0
    std::function<double(double, double)> p_e;
    double rho_min = 0.1;

    // Set by the default factory; enables the exact polynomial backend.
    bool polytropic_pressure = false;
    bool constant_transport = false;
    double nu0 = 1.0, k0 = 1.0;

    double theta_prime() const { return (gamma - 1.0) / R_gas; }
};

// Polytropic ideal gas p = (gamma-1) rho e with constant transport
// coefficients.
inline GasModel make_default_gas(double gamma = 1.4, double R_gas = 1.0, double nu0 = 1.0,
                                 double k0 = 1.0) {
    GasModel g;
    g.gamma = gamma;
    g.R_gas = R_gas;
    g.nu = [nu0](double) { return nu0; };
    g.k_heat = [k0](double) { return k0; };
    g.p = [gamma](double rho, double e) { return (gamma - 1.0) * rho * e; };
    g.p_rho = [gamma](double, double e) { return (gamma - 1.0) * e; };
    g.p_e = [gamma](double rho, double) { return (gamma - 1.0) * rho; };
    g.polytropic_pressure = true;
    g.constant_transport = true;
    g.nu0 = nu0;
    g.k0 = k0;
    return g;
}

struct NSState {
    double rho = 1.0, v = 0.0, e = 1.0;
    Eigen::Vector2d z = Eigen::Vector2d::Zero();  // (v_x, e_x)

    Vec to_vec() const {
        Vec u(5);
        u << rho, v, e, z[0], z[1];
        return u;
    }
    static NSState from_vec(const Vec& u) {
        NSState s;
        s.rho = u[0];
        s.v = u[1];
        s.e = u[2];
        s.z << u[3], u[4];
        return s;
    }
};

// theta = e (gamma - 1) / R for a polytropic gas.
inline double polytropic_theta(const GasModel& gas, double e) {
    if (e <= 0.0) throw NonPositiveEnergy("polytropic_theta: e <= 0");
    return e * (gas.gamma - 1.0) / gas.R_gas;
}

// a11 = p_rho / rho^2; well defined away from vacuum.
inline double ns_a11(const GasModel& gas, double rho, double e) {
    return gas.p_rho(rho, e) / (rho * rho);
}

namespace detail {

inline double map_derivative(const std::function<double(double)>& f, double x) {
    const double h = fd_step(Vec::Constant(1, x));
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace detail

// Symmetrized blocks of the steady (sigma = 0) or travelling-wave profile
// equations. State layout U = (rho, v, e, z1, z2), zeta = v - sigma.
inline BlockSystem build_steady_system(const GasModel& gas, double sigma = 0.0) {
    BlockSystem bs;
    bs.n_hyp = 1;
    bs.n_par = 2;
    bs.sigma = sigma;

    bs.a11 = [gas](const Vec& u) { return ns_a11(gas, u[0], u[2]); };
    bs.A21 = [gas](const Vec& u) {
        Vec a(2);
        a << gas.p_rho(u[0], u[2]) / u[0], 0.0;
        return a;
    };
    bs.A21_col = [gas](const Vec& u) {
        const double rho = u[0], e = u[2], z1 = u[3], z2 = u[4];
        const double pr = gas.p(rho, e);
        Vec a(2);
        a[0] = gas.p_rho(rho, e) / rho - detail::map_derivative(gas.nu, rho) / rho * z1;
        a[1] = -gas.p_e(rho, e) * detail::map_derivative(gas.k_heat, rho) * gas.theta_prime() /
               (rho * pr) * z2;
        return a;
    };
    bs.A22 = [gas, sigma](const Vec& u) {
        const double rho = u[0], e = u[2], z1 = u[3];
        const double zeta = u[1] - sigma;
        const double pr = gas.p(rho, e);
        const double pe = gas.p_e(rho, e);
        Mat A(2, 2);
        A(0, 0) = zeta;
        A(0, 1) = pe / rho;
        A(1, 0) = pe / rho - gas.nu(rho) * pe * z1 / (rho * pr);
        A(1, 1) = pe * zeta / pr;
        return A;
    };
    bs.b = [gas](const Vec& u) {
        const double rho = u[0], e = u[2];
        Mat B = Mat::Zero(2, 2);
        B(0, 0) = gas.nu(rho) / rho;
        B(1, 1) = gas.k_heat(rho) * gas.theta_prime() * gas.p_e(rho, e) /
                  (rho * gas.p(rho, e));
        return B;
    };
    // Symmetrized time-derivative matrix, kept for reference/inspection.
    bs.E_mat = [gas](const Vec& u) {
        const double rho = u[0], v = u[1], e = u[2];
        const double pr = gas.p(rho, e);
        Mat E(3, 3);
        E.row(0) << gas.p_rho(rho, e) / (rho * rho), 0.0, 0.0;
        E.row(1) << v / rho, 1.0, 0.0;
        E.row(2) << gas.p_e(rho, e) * (e + v * v / 2.0) / (rho * pr),
            gas.p_e(rho, e) * v / pr, gas.p_e(rho, e) / pr;
        return E;
    };
    return bs;
}

// Exact polynomial form of the reduced field for the default polytropic gas
// with constant transport coefficients.
inline PolyVec ns_reduced_polynomials(const GasModel& gas, double sigma) {
    const double g1 = gas.gamma - 1.0;
    const double thp = gas.theta_prime();
    auto var = [](int i, double c = 1.0) { return MultiPoly::variable(5, i, c); };
    const MultiPoly rho = var(0), e = var(2), z1 = var(3), z2 = var(4);
    const MultiPoly zeta = var(1) - MultiPoly::constant(5, sigma);

    PolyVec F(5, MultiPoly(5));
    F[0] = rho.mul(z1) * -1.0;
    F[1] = zeta.mul(z1);
    F[2] = zeta.mul(z2);
    // (rho zeta^2 z1 + p_e zeta z2 - rho p_rho z1) / nu
    F[3] = (rho.mul(zeta.mul(zeta)).mul(z1) + (g1 * rho.mul(zeta).mul(z2)) -
            g1 * rho.mul(e).mul(z1)) *
           (1.0 / gas.nu0);
    // (p zeta z1 + rho zeta^2 z2 - nu zeta z1^2) / (k theta')
    F[4] = (g1 * rho.mul(e).mul(zeta).mul(z1) + rho.mul(zeta.mul(zeta)).mul(z2) -
            gas.nu0 * zeta.mul(z1).mul(z1)) *
           (1.0 / (gas.k0 * thp));
    return F;
}

struct NSSystem {
    ProfileODE ode;
    BlockSystem blocks;
    EquilibriumManifold equilibria;  // constant states (rho, v, e, 0, 0)
    GasModel gas;
};

// Reduced singular system around the constant state (rho0, sigma, e0, 0, 0);
// that state is the distinguished origin (F = 0, zeta = 0). For the default
// gas the exact polynomial backend is attached.
inline NSSystem make_ns_system(const GasModel& gas, double rho0 = 1.0, double e0 = 1.0,
                               double sigma = 0.0) {
    NSSystem ns;
    ns.gas = gas;
    ns.blocks = build_steady_system(gas, sigma);
    ns.ode = reduce(ns.blocks, base_driven_by_w());
    ns.ode.spec.name = "navier_stokes_reduced";
    Vec origin(5);
    origin << rho0, sigma, e0, 0.0, 0.0;
    ns.ode.spec.origin = origin;
    if (gas.polytropic_pressure && gas.constant_transport) {
        ns.ode.spec.poly_F = ns_reduced_polynomials(gas, sigma);
        ns.ode.spec.poly_zeta = MultiPoly::variable(5, 1) - MultiPoly::constant(5, sigma);
    }
    ns.equilibria.dimension = 3;
    ns.equilibria.parameterization = [origin](const Vec& p) {
        Vec u = origin;
        u[0] += p[0];
        u[1] += p[1];
        u[2] += p[2];
        return u;
    };
    ns.equilibria.tangent_basis = [](const Vec&) {
        Mat T = Mat::Zero(5, 3);
        T(0, 0) = T(1, 1) = T(2, 2) = 1.0;
        return T;
    };
    return ns;
}

struct ProfileOptions {
    double amplitude = 1e-3;   // perturbation along the dominant stable fiber
    int fiber_order = 2;
    double output_step = 0.0;  // > 0: sample the profile on a uniform grid
    IntegrationOptions integration;

    ProfileOptions() {
        integration.rtol = 1e-12;
        integration.atol = 1e-14;
    }
};

// Steady (or travelling-wave) viscous profile: start on the stable fiber of
// the equilibrium at `left_state` and integrate the reduced singular system
// over [0, length]. The profile keeps v - sigma > 0 and converges to the
// equilibrium with z -> 0.
inline Trajectory compute_profile(const GasModel& gas, const NSState& left_state, double sigma,
                                  double length, const ProfileOptions& opts = {}) {
    NSSystem ns = make_ns_system(gas, left_state.rho, left_state.e, sigma);
    Vec base(5);
    base << left_state.rho, left_state.v, left_state.e, 0.0, 0.0;
    if (ns.ode.spec.zeta(base) <= 0.0)
        throw InvalidInitialState("compute_profile: left state must have v - sigma > 0");

    const Mat A = ns.ode.spec.jacobian_F(base);
    const SpectralSplit split = spectral_split(A);
    if (split.stable.cols() == 0)
        throw NoStableDirections("compute_profile: no stable fiber at the left state");

    // Dominant stable direction, sign-normalized for determinism.
    int dom = 0;
    double best = 0.0;
    for (size_t i = 0; i < split.stable_eigs.size(); ++i)
        if (std::abs(split.stable_eigs[i].real()) > best) {
            best = std::abs(split.stable_eigs[i].real());
            dom = static_cast<int>(std::min<size_t>(i, split.stable.cols() - 1));
        }
    TaylorManifold fiber = graph_manifold(ns.ode.spec, base, split.stable, opts.fiber_order);
    Vec x0 = Vec::Zero(fiber.graph_dim());
    x0[dom] = opts.amplitude;
    {
        int imax = 0;
        fiber.domain.col(dom).cwiseAbs().maxCoeff(&imax);
        if (fiber.domain(imax, dom) < 0.0) x0[dom] = -x0[dom];
    }
    const Vec u0 = fiber.lift(x0);

    Trajectory traj;
    if (opts.output_step > 0.0) {
        std::vector<double> times;
        for (double t = 0.0; t <= length + 1e-12; t += opts.output_step) times.push_back(t);
        traj = integrate_to_times(ns.ode.spec, u0, times, opts.integration);
    } else {
        traj = integrate_singular(ns.ode.spec, u0, length, opts.integration);
    }
    if (traj.termination == Termination::singularity_reached || traj.min_zeta() <= 0.0)
        throw SignViolation("compute_profile: v - sigma crossed zero along the profile");
    if (traj.termination == Termination::step_failure)
        throw StepFailure("compute_profile: integration failed");
    return traj;
}

// Max-norm defect of a profile in the conservation-form steady/travelling
// wave equations
//   (rho v - sigma rho)' = 0
//   (rho v^2 + p - sigma rho v)' = (nu v_x)'
//   (v [rho v^2/2 + rho e + p] - sigma [rho v^2/2 + rho e])' = (k theta_x + nu v v_x)'
// with all derivatives rebuilt by finite differences from the (rho, v, e)
// samples. Second-order on uniform grids.
inline double primitive_residual(const GasModel& gas, double sigma, const Trajectory& profile) {
    const size_t n = profile.samples.size();
    if (n < 7) throw InsufficientSamples("primitive_residual: need at least 7 samples");

    std::vector<double> xs(n), fm(n), fv(n), fe(n), vx(n), ex(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& s = profile.samples[i];
        const double rho = s.u[0], v = s.u[1], e = s.u[2];
        const double pr = gas.p(rho, e);
        xs[i] = s.t;
        fm[i] = rho * v - sigma * rho;
        fv[i] = rho * v * v + pr - sigma * rho * v;
        fe[i] = v * (0.5 * rho * v * v + rho * e + pr) - sigma * (0.5 * rho * v * v + rho * e);
    }
    auto ddx = [&xs](const std::vector<double>& f, size_t i) {
        const double hm = xs[i] - xs[i - 1], hp = xs[i + 1] - xs[i];
        return (hm * hm * f[i + 1] - hp * hp * f[i - 1] + (hp * hp - hm * hm) * f[i]) /
               (hm * hp * (hm + hp));
    };
    std::vector<double> vcol(n), ecol(n);
    for (size_t j = 0; j < n; ++j) {
        vcol[j] = profile.samples[j].u[1];
        ecol[j] = profile.samples[j].u[2];
    }
    for (size_t i = 1; i + 1 < n; ++i) {
        vx[i] = ddx(vcol, i);
        ex[i] = ddx(ecol, i);
    }

    std::vector<double> g1(n, 0.0), g2(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
        const auto& s = profile.samples[i];
        const double rho = s.u[0], v = s.u[1];
        g1[i] = gas.nu(rho) * vx[i];
        g2[i] = gas.k_heat(rho) * gas.theta_prime() * ex[i] + gas.nu(rho) * v * vx[i];
    }

    double worst = 0.0;
    for (size_t i = 2; i + 2 < n; ++i) {
        const double r1 = ddx(fm, i);
        const double r2 = ddx(fv, i) - ddx(g1, i);
        const double r3 = ddx(fe, i) - ddx(g2, i);
        worst = std::max({worst, std::abs(r1), std::abs(r2), std::abs(r3)});
    }
    return worst;
}

}  // namespace singode
