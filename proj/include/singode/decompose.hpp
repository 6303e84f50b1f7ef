// Slow/fast/perturbation decomposition of an orbit on the uniformly stable
// manifold:
//   fast = spectral projection of U - U_inf onto the uniformly fast stable
//          directions at the limit equilibrium (rates bounded away from zero
//          in tau as the base approaches S),
//   slow = orbit of the reduced singularity-free field through the
//          complementary projection of U(0), lifted from the center manifold,
//   pert = U - slow - fast, with the scaling constant of the bound
//          |pert| <= C |fast(0)| zeta(U(0)) estimated empirically.
#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "singode/integrate.hpp"
#include "singode/manifolds.hpp"
#include "singode/stable.hpp"

namespace singode {

struct OrbitDecomposition {
    Trajectory slow, fast, pert;
    double c_estimate = 0.0;
    Vec limit_equilibrium;
    double fast_decay_rate = 0.0;   // tau-rate of the fast block
    double fast_fitted_slope = 0.0; // measured d log|fast| / d tau
};

struct DecomposeOptions {
    double tol_mfd = 1e-6;        // allowed distance of the orbit to the bundle
    int center_order = 3;
    double continuation_horizon = 200.0;  // max extra time to find the limit
    IntegrationOptions integration;        // used for continuation + slow orbit
    ManifoldOptions manifold;

    DecomposeOptions() {
        integration.rtol = 1e-13;
        integration.atol = 1e-15;
    }
};

namespace detail {

// Least-squares projection of u onto the parameterized equilibrium manifold.
inline Vec project_onto_equilibria(const EquilibriumManifold& eq, const Vec& u) {
    Vec s = Vec::Zero(eq.dimension);
    for (int it = 0; it < 50; ++it) {
        const Vec r = eq.parameterization(s) - u;
        const Mat J = eq.tangents(s);
        const Vec step = (J.transpose() * J).ldlt().solve(J.transpose() * r);
        s -= step;
        if (step.norm() < 1e-14 * (1.0 + s.norm())) break;
    }
    return eq.parameterization(s);
}

struct FastProjector {
    Mat basis;      // d x k_fast
    Mat frame_inv;  // d x d, inverse of [fast | rest]
    int k_fast = 0;
    double slowest_rate = 0.0;  // min |Re lambda| over the selected block

    Vec project(const Vec& v) const { return basis * (frame_inv * v).head(k_fast); }
};

// Spectral projector onto the eigendirections of A that continue the
// uniformly fast block: the eigenvalues matched (greedily, by distance in the
// complex plane) against the strictly stable spectrum at the distinguished
// origin. Selecting by continuation rather than by magnitude keeps the
// slow-but-stable directions (rates vanishing with zeta) on the slow side.
inline FastProjector fast_projector(const Mat& A,
                                    const std::vector<std::complex<double>>& targets) {
    const int d = static_cast<int>(A.rows());
    Eigen::EigenSolver<Mat> es(A);
    if (es.info() != Eigen::Success) throw Error("fast_projector: eigensolver failed");

    std::vector<bool> selected(d, false);
    for (const auto& target : targets) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i) {
            if (selected[i]) continue;
            const double dist = std::abs(es.eigenvalues()[i] - target);
            if (dist < bd) {
                bd = dist;
                best = i;
            }
        }
        if (best < 0) throw Error("fast_projector: fewer eigenvalues than targets");
        selected[best] = true;
    }

    // Realified eigenvector frame, selected block first; each conjugate pair
    // contributes its real and imaginary parts once.
    const Eigen::MatrixXcd evecs = es.eigenvectors();
    Mat frame(d, d);
    std::vector<bool> consumed(d, false);
    int col = 0;
    double slowest = std::numeric_limits<double>::infinity();
    auto emit = [&](int j) {
        consumed[j] = true;
        const auto lam = es.eigenvalues()[j];
        frame.col(col++) = evecs.col(j).real();
        if (std::abs(lam.imag()) > 0.0 && col < d) {
            frame.col(col++) = evecs.col(j).imag();
            for (int r = 0; r < d; ++r)
                if (!consumed[r] && std::abs(es.eigenvalues()[r] - std::conj(lam)) < 1e-10) {
                    consumed[r] = true;
                    selected[r] = selected[j];
                    break;
                }
        }
    };
    for (int j = 0; j < d; ++j)
        if (selected[j] && !consumed[j]) {
            slowest = std::min(slowest, std::abs(es.eigenvalues()[j].real()));
            emit(j);
        }
    const int k_fast = col;
    for (int j = 0; j < d; ++j)
        if (!consumed[j]) emit(j);

    Eigen::FullPivLU<Mat> lu(frame);
    if (!lu.isInvertible())
        throw IllConditioned("fast_projector: defective eigenvector frame at the limit "
                             "equilibrium");
    FastProjector p;
    p.basis = frame.leftCols(k_fast);
    p.frame_inv = lu.inverse();
    p.k_fast = k_fast;
    p.slowest_rate = slowest;
    return p;
}

}  // namespace detail

// Decomposes `traj` (an orbit of the singular system lying on the bundle,
// with zeta > 0 throughout) relative to the equilibrium manifold `eq` the
// bundle was built over.
inline OrbitDecomposition decompose_orbit(const SystemSpec& spec, const StableFiberBundle& bundle,
                                          const EquilibriumManifold& eq, const Trajectory& traj,
                                          const DecomposeOptions& opts = {}) {
    if (traj.samples.size() < 2) throw InsufficientSamples("decompose_orbit: empty trajectory");
    for (const auto& s : traj.samples) {
        if (s.zeta <= 0.0)
            throw Error("decompose_orbit: zeta <= 0 along the trajectory");
        if (bundle.distance(s.u) > opts.tol_mfd * (1.0 + s.u.norm()))
            throw NotOnManifold("decompose_orbit: trajectory leaves the bundle graph "
                                "(distance " + std::to_string(bundle.distance(s.u)) + ")");
    }

    // Limit equilibrium: continue the orbit until the equilibrium monitor
    // fires, then project onto E.
    Vec u_end = traj.back().u;
    if (traj.termination != Termination::equilibrium_reached) {
        IntegrationOptions copts = opts.integration;
        copts.eq_steps = 5;
        Trajectory cont = integrate_singular(spec, u_end, opts.continuation_horizon, copts);
        if (cont.termination != Termination::equilibrium_reached)
            throw NoAsymptoticEquilibrium("decompose_orbit: orbit did not reach an equilibrium "
                                          "within the continuation horizon");
        u_end = cont.back().u;
    }
    const Vec u_inf = detail::project_onto_equilibria(eq, u_end);

    // The uniformly fast block continues the strictly stable spectrum at the
    // distinguished origin (those rates stay bounded away from zero as the
    // base approaches S).
    const SpectralSplit origin_split =
        spectral_split(spec.jacobian_F(spec.origin), opts.manifold.tol_center);
    if (origin_split.stable.cols() == 0)
        throw NoStableDirections("decompose_orbit: no uniformly fast directions at the origin");

    const Mat A_inf = spec.jacobian_F(u_inf);
    const auto proj = detail::fast_projector(A_inf, origin_split.stable_eigs);

    OrbitDecomposition out;
    out.limit_equilibrium = u_inf;
    out.fast_decay_rate = proj.slowest_rate;

    // Slow orbit: reduced field on the center manifold from the complementary
    // projection of U(0).
    const TaylorManifold cm = center_manifold(spec, opts.center_order, opts.manifold);
    const ReducedSlowField g = reduced_slow_field(spec, cm);
    const Vec u0 = traj.front().u;
    const Vec slow0 = u_inf + (u0 - u_inf) - proj.project(u0 - u_inf);
    const Vec x0 = cm.coords(slow0);

    std::vector<double> times;
    times.reserve(traj.samples.size());
    for (const auto& s : traj.samples) times.push_back(s.t);
    const std::vector<Vec> xs =
        integrate_field_to_times([&g](const Vec& x) { return g(x); }, x0, times,
                                 opts.integration);

    out.slow.termination = traj.termination;
    out.fast.termination = traj.termination;
    out.pert.termination = traj.termination;
    double max_pert = 0.0;
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        const Sample& in = traj.samples[i];
        Sample slow_s = in, fast_s = in, pert_s = in;
        slow_s.u = cm.lift(xs[i]);
        fast_s.u = proj.project(in.u - u_inf);
        pert_s.u = in.u - slow_s.u - fast_s.u;
        slow_s.zeta = spec.zeta(slow_s.u);
        fast_s.zeta = in.zeta;
        pert_s.zeta = in.zeta;
        slow_s.rhs_norm = fast_s.rhs_norm = pert_s.rhs_norm = 0.0;
        max_pert = std::max(max_pert, pert_s.u.norm());
        out.slow.samples.push_back(std::move(slow_s));
        out.fast.samples.push_back(std::move(fast_s));
        out.pert.samples.push_back(std::move(pert_s));
    }

    const double fast0 = out.fast.samples.front().u.norm();
    const double z0 = traj.front().zeta;
    out.c_estimate = fast0 > 0.0 && z0 > 0.0 ? max_pert / (fast0 * z0) : 0.0;

    // Measured decay of the fast component in tau.
    std::vector<double> taus, logf;
    const double tau0 = traj.front().tau;
    for (const auto& s : out.fast.samples) {
        const double fn = s.u.norm();
        if (s.tau - tau0 < 0.25 || fn <= 1e-300) continue;
        if (!logf.empty() && s.tau - tau0 > 4.0) break;
        taus.push_back(s.tau);
        logf.push_back(std::log(fn));
    }
    out.fast_fitted_slope =
        taus.size() >= 3 ? detail::fit_log_slope(taus, logf) : 0.0;
    return out;
}

}  // namespace singode
