// Reduction of block-structured second-order profile ODEs
//
//   [ a11 zeta   A21^t ] (w)   [ 0  0 ] (w_x)
//   [ A21        A22   ] (z) = [ 0  b ] (z_x)
//
// (zeta = first parabolic component minus the wave speed) to an autonomous
// first-order singular system in U = (base, par, z). The scalar hyperbolic
// row eliminates w algebraically; the base variables stay as states driven by
// the resulting expression. Block maps take the full reduced state, so
// derivative-quadratic terms of the underlying equations can live inside A22
// and the column copy of A21.
#pragma once

#include <functional>
#include <random>

#include <Eigen/Dense>

#include "singode/system.hpp"
#include "singode/trajectory.hpp"

namespace singode {

struct BlockSystem {
    int n_hyp = 1;  // scalar non-parabolic block only
    int n_par = 2;
    std::function<double(const Vec&)> a11;
    std::function<Vec(const Vec&)> A21;      // row coupling (the hyperbolic row)
    std::function<Vec(const Vec&)> A21_col;  // column coupling; empty = same as A21
    std::function<Mat(const Vec&)> A22;
    std::function<Mat(const Vec&)> b;
    double sigma = 0.0;  // wave speed; 0 for steady profiles
    std::function<Mat(const Vec&)> E_mat;  // optional N x N time-derivative matrix

    int state_dim() const { return n_hyp + 2 * n_par; }
    double zeta_of(const Vec& u) const { return u[n_hyp] - sigma; }
    Vec col_coupling(const Vec& u) const { return A21_col ? A21_col(u) : A21(u); }
};

// Evolution of the base variables in terms of the eliminated w: the paper's
// class has dbase/dx = w, i.e. g0 = 0, g1 = 1. Must be affine in w so that
// zeta * (dbase/dx) stays regular.
struct BaseDynamics {
    std::function<double(const Vec&)> g0;  // w-independent part
    std::function<double(const Vec&)> g1;  // coefficient of w
};

inline BaseDynamics base_driven_by_w() {
    return {[](const Vec&) { return 0.0; }, [](const Vec&) { return 1.0; }};
}

struct ProfileODE {
    SystemSpec spec;
    int n_base = 1;
    int n_par = 2;
    int zeta_index = 1;  // component carrying the singular factor
    double sigma = 0.0;
};

// Audits the BlockSystem invariants on random states in a box: b invertible
// (condition number below threshold) and a11 bounded away from zero.
inline void audit_block_system(const BlockSystem& bs, const Vec& center, double half_width,
                               int n_samples = 200, unsigned seed = 99,
                               double cond_threshold = 1e8) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-half_width, half_width);
    for (int i = 0; i < n_samples; ++i) {
        Vec u = center;
        for (int j = 0; j < u.size(); ++j) u[j] += unif(rng);
        const Mat B = bs.b(u);
        Eigen::JacobiSVD<Mat> svd(B);
        const double smin = svd.singularValues()[B.rows() - 1];
        if (smin <= 0.0 || svd.singularValues()[0] / smin > cond_threshold)
            throw NonInvertibleB("block audit: b(u) condition number above threshold");
        if (std::abs(bs.a11(u)) < 1e-12)
            throw Error("block audit: a11 not bounded away from zero");
    }
}

// Builds the singular system
//   F = ( zeta g0 - g1 A21^t z / a11,  zeta z,  b^{-1}[A22 zeta - A21_col A21^t / a11] z )
// with zeta(U) the designated component (minus sigma). F is linear in z for
// state-independent blocks and vanishes identically on {z = 0}.
inline ProfileODE reduce(const BlockSystem& bs, const BaseDynamics& base_dynamics) {
    if (bs.n_hyp != 1) throw Error("reduce: only scalar non-parabolic blocks are supported");
    ProfileODE ode;
    ode.n_base = bs.n_hyp;
    ode.n_par = bs.n_par;
    ode.zeta_index = bs.n_hyp;
    ode.sigma = bs.sigma;

    const int d = bs.state_dim();
    const int np = bs.n_par;
    const double sigma = bs.sigma;

    BlockSystem blocks = bs;  // owned copy for the closures
    BaseDynamics bd = base_dynamics;

    SystemSpec spec;
    spec.dim = d;
    spec.name = "reduced_block_system";
    spec.F = [blocks, bd, d, np](const Vec& u) {
        const double zeta = blocks.zeta_of(u);
        const Vec z = u.tail(np);
        const double a = blocks.a11(u);
        const double s = blocks.A21(u).dot(z) / a;  // = -zeta * w
        Vec f(d);
        f[0] = zeta * bd.g0(u) - bd.g1(u) * s;
        f.segment(1, np) = zeta * z;
        const Mat B = blocks.b(u);
        const Vec rhs = zeta * (blocks.A22(u) * z) - s * blocks.col_coupling(u);
        f.tail(np) = B.partialPivLu().solve(rhs);
        return f;
    };
    spec.zeta = [idx = ode.zeta_index, sigma](const Vec& u) { return u[idx] - sigma; };
    spec.grad_zeta = [idx = ode.zeta_index, d](const Vec&) {
        Vec g = Vec::Zero(d);
        g[idx] = 1.0;
        return g;
    };
    // grad of (grad zeta . F) = grad of (zeta z_1): exact.
    spec.grad_zeta_dot_F = [idx = ode.zeta_index, d, np, sigma](const Vec& u) {
        Vec g = Vec::Zero(d);
        g[idx] = u[1 + np];          // z_1
        g[1 + np] = u[idx] - sigma;  // zeta
        return g;
    };
    spec.origin = Vec::Zero(d);
    spec.origin[ode.zeta_index] = sigma;
    ode.spec = std::move(spec);
    return ode;
}

// Defect of a reduced profile in the original second-order block equations,
// with first and second derivatives reconstructed by finite differences on
// the sample grid (three-point formulas; second order on uniform grids).
// Returns the max norm over interior samples.
inline double residual_check(const BlockSystem& bs, const Trajectory& profile) {
    const size_t n = profile.samples.size();
    if (n < 5) throw InsufficientSamples("residual_check: need at least 5 samples");
    const int np = bs.n_par;
    const int nu = bs.n_hyp + np;

    double worst = 0.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        const auto& sm = profile.samples[i - 1];
        const auto& s0 = profile.samples[i];
        const auto& sp = profile.samples[i + 1];
        const double hm = s0.t - sm.t, hp = sp.t - s0.t;
        const Vec um = sm.u.head(nu), u0 = s0.u.head(nu), up = sp.u.head(nu);

        // Nonuniform three-point first and second derivatives.
        const Vec du = (hm * hm * up - hp * hp * um + (hp * hp - hm * hm) * u0) /
                       (hm * hp * (hm + hp));
        const Vec ddu = 2.0 * (hm * up + hp * um - (hm + hp) * u0) / (hm * hp * (hm + hp));

        const double w = du[0];
        const Vec z = du.tail(np);
        const Vec zx = ddu.tail(np);

        const double r1 = bs.a11(s0.u) * bs.zeta_of(s0.u) * w + bs.A21(s0.u).dot(z);
        const Vec r2 = bs.col_coupling(s0.u) * w + bs.A22(s0.u) * z - bs.b(s0.u) * zx;
        worst = std::max(worst, std::max(std::abs(r1), r2.lpNorm<Eigen::Infinity>()));
    }
    return worst;
}

}  // namespace singode
