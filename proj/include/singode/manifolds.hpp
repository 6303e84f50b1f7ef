// Local invariant manifolds of the desingularized field as polynomial graphs:
// the order-by-order invariance-equation solver, center manifolds, and the
// singularity-free reduced field on a center manifold.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "singode/spectral.hpp"
#include "singode/system.hpp"

namespace singode {

// Invariant manifold represented as a graph over a linear subspace:
//   U(x) = base + D x + C h(x),
// D/C orthonormal bases of the graph domain/codomain, h polynomial with terms
// of degree 2..order (tangency kills constant and linear parts).
struct TaylorManifold {
    Vec base;
    Mat domain;    // d x k
    Mat codomain;  // d x m, orthogonal complement of domain
    PolyVec h;     // m polynomials in k variables
    int order = 0;
    double residual = 0.0;         // invariance defect measured at residual_radius
    double residual_radius = 0.0;
    double validity_radius = 0.0;  // largest sampled radius with defect < 1e-6

    int ambient_dim() const { return static_cast<int>(base.size()); }
    int graph_dim() const { return static_cast<int>(domain.cols()); }
    int codim() const { return static_cast<int>(codomain.cols()); }

    Vec graph_value(const Vec& x) const {
        Vec y(codim());
        for (int j = 0; j < codim(); ++j) y[j] = h[j].eval(x);
        return y;
    }

    Mat graph_jacobian(const Vec& x) const {
        Mat J(codim(), graph_dim());
        for (int j = 0; j < codim(); ++j)
            for (int i = 0; i < graph_dim(); ++i) J(j, i) = h[j].derivative(i).eval(x);
        return J;
    }

    Vec lift(const Vec& x) const { return base + domain * x + codomain * graph_value(x); }

    Vec coords(const Vec& u) const { return domain.transpose() * (u - base); }

    // Distance from u to the graph over its own domain coordinates.
    double defect(const Vec& u) const {
        const Vec x = coords(u);
        const Vec y = codomain.transpose() * (u - base);
        return codim() == 0 ? 0.0 : (y - graph_value(x)).norm();
    }
};

struct ManifoldOptions {
    double tol_center = 1e-8;    // eigenvalue classification band
    int residual_samples = 32;   // points per sample sphere
    double residual_radius = 1e-3;
    double validity_threshold = 1e-6;
    unsigned seed = 12345;       // sphere sampling
};

namespace detail {

inline std::vector<Vec> sphere_samples(int dim, double radius, int count, unsigned seed) {
    std::vector<Vec> pts;
    if (dim == 1) {
        pts.push_back(Vec::Constant(1, radius));
        pts.push_back(Vec::Constant(1, -radius));
        return pts;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
        Vec v(dim);
        for (int j = 0; j < dim; ++j) v[j] = gauss(rng);
        const double n = v.norm();
        pts.push_back(n > 0 ? Vec(radius / n * v) : Vec::Zero(dim));
    }
    return pts;
}

// Invariance defect |W^T F(U(x)) - Dh(x) V^T F(U(x))| with F evaluated
// exactly (not through its Taylor expansion).
inline double invariance_defect(const SystemSpec& spec, const TaylorManifold& mf, const Vec& x) {
    if (mf.codim() == 0) return 0.0;
    const Vec f = spec.F(mf.lift(x));
    const Vec xdot = mf.domain.transpose() * f;
    const Vec ydot = mf.codomain.transpose() * f;
    return (ydot - mf.graph_jacobian(x) * xdot).norm();
}

inline double max_defect_on_sphere(const SystemSpec& spec, const TaylorManifold& mf, double r,
                                   const ManifoldOptions& opts) {
    double worst = 0.0;
    for (const Vec& x : sphere_samples(mf.graph_dim(), r, opts.residual_samples, opts.seed))
        worst = std::max(worst, invariance_defect(spec, mf, x));
    return worst;
}

// Solves the invariance equation order by order for the graph h over the
// invariant subspace spanned by `domain`. The linear part must satisfy
// codomain^T A domain = 0 (domain invariance), which the callers guarantee.
inline PolyVec solve_graph(const SystemSpec& spec, const Vec& base, const Mat& domain,
                           const Mat& codomain, int order) {
    const int d = spec.dim;
    const int k = static_cast<int>(domain.cols());
    const int m = static_cast<int>(codomain.cols());
    PolyVec h(m, MultiPoly(k));
    if (m == 0 || k == 0) return h;

    // F in frame coordinates w = (x, y): Phi(w) = [D C]^T F(base + [D C] w).
    Mat Q(d, k + m);
    Q.leftCols(k) = domain;
    Q.rightCols(m) = codomain;
    const PolyVec F_taylor = spec.taylor_F(base, order);
    PolyVec Phi(d, MultiPoly(k + m));
    {
        const PolyVec shifted = substitute_affine(F_taylor, Vec::Zero(d), Q);
        for (int i = 0; i < d; ++i) {
            MultiPoly acc(k + m);
            for (int r = 0; r < d; ++r) acc += shifted[r] * Q(r, i);
            Phi[i] = acc.truncated(order);
        }
    }

    const Mat A = spec.jacobian_F(base);
    const Mat Axx = domain.transpose() * A * domain;
    const Mat Ayy = codomain.transpose() * A * codomain;

    // y := h(x) substitution arguments: x passes through, y_j = h_j.
    auto make_args = [&](const PolyVec& hcur) {
        std::vector<MultiPoly> args;
        args.reserve(k + m);
        for (int i = 0; i < k; ++i) args.push_back(MultiPoly::variable(k, i));
        for (int j = 0; j < m; ++j) args.push_back(hcur[j]);
        return args;
    };

    for (int n = 2; n <= order; ++n) {
        // Defect with the current h, exact through degree n.
        const auto args = make_args(h);
        PolyVec defect(m, MultiPoly(k));
        for (int j = 0; j < m; ++j) {
            MultiPoly dj(k);
            // Dh_j . xdot
            for (int i = 0; i < k; ++i) {
                const MultiPoly xdot_i = Phi[i].substitute(args, n);
                dj += h[j].derivative(i).mul(xdot_i, n);
            }
            dj -= Phi[k + j].substitute(args, n);
            defect[j] = dj.homogeneous_part(n);
        }

        // Homological solve L(h_n) = -defect_n with
        // L(x^a e_j) = D(x^a) . (Axx x) e_j - Ayy(:,j) x^a.
        std::vector<Exponents> monos;
        for (const auto& e : exponents_up_to(k, n))
            if (total_degree(e) == n) monos.push_back(e);
        const int nm = static_cast<int>(monos.size());
        std::map<Exponents, int> mono_index;
        for (int i = 0; i < nm; ++i) mono_index[monos[i]] = i;

        const int dim_sys = nm * m;
        Mat L = Mat::Zero(dim_sys, dim_sys);
        Vec rhs = Vec::Zero(dim_sys);
        auto at = [&](int mono, int comp) { return comp * nm + mono; };

        for (int a = 0; a < nm; ++a) {
            const Exponents& alpha = monos[a];
            for (int j = 0; j < m; ++j) {
                const int col = at(a, j);
                // derivative-advection part, stays in component j
                for (int i = 0; i < k; ++i) {
                    if (alpha[i] == 0) continue;
                    for (int l = 0; l < k; ++l) {
                        if (Axx(i, l) == 0.0) continue;
                        Exponents beta = alpha;
                        beta[i] -= 1;
                        beta[l] += 1;
                        L(at(mono_index.at(beta), j), col) += alpha[i] * Axx(i, l);
                    }
                }
                // -Ayy h_n part, couples components
                for (int r = 0; r < m; ++r) L(at(a, r), col) -= Ayy(r, j);
            }
        }
        for (int a = 0; a < nm; ++a)
            for (int j = 0; j < m; ++j) rhs[at(a, j)] = -defect[j].coeff(monos[a]);

        Eigen::ColPivHouseholderQR<Mat> qr(L);
        if (qr.rank() < dim_sys)
            throw ResolutionFailure("invariance equation singular at degree " +
                                    std::to_string(n) + " (resonance-like degeneracy)");
        const Vec sol = qr.solve(rhs);
        for (int a = 0; a < nm; ++a)
            for (int j = 0; j < m; ++j) h[j].add_term(monos[a], sol[at(a, j)]);
    }
    return h;
}

inline void measure_residual(const SystemSpec& spec, TaylorManifold& mf,
                             const ManifoldOptions& opts) {
    mf.residual_radius = opts.residual_radius;
    mf.residual = max_defect_on_sphere(spec, mf, opts.residual_radius, opts);
    mf.validity_radius = 0.0;
    for (double r = opts.residual_radius; r <= 0.5; r *= 2.0) {
        if (max_defect_on_sphere(spec, mf, r, opts) >= opts.validity_threshold) break;
        mf.validity_radius = r;
    }
}

}  // namespace detail

// Builds a Taylor graph manifold tangent to `domain` (an invariant subspace of
// the linearization at `base`) by matching the invariance equation order by
// order.
inline TaylorManifold graph_manifold(const SystemSpec& spec, const Vec& base, const Mat& domain,
                                     int order, const ManifoldOptions& opts = {}) {
    TaylorManifold mf;
    mf.base = base;
    mf.domain = domain;
    mf.codomain = orthogonal_complement(domain);
    mf.order = order;
    mf.h = detail::solve_graph(spec, base, mf.domain, mf.codomain, order);
    detail::measure_residual(spec, mf, opts);
    return mf;
}

// Center manifold of dU/dtau = F(U) at the origin of the spec.
inline TaylorManifold center_manifold(const SystemSpec& spec, int order,
                                      const ManifoldOptions& opts = {}) {
    if (order < 2) throw Error("center_manifold: order must be >= 2");
    const Mat A = spec.jacobian_F(spec.origin);
    const SpectralSplit split = spectral_split(A, opts.tol_center);
    if (split.center.cols() == 0)
        throw NoCenterDirections("center_manifold: trivial center subspace");
    return graph_manifold(spec, spec.origin, split.center, order, opts);
}

// The flow on a center manifold in graph coordinates with the singular factor
// removed: g(x) = D^T F(U(x)) / zeta(U(x)), extended across the singular
// slice by the transverse directional quotient. Construction samples the
// slice and rejects manifolds where the quotient has a genuine pole.
class ReducedSlowField {
  public:
    ReducedSlowField(const SystemSpec& spec, TaylorManifold cm, double eps_zeta = 1e-9)
        : spec_(&spec), cm_(std::move(cm)), eps_zeta_(eps_zeta) {}

    Vec operator()(const Vec& x) const {
        const Vec u = cm_.lift(x);
        const double z = spec_->zeta(u);
        if (std::abs(z) > eps_zeta_) return (cm_.domain.transpose() * spec_->F(u)) / z;
        return transverse_quotient(x);
    }

    const TaylorManifold& manifold() const { return cm_; }

    // Directional quotient d_w(D^T F o lift) / d_w(zeta o lift) along the
    // in-graph gradient direction of zeta o lift.
    Vec transverse_quotient(const Vec& x) const {
        const auto zl = [this](const Vec& xx) { return spec_->zeta(cm_.lift(xx)); };
        Vec w = fd_gradient(zl, x);
        const double wn = w.norm();
        if (wn <= 1e-12)
            throw DivisionDefect("reduced field: zeta degenerate along the manifold");
        w /= wn;
        const double h = fd_step(x);
        const Vec fp = cm_.domain.transpose() * spec_->F(cm_.lift(x + h * w));
        const Vec fm = cm_.domain.transpose() * spec_->F(cm_.lift(x - h * w));
        const double zp = zl(x + h * w), zm = zl(x - h * w);
        return (fp - fm) / (zp - zm);
    }

  private:
    const SystemSpec* spec_;
    TaylorManifold cm_;
    double eps_zeta_;
};

struct SlowFieldOptions {
    double check_radius = 1e-3;  // sampling radius on the singular slice
    int check_samples = 16;
    double tol_pole = 1e-7;      // |D^T F| allowed on the slice
    unsigned seed = 2024;
};

// Newton search for points of the manifold's singular slice zeta(lift(x)) = 0.
inline std::vector<Vec> manifold_singular_slice(const SystemSpec& spec, const TaylorManifold& cm,
                                                double radius, int count, unsigned seed) {
    std::vector<Vec> out;
    auto zl = [&](const Vec& x) { return spec.zeta(cm.lift(x)); };
    for (Vec x : detail::sphere_samples(cm.graph_dim(), radius, count, seed)) {
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            const double z = zl(x);
            if (std::abs(z) <= 1e-12) {
                ok = true;
                break;
            }
            const Vec g = fd_gradient(zl, x);
            const double gn2 = g.squaredNorm();
            if (gn2 <= 1e-20) break;
            x -= (z / gn2) * g;
            if (x.norm() > 10.0 * radius + 1.0) break;
        }
        if (ok) out.push_back(x);
    }
    return out;
}

// Validated construction: throws DivisionDefect when D^T F fails to vanish on
// the singular slice (the quotient would have a pole there).
inline ReducedSlowField reduced_slow_field(const SystemSpec& spec, const TaylorManifold& cm,
                                           const SlowFieldOptions& opts = {}) {
    const auto slice =
        manifold_singular_slice(spec, cm, opts.check_radius, opts.check_samples, opts.seed);
    for (const Vec& x : slice) {
        const double fn = (cm.domain.transpose() * spec.F(cm.lift(x))).norm();
        if (fn > opts.tol_pole * (1.0 + x.norm()))
            throw DivisionDefect("reduced field has a pole on the singular slice: |F| = " +
                                 std::to_string(fn) + " where zeta = 0");
    }
    return ReducedSlowField(spec, cm);
}

}  // namespace singode
