// Numerical audit of the five structural conditions a singular system must
// satisfy for the invariant-manifold constructions to apply:
//   h1: grad zeta does not vanish at the distinguished state
//   h2: center manifold meets the singular set only at equilibria
//   h3: an equilibrium manifold through the origin is transversal to S
//   h4: grad zeta . F vanishes identically on S
//   h5: the continuous extension G of (grad zeta . F)/zeta vanishes at
//       equilibria on S
// Verdicts carry numerical margins and, on failure, a witness state.
#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "singode/manifolds.hpp"
#include "singode/system.hpp"

namespace singode {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

struct HypothesisResult {
    Verdict verdict = Verdict::inconclusive;
    double margin = 0.0;
    std::optional<Vec> witness;
    std::string note;
};

struct HypothesisReport {
    HypothesisResult h1, h2, h3, h4, h5;
    std::vector<Vec> s_samples;

    bool all_pass() const {
        return h1.verdict == Verdict::pass && h2.verdict == Verdict::pass &&
               h3.verdict == Verdict::pass && h4.verdict == Verdict::pass &&
               h5.verdict == Verdict::pass;
    }
};

// Manifold of equilibria of the desingularized field, given as a
// parameterization over a block of n_eq parameters.
struct EquilibriumManifold {
    std::function<Vec(const Vec&)> parameterization;  // R^{n_eq} -> R^d
    int dimension = 0;
    // Optional analytic tangent basis; finite differences otherwise.
    std::function<Mat(const Vec&)> tangent_basis;

    Mat tangents(const Vec& params) const {
        if (tangent_basis) return tangent_basis(params);
        return fd_jacobian(parameterization, params);
    }
};

struct HypothesisOptions {
    double tol_S = 1e-10;     // |zeta| accepted as "on S"
    double tol_grad = 1e-8;   // h1 threshold
    double tol_h4 = 1e-8;
    double tol_h5 = 1e-8;
    double tol_eq = 1e-10;    // equilibrium detection
    double tol_rank = 1e-8;   // relative singular-value threshold, h3
    double tol_h2 = 1e-8;     // |F| allowed on M^c cap S
    double box_half_width = 0.1;
    int min_samples = 20;
    int max_grid_total = 400;  // cap on grid seeds
    int center_order = 3;      // expansion order for the h2 manifold
    unsigned seed = 7;
    double eps_on_S = 1e-9;    // |zeta| below which the quotient is extended
    int direction_checks = 6;  // random transverse directions for the quotient
};

// ---------------------------------------------------------------------------
// Singular set sampling

struct Box {
    Vec center;
    double half_width = 0.1;
};

namespace detail {

inline std::vector<Vec> grid_seeds(const Box& box, int max_total) {
    const int d = static_cast<int>(box.center.size());
    int per_axis = std::max(3, static_cast<int>(std::floor(std::pow(double(max_total), 1.0 / d))));
    if (per_axis % 2 == 0) --per_axis;  // keep the center point in the grid
    std::vector<Vec> seeds;
    std::vector<int> idx(d, 0);
    const long total = static_cast<long>(std::pow(per_axis, d));
    for (long n = 0; n < total; ++n) {
        long r = n;
        Vec u = box.center;
        for (int i = 0; i < d; ++i) {
            const int q = static_cast<int>(r % per_axis);
            r /= per_axis;
            u[i] += box.half_width * (2.0 * q / (per_axis - 1) - 1.0);
        }
        seeds.push_back(std::move(u));
    }
    return seeds;
}

// Newton projection of u onto S along grad zeta.
inline bool project_onto_S(const SystemSpec& spec, Vec& u, double tol_S) {
    for (int it = 0; it < 60; ++it) {
        const double z = spec.zeta(u);
        if (std::abs(z) <= tol_S) return true;
        const Vec g = spec.gradient_zeta(u);
        const double gn2 = g.squaredNorm();
        if (gn2 <= 1e-24) return false;
        u -= (z / gn2) * g;
    }
    return std::abs(spec.zeta(u)) <= tol_S;
}

}  // namespace detail

// Projects grid seeds in `box` onto the singular set by Newton iteration
// along grad zeta. Requires h1 (call check_h1 first).
inline std::vector<Vec> sample_singular_set(const SystemSpec& spec, const Box& box, int n,
                                            const HypothesisOptions& opts = {}) {
    std::vector<Vec> out;
    for (Vec u : detail::grid_seeds(box, opts.max_grid_total)) {
        if (detail::project_onto_S(spec, u, opts.tol_S) &&
            (u - box.center).lpNorm<Eigen::Infinity>() <= 2.0 * box.half_width)
            out.push_back(std::move(u));
    }
    if (static_cast<int>(out.size()) < n)
        throw SeedingFailed("sample_singular_set: only " + std::to_string(out.size()) +
                            " of " + std::to_string(n) + " requested projections converged");
    return out;
}

// ---------------------------------------------------------------------------
// h1: grad zeta(origin) != 0

inline HypothesisResult check_h1(const SystemSpec& spec, const HypothesisOptions& opts = {}) {
    HypothesisResult r;
    r.margin = spec.gradient_zeta(spec.origin).norm();
    if (r.margin > opts.tol_grad) {
        r.verdict = Verdict::pass;
    } else {
        r.verdict = Verdict::fail;
        r.witness = spec.origin;
        r.note = "gradient of zeta vanishes at the distinguished state";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Extended quotient G

// G(U) = (grad zeta . F)/zeta off S; on S the transverse directional quotient
// d_v(grad zeta . F)/d_v zeta with v = grad zeta, which is well defined and
// direction-independent exactly when h4 holds near U. Random transverse
// directions are compared against the canonical one to detect violations.
inline double extended_G(const SystemSpec& spec, const Vec& u, const HypothesisOptions& opts = {}) {
    const double z = spec.zeta(u);
    if (std::abs(z) > opts.eps_on_S) return spec.zeta_dot_F(u) / z;

    const Vec g = spec.gradient_zeta(u);
    const double gn = g.norm();
    if (gn <= opts.tol_grad)
        throw ExtensionUndefined("extended_G: grad zeta degenerate on S");
    const double zf = spec.zeta_dot_F(u);
    if (std::abs(zf) > opts.tol_h4 * (1.0 + spec.F(u).norm()))
        throw ExtensionUndefined("extended_G: grad zeta . F = " + std::to_string(zf) +
                                 " does not vanish on S (h4 violated at U)");

    const Vec dzf = spec.gradient_zeta_dot_F(u);
    const Vec v = g / gn;
    const double G = dzf.dot(v) / gn;

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int d = spec.dim;
    int checked = 0;
    for (int k = 0; k < 8 * opts.direction_checks && checked < opts.direction_checks; ++k) {
        Vec w(d);
        for (int i = 0; i < d; ++i) w[i] = gauss(rng);
        w.normalize();
        const double den = g.dot(w);
        if (std::abs(den) < 0.1 * gn) continue;  // nearly tangent to S
        ++checked;
        const double q = dzf.dot(w) / den;
        if (std::abs(q - G) > 1e-5 * (1.0 + std::abs(G)))
            throw ExtensionUndefined(
                "extended_G: directional quotients disagree on S (h4 violated near U)");
    }
    return G;
}

// ---------------------------------------------------------------------------
// h4: grad zeta . F = 0 on S

inline HypothesisResult check_h4(const SystemSpec& spec, const std::vector<Vec>& s_samples,
                                 const HypothesisOptions& opts = {}) {
    HypothesisResult r;
    r.verdict = Verdict::pass;
    r.margin = 0.0;
    for (const Vec& u : s_samples) {
        const double scaled = std::abs(spec.zeta_dot_F(u)) / (1.0 + spec.F(u).norm());
        const bool worse = scaled > r.margin ||
                           (scaled == r.margin && r.witness &&
                            std::lexicographical_compare(u.data(), u.data() + u.size(),
                                                         r.witness->data(),
                                                         r.witness->data() + r.witness->size()));
        if (worse) {
            r.margin = scaled;
            r.witness = u;
        }
    }
    if (r.margin > opts.tol_h4) {
        r.verdict = Verdict::fail;
        r.note = "grad zeta . F does not vanish on the singular set";
    } else {
        r.witness.reset();
    }
    return r;
}

// ---------------------------------------------------------------------------
// h5: G = 0 at equilibria on S

namespace detail {

// Gauss-Newton refinement of |F|^2 restricted to S, keeping iterates on S.
inline bool refine_equilibrium_on_S(const SystemSpec& spec, Vec& u, double tol_eq, double tol_S) {
    for (int it = 0; it < 40; ++it) {
        const Vec f = spec.F(u);
        if (f.norm() <= tol_eq) return project_onto_S(spec, u, tol_S);
        const Mat J = spec.jacobian_F(u);
        Vec step = J.colPivHouseholderQr().solve(-f);
        const Vec g = spec.gradient_zeta(u);
        const double gn2 = g.squaredNorm();
        if (gn2 > 1e-24) step -= (g.dot(step) / gn2) * g;  // stay tangent to S
        if (step.norm() < 1e-15) break;
        u += step;
        if (!project_onto_S(spec, u, tol_S)) return false;
    }
    return spec.F(u).norm() <= tol_eq && std::abs(spec.zeta(u)) <= tol_S;
}

}  // namespace detail

// Equilibria of F on the singular set near the sampled region: refined from
// the S-samples, always including the distinguished origin.
inline std::vector<Vec> equilibria_on_S(const SystemSpec& spec, const std::vector<Vec>& s_samples,
                                        const HypothesisOptions& opts = {}) {
    std::vector<Vec> eqs;
    eqs.push_back(spec.origin);
    for (Vec u : s_samples) {
        if (spec.F(u).norm() > opts.tol_eq) {
            if (!detail::refine_equilibrium_on_S(spec, u, opts.tol_eq, opts.tol_S)) continue;
        }
        bool dup = false;
        for (const Vec& v : eqs)
            if ((u - v).norm() < 1e-8 * (1.0 + v.norm())) {
                dup = true;
                break;
            }
        if (!dup) eqs.push_back(std::move(u));
    }
    return eqs;
}

inline HypothesisResult check_h5(const SystemSpec& spec, const std::vector<Vec>& s_samples,
                                 const HypothesisOptions& opts = {}) {
    HypothesisResult r;
    r.verdict = Verdict::pass;
    for (const Vec& u : equilibria_on_S(spec, s_samples, opts)) {
        const double g = std::abs(extended_G(spec, u, opts));
        if (g > opts.tol_h5 && g > r.margin) r.witness = u;
        r.margin = std::max(r.margin, g);
    }
    if (r.margin > opts.tol_h5) {
        r.verdict = Verdict::fail;
        r.note = "extended quotient G does not vanish at an equilibrium on S";
    } else {
        r.witness.reset();
    }
    return r;
}

// ---------------------------------------------------------------------------
// h3: equilibrium manifold transversal to S

inline HypothesisResult check_h3(const SystemSpec& spec, const EquilibriumManifold& eq,
                                 const Box& box, const HypothesisOptions& opts = {}) {
    // Newton on zeta(param(s)) = 0 from a parameter grid.
    Box pbox;
    pbox.center = Vec::Zero(eq.dimension);
    pbox.half_width = box.half_width;
    std::vector<Vec> intersections;
    for (Vec s : detail::grid_seeds(pbox, 128)) {
        auto zp = [&](const Vec& p) { return spec.zeta(eq.parameterization(p)); };
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            const double z = zp(s);
            if (std::abs(z) <= opts.tol_S) {
                ok = true;
                break;
            }
            const Vec g = fd_gradient(zp, s);
            const double gn2 = g.squaredNorm();
            if (gn2 <= 1e-24) break;
            s -= (z / gn2) * g;
        }
        if (!ok || s.lpNorm<Eigen::Infinity>() > 2.0 * box.half_width) continue;
        bool dup = false;
        for (const Vec& t : intersections)
            if ((s - t).norm() < 1e-8) {
                dup = true;
                break;
            }
        if (!dup) intersections.push_back(std::move(s));
    }
    if (intersections.empty())
        throw NoIntersection("check_h3: no intersection of the equilibrium manifold with S "
                             "found in the box");

    HypothesisResult r;
    r.verdict = Verdict::pass;
    r.margin = std::numeric_limits<double>::infinity();
    const int d = spec.dim;
    for (const Vec& s : intersections) {
        const Vec u = eq.parameterization(s);
        const Mat Teq = eq.tangents(s);
        const Vec g = spec.gradient_zeta(u).normalized();
        const Mat Ts = orthogonal_complement(g);  // tangent of S = ker grad zeta
        Mat stacked(d, Teq.cols() + Ts.cols());
        stacked.leftCols(Teq.cols()) = Teq;
        stacked.rightCols(Ts.cols()) = Ts;
        Eigen::JacobiSVD<Mat> svd(stacked);
        const double ratio = svd.singularValues()[d - 1] / svd.singularValues()[0];
        if (ratio < r.margin) {
            r.margin = ratio;
            if (ratio < opts.tol_rank) {
                r.witness = u;
                r.verdict = Verdict::fail;
                r.note = "tangent spaces of the equilibrium manifold and S do not span";
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// h2: M^c cap S consists of equilibria

inline HypothesisResult check_h2(const SystemSpec& spec, const TaylorManifold& cm,
                                 const HypothesisOptions& opts = {}) {
    HypothesisResult r;
    if (cm.graph_dim() == 0) {
        r.verdict = Verdict::pass;
        r.note = "vacuous: trivial center subspace";
        return r;
    }
    const double radius = std::min(1e-3, cm.validity_radius > 0 ? cm.validity_radius : 1e-3);
    const auto slice = manifold_singular_slice(spec, cm, radius, 24, opts.seed);
    if (slice.empty()) {
        r.verdict = Verdict::inconclusive;
        r.note = "no intersection of the center manifold with S found";
        return r;
    }
    r.verdict = Verdict::pass;
    for (const Vec& x : slice) {
        const Vec u = cm.lift(x);
        const double fn = spec.F(u).norm() / (1.0 + (u - cm.base).norm());
        if (fn > opts.tol_h2 && fn > r.margin) r.witness = u;
        r.margin = std::max(r.margin, fn);
    }
    if (r.margin > opts.tol_h2) {
        r.verdict = Verdict::fail;
        r.note = "F does not vanish on the intersection of the center manifold with S";
    } else {
        r.witness.reset();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Full audit

// Runs the five checks in dependency order. A missing equilibrium manifold
// leaves h3 inconclusive; an h4 failure leaves h5 inconclusive (its
// precondition); h2 uses a center manifold built here (vacuous pass when the
// center subspace is trivial).
inline HypothesisReport audit_system(const SystemSpec& spec,
                                     const EquilibriumManifold* eq = nullptr,
                                     const HypothesisOptions& opts = {}) {
    HypothesisReport rep;
    rep.h1 = check_h1(spec, opts);
    if (rep.h1.verdict != Verdict::pass) {
        const std::string note = "h1 failed: the singular set need not be a manifold";
        rep.h2.note = rep.h3.note = rep.h4.note = rep.h5.note = note;
        return rep;
    }

    Box box{spec.origin, opts.box_half_width};
    try {
        rep.s_samples = sample_singular_set(spec, box, opts.min_samples, opts);
    } catch (const SeedingFailed& e) {
        rep.h4.note = rep.h5.note = e.what();
        return rep;
    }

    rep.h4 = check_h4(spec, rep.s_samples, opts);
    if (rep.h4.verdict == Verdict::pass) {
        try {
            rep.h5 = check_h5(spec, rep.s_samples, opts);
        } catch (const ExtensionUndefined& e) {
            rep.h5.verdict = Verdict::inconclusive;
            rep.h5.note = e.what();
        }
    } else {
        rep.h5.note = "h4 failed: the extension of G on S is not defined";
    }

    if (eq) {
        try {
            rep.h3 = check_h3(spec, *eq, box, opts);
        } catch (const NoIntersection& e) {
            rep.h3.verdict = Verdict::inconclusive;
            rep.h3.note = e.what();
        }
    } else {
        rep.h3.note = "no equilibrium manifold provided";
    }

    try {
        ManifoldOptions mopts;
        mopts.tol_center = 1e-8;
        const TaylorManifold cm = center_manifold(spec, opts.center_order, mopts);
        rep.h2 = check_h2(spec, cm, opts);
    } catch (const NoCenterDirections&) {
        rep.h2.verdict = Verdict::pass;
        rep.h2.note = "vacuous: trivial center subspace";
    } catch (const Error& e) {
        rep.h2.verdict = Verdict::inconclusive;
        rep.h2.note = e.what();
    }
    return rep;
}

}  // namespace singode
