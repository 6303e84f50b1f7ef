// SystemSpec: a singular ODE instance dU/dt = F(U)/zeta(U). Evaluators for F
// and zeta are mandatory; first/second derivative data fall back to central
// finite differences. Systems with polynomial right-hand sides can attach the
// polynomials, which makes every derivative (and Taylor expansions) exact.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "singode/fd.hpp"
#include "singode/poly.hpp"

namespace singode {

struct SystemSpec {
    int dim = 0;
    VectorFn F;
    ScalarFn zeta;
    Vec origin;  // distinguished state with F = 0, zeta = 0

    // Optional analytic derivative data; finite differences otherwise.
    std::function<Mat(const Vec&)> jacF;
    std::function<Vec(const Vec&)> grad_zeta;
    // Gradient of the scalar U -> grad_zeta(U) . F(U); this is the
    // second-derivative data needed by the transverse quotient machinery.
    std::function<Vec(const Vec&)> grad_zeta_dot_F;

    // Exact polynomial backend, when the right-hand side is polynomial.
    std::optional<PolyVec> poly_F;
    std::optional<MultiPoly> poly_zeta;

    std::string name;

    bool has_poly() const { return poly_F.has_value() && poly_zeta.has_value(); }

    Mat jacobian_F(const Vec& u) const {
        if (jacF) return jacF(u);
        return fd_jacobian(F, u);
    }

    Vec gradient_zeta(const Vec& u) const {
        if (grad_zeta) return grad_zeta(u);
        return fd_gradient(zeta, u);
    }

    double zeta_dot_F(const Vec& u) const { return gradient_zeta(u).dot(F(u)); }

    Vec gradient_zeta_dot_F(const Vec& u) const {
        if (grad_zeta_dot_F) return grad_zeta_dot_F(u);
        return fd_gradient([this](const Vec& x) { return zeta_dot_F(x); }, u);
    }

    // Taylor expansion of F around `base` to total degree `order`, in the
    // displacement variable. Exact for polynomial systems.
    PolyVec taylor_F(const Vec& base, int order) const {
        if (poly_F) {
            Mat id = Mat::Identity(dim, dim);
            PolyVec shifted = substitute_affine(*poly_F, base, id);
            PolyVec out;
            out.reserve(shifted.size());
            for (const auto& p : shifted) out.push_back(p.truncated(order));
            return out;
        }
        return fd_taylor_field(F, base, order);
    }
};

// Build a SystemSpec from polynomial data; all derivative hooks become exact.
inline SystemSpec make_poly_system(PolyVec F_polys, MultiPoly zeta_poly, Vec origin,
                                   std::string name = {}) {
    SystemSpec s;
    s.dim = static_cast<int>(F_polys.size());
    s.origin = std::move(origin);
    s.name = std::move(name);

    auto Fp = std::make_shared<PolyVec>(std::move(F_polys));
    auto zp = std::make_shared<MultiPoly>(std::move(zeta_poly));

    s.F = [Fp](const Vec& u) { return eval(*Fp, u); };
    s.zeta = [zp](const Vec& u) { return zp->eval(u); };
    s.jacF = [Fp](const Vec& u) { return jacobian_at(*Fp, u); };
    s.grad_zeta = [zp](const Vec& u) { return zp->gradient_at(u); };

    // grad of (grad zeta . F), computed once symbolically.
    MultiPoly zf(s.dim);
    for (int i = 0; i < s.dim; ++i) zf += zp->derivative(i).mul((*Fp)[i]);
    auto zfp = std::make_shared<MultiPoly>(std::move(zf));
    s.grad_zeta_dot_F = [zfp](const Vec& u) { return zfp->gradient_at(u); };

    s.poly_F = *Fp;
    s.poly_zeta = *zp;
    return s;
}

struct SpecValidation {
    double origin_F_norm = 0.0;
    double origin_zeta = 0.0;
    double max_jac_mismatch = 0.0;   // analytic vs FD Jacobian of F
    double max_grad_mismatch = 0.0;  // analytic vs FD gradient of zeta
    bool ok = false;
};

// Checks the SystemSpec invariants: F and zeta vanish at the origin, and any
// analytic derivatives agree with finite differences at the sampled points.
inline SpecValidation validate(const SystemSpec& spec, const std::vector<Vec>& samples = {},
                               double tol_eq = 1e-8, double tol_fd = 1e-4) {
    SpecValidation v;
    v.origin_F_norm = spec.F(spec.origin).norm();
    v.origin_zeta = std::abs(spec.zeta(spec.origin));
    for (const Vec& u : samples) {
        if (spec.jacF) {
            const Mat diff = spec.jacF(u) - fd_jacobian(spec.F, u);
            v.max_jac_mismatch = std::max(v.max_jac_mismatch, diff.cwiseAbs().maxCoeff());
        }
        if (spec.grad_zeta) {
            const Vec diff = spec.grad_zeta(u) - fd_gradient(spec.zeta, u);
            v.max_grad_mismatch = std::max(v.max_grad_mismatch, diff.cwiseAbs().maxCoeff());
        }
    }
    v.ok = v.origin_F_norm <= tol_eq && v.origin_zeta <= tol_eq && v.max_jac_mismatch <= tol_fd &&
           v.max_grad_mismatch <= tol_fd;
    return v;
}

// F(U)/zeta(U). Throws SingularEvaluation when |zeta| <= eps_zeta.
inline Vec eval_singular_rhs(const SystemSpec& spec, const Vec& u, double eps_zeta = 1e-12) {
    const double z = spec.zeta(u);
    if (std::abs(z) <= eps_zeta)
        throw SingularEvaluation("eval_singular_rhs: |zeta(U)| <= " + std::to_string(eps_zeta) +
                                 " (state on or near the singular set)");
    return spec.F(u) / z;
}

// Right-hand side after the time rescaling d_tau = dt/zeta: just F(U).
inline Vec desingularized_rhs(const SystemSpec& spec, const Vec& u) { return spec.F(u); }

}  // namespace singode
