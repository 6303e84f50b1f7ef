// Central finite differences: gradients, Jacobians, and multivariate Taylor
// extraction up to third order. Step sizes follow the usual optimal-h
// heuristics scaled by (1 + |x|).
#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "singode/poly.hpp"

namespace singode {

using ScalarFn = std::function<double(const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;

inline double fd_step(const Vec& x, double exponent = 1.0 / 3.0) {
    const double eps = std::numeric_limits<double>::epsilon();
    return std::pow(eps, exponent) * (1.0 + x.norm());
}

inline Vec fd_gradient(const ScalarFn& f, const Vec& x, double h = 0.0) {
    if (h <= 0.0) h = fd_step(x);
    Vec g(x.size());
    Vec xp = x, xm = x;
    for (int i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

inline Mat fd_jacobian(const VectorFn& f, const Vec& x, double h = 0.0) {
    if (h <= 0.0) h = fd_step(x);
    const Vec f0 = f(x);
    Mat J(f0.size(), x.size());
    Vec xp = x, xm = x;
    for (int j = 0; j < x.size(); ++j) {
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
        xp[j] = x[j];
        xm[j] = x[j];
    }
    return J;
}

// Directional derivative d/ds f(x + s v) at s = 0.
inline double fd_directional(const ScalarFn& f, const Vec& x, const Vec& v, double h = 0.0) {
    if (h <= 0.0) h = fd_step(x);
    return (f(x + h * v) - f(x - h * v)) / (2.0 * h);
}

namespace detail {

// Mixed partial d^|alpha| f / dx^alpha by nested central differences.
// |alpha| <= 3. Step chosen per derivative order.
inline double fd_partial(const ScalarFn& f, const Vec& x, const Exponents& alpha) {
    const int order = total_degree(alpha);
    if (order == 0) return f(x);
    int var = -1;
    for (int i = 0; i < static_cast<int>(alpha.size()); ++i)
        if (alpha[i] > 0) {
            var = i;
            break;
        }
    // Balance truncation vs roundoff: eps^(1/(order+2)).
    const double h = fd_step(x, 1.0 / (order + 2));
    Exponents rest = alpha;
    rest[var] -= 1;
    Vec xp = x, xm = x;
    xp[var] += h;
    xm[var] -= h;
    if (total_degree(rest) == 0) return (f(xp) - f(xm)) / (2.0 * h);
    return (fd_partial(f, xp, rest) - fd_partial(f, xm, rest)) / (2.0 * h);
}

inline void enumerate_exponents(int nvars, int max_degree, Exponents& cur, int pos, int left,
                                std::vector<Exponents>& out) {
    if (pos == nvars) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= left; ++k) {
        cur[pos] = k;
        enumerate_exponents(nvars, max_degree, cur, pos + 1, left - k, out);
    }
    cur[pos] = 0;
}

}  // namespace detail

inline std::vector<Exponents> exponents_up_to(int nvars, int max_degree) {
    std::vector<Exponents> out;
    Exponents cur(nvars, 0);
    detail::enumerate_exponents(nvars, max_degree, cur, 0, max_degree, out);
    return out;
}

// Taylor polynomial of a scalar function around `base`, degree <= order (<= 3
// for the finite-difference path). Coefficients are partials / alpha!.
inline MultiPoly fd_taylor(const ScalarFn& f, const Vec& base, int order) {
    if (order > 3) throw Error("fd_taylor: finite-difference extraction limited to order 3");
    MultiPoly p(static_cast<int>(base.size()));
    for (const auto& alpha : exponents_up_to(static_cast<int>(base.size()), order)) {
        double fact = 1.0;
        for (int a : alpha)
            for (int k = 2; k <= a; ++k) fact *= k;
        const double c = detail::fd_partial(f, base, alpha) / fact;
        if (std::abs(c) > 0.0) p.add_term(alpha, c);
    }
    return p;
}

inline PolyVec fd_taylor_field(const VectorFn& F, const Vec& base, int order) {
    const int d = static_cast<int>(F(base).size());
    PolyVec out;
    out.reserve(d);
    for (int i = 0; i < d; ++i)
        out.push_back(fd_taylor([&F, i](const Vec& x) { return F(x)[i]; }, base, order));
    return out;
}

}  // namespace singode
