// Sparse multivariate polynomials over double. Small-scale workhorse for the
// Taylor machinery: exact composition with affine maps and with polynomial
// graphs, partial derivatives, graded truncation. Term order is the map's
// lexicographic exponent order, so iteration (and serialization) is
// deterministic.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "singode/errors.hpp"

namespace singode {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using Exponents = std::vector<int>;

inline int total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

class MultiPoly {
  public:
    MultiPoly() = default;
    explicit MultiPoly(int nvars) : nvars_(nvars) {}

    static MultiPoly constant(int nvars, double c) {
        MultiPoly p(nvars);
        if (c != 0.0) p.terms_[Exponents(nvars, 0)] = c;
        return p;
    }

    static MultiPoly variable(int nvars, int index, double coeff = 1.0) {
        MultiPoly p(nvars);
        Exponents e(nvars, 0);
        e[index] = 1;
        if (coeff != 0.0) p.terms_[e] = coeff;
        return p;
    }

    int nvars() const { return nvars_; }
    bool empty() const { return terms_.empty(); }
    const std::map<Exponents, double>& terms() const { return terms_; }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
        return d;
    }

    void add_term(const Exponents& e, double c) {
        if (c == 0.0) return;
        double& slot = terms_[e];
        slot += c;
        if (slot == 0.0) terms_.erase(e);
    }

    double coeff(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? 0.0 : it->second;
    }

    double eval(const Vec& x) const {
        double sum = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = c;
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) t *= x[i];
            sum += t;
        }
        return sum;
    }

    MultiPoly& operator+=(const MultiPoly& other) {
        for (const auto& [e, c] : other.terms_) add_term(e, c);
        return *this;
    }

    MultiPoly& operator-=(const MultiPoly& other) {
        for (const auto& [e, c] : other.terms_) add_term(e, -c);
        return *this;
    }

    MultiPoly& operator*=(double s) {
        if (s == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(MultiPoly a, double s) { return a *= s; }
    friend MultiPoly operator*(double s, MultiPoly a) { return a *= s; }

    // Product, optionally truncated at max_degree (-1 = exact).
    MultiPoly mul(const MultiPoly& other, int max_degree = -1) const {
        MultiPoly out(nvars_);
        Exponents e(nvars_);
        for (const auto& [ea, ca] : terms_) {
            const int da = total_degree(ea);
            for (const auto& [eb, cb] : other.terms_) {
                if (max_degree >= 0 && da + total_degree(eb) > max_degree) continue;
                for (int i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
                out.add_term(e, ca * cb);
            }
        }
        return out;
    }

    MultiPoly pow(int n, int max_degree = -1) const {
        MultiPoly out = constant(nvars_, 1.0);
        for (int k = 0; k < n; ++k) out = out.mul(*this, max_degree);
        return out;
    }

    MultiPoly derivative(int var) const {
        MultiPoly out(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponents d = e;
            d[var] -= 1;
            out.add_term(d, c * e[var]);
        }
        return out;
    }

    Vec gradient_at(const Vec& x) const {
        Vec g(nvars_);
        for (int i = 0; i < nvars_; ++i) g[i] = derivative(i).eval(x);
        return g;
    }

    MultiPoly truncated(int max_degree) const {
        MultiPoly out(nvars_);
        for (const auto& [e, c] : terms_)
            if (total_degree(e) <= max_degree) out.add_term(e, c);
        return out;
    }

    // Keep only terms with total degree exactly n.
    MultiPoly homogeneous_part(int n) const {
        MultiPoly out(nvars_);
        for (const auto& [e, c] : terms_)
            if (total_degree(e) == n) out.add_term(e, c);
        return out;
    }

    // Substitute each original variable i by args[i], a polynomial in a common
    // new variable set. Exact unless max_degree >= 0.
    MultiPoly substitute(const std::vector<MultiPoly>& args, int max_degree = -1) const {
        if (static_cast<int>(args.size()) != nvars_)
            throw Error("MultiPoly::substitute: wrong argument count");
        const int m = args.empty() ? 0 : args[0].nvars();
        MultiPoly out(m);
        for (const auto& [e, c] : terms_) {
            MultiPoly term = MultiPoly::constant(m, c);
            for (int i = 0; i < nvars_ && !term.empty(); ++i)
                if (e[i] > 0) term = term.mul(args[i].pow(e[i], max_degree), max_degree);
            out += term;
        }
        return out;
    }

  private:
    int nvars_ = 0;
    std::map<Exponents, double> terms_;
};

using PolyVec = std::vector<MultiPoly>;

// Affine substitution U = c + A w applied to a polynomial in U; the result is
// a polynomial in w with the same total degree.
inline MultiPoly substitute_affine(const MultiPoly& p, const Vec& c, const Mat& A) {
    const int m = static_cast<int>(A.cols());
    std::vector<MultiPoly> args;
    args.reserve(p.nvars());
    for (int i = 0; i < p.nvars(); ++i) {
        MultiPoly ai = MultiPoly::constant(m, c[i]);
        for (int j = 0; j < m; ++j) ai += MultiPoly::variable(m, j, A(i, j));
        args.push_back(std::move(ai));
    }
    return p.substitute(args);
}

inline PolyVec substitute_affine(const PolyVec& F, const Vec& c, const Mat& A) {
    PolyVec out;
    out.reserve(F.size());
    for (const auto& p : F) out.push_back(substitute_affine(p, c, A));
    return out;
}

inline Vec eval(const PolyVec& F, const Vec& x) {
    Vec y(static_cast<int>(F.size()));
    for (size_t i = 0; i < F.size(); ++i) y[static_cast<int>(i)] = F[i].eval(x);
    return y;
}

inline Mat jacobian_at(const PolyVec& F, const Vec& x) {
    const int n = static_cast<int>(F.size());
    const int m = F.empty() ? 0 : F[0].nvars();
    Mat J(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) J(i, j) = F[i].derivative(j).eval(x);
    return J;
}

}  // namespace singode
