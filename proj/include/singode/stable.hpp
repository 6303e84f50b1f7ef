// Uniformly stable manifold relative to an equilibrium manifold E: a family
// of Taylor fibers over a curve of base equilibria, each fiber tangent to the
// stable subspace of the local desingularized linearization, validated by
// forward integration in the rescaled time.
#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "singode/hypotheses.hpp"
#include "singode/integrate.hpp"
#include "singode/manifolds.hpp"

namespace singode {

struct StableFiber {
    double param = 0.0;  // coordinate along the sampled base curve
    Vec base;
    double zeta_base = 0.0;
    TaylorManifold fiber;  // graph over the stable subspace at `base`
    Mat base_tangents;     // tangent space of the equilibrium manifold at base
    std::vector<std::complex<double>> eigenvalues;  // stable spectrum (tau-time)
    double decay_rate = 0.0;   // min |Re lambda| in tau
    double fitted_rate = 0.0;  // measured from the validation orbit

    // Exponential rates in the original time t scale with 1/zeta at the base.
    std::vector<double> rates_in_t() const {
        std::vector<double> r;
        for (const auto& lam : eigenvalues) r.push_back(std::abs(lam.real()) / zeta_base);
        return r;
    }
};

struct StableFiberBundle {
    std::vector<StableFiber> fibers;
    int fiber_dim = 0;
    // Base-curve parameter where the stable dimension changed and fiber
    // construction stopped (degenerate boundary of the bundle).
    std::optional<double> boundary_param;

    const StableFiber& nearest(const Vec& u) const {
        if (fibers.empty()) throw Error("StableFiberBundle: empty bundle");
        size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < fibers.size(); ++i) {
            const double d = (u - fibers[i].base).norm();
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        return fibers[best];
    }

    // Distance from u to the sampled bundle graph: graph defect of the
    // nearest fiber, with the equilibrium-manifold directions modded out
    // (the bundle sweeps its fibers along E).
    double distance(const Vec& u) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& f : fibers) {
            const Vec rel = u - f.base;
            const Vec x = f.fiber.domain.transpose() * rel;
            const Vec y = f.fiber.codomain.transpose() * rel;
            Vec r = f.fiber.codomain * (y - f.fiber.graph_value(x));
            if (f.base_tangents.cols() > 0) {
                const Mat T = f.base_tangents.householderQr().householderQ() *
                              Mat::Identity(r.size(), f.base_tangents.cols());
                r -= T * (T.transpose() * r);
            }
            best = std::min(best, r.norm());
        }
        return best;
    }
};

struct StableManifoldOptions {
    double param_max = 0.1;   // base curve sampled on [0, param_max]
    int order = 2;
    double tol_center = 1e-8;
    bool validate = true;
    double validation_amplitude = 1e-3;
    double fit_window_lo = 0.5;  // tau window for the decay fit
    double fit_window_hi = 3.0;
    double slack = 0.2;
    ManifoldOptions manifold;
};

namespace detail {

inline double fit_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const size_t n = xs.size();
    if (n < 2) throw Error("fit_log_slope: need >= 2 points");
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double num = 0, den = 0;
    for (size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

inline double validate_fiber_decay(const SystemSpec& spec, const StableFiber& f,
                                   const StableManifoldOptions& opts) {
    const int k = f.fiber.graph_dim();
    Vec x0 = Vec::Constant(k, opts.validation_amplitude / std::sqrt(double(k)));
    const Vec u0 = f.fiber.lift(x0);
    IntegrationOptions iopts;
    iopts.rtol = 1e-11;
    iopts.atol = 1e-14;
    Trajectory orbit = integrate_desingularized(spec, u0, opts.fit_window_hi + 0.5, iopts);
    std::vector<double> taus, logd;
    for (const auto& s : orbit.samples) {
        if (s.tau < opts.fit_window_lo || s.tau > opts.fit_window_hi) continue;
        const double d = (s.u - f.base).norm();
        if (d <= 1e-14) continue;
        taus.push_back(s.tau);
        logd.push_back(std::log(d));
    }
    if (taus.size() < 4) throw ValidationFailure("fiber validation: too few usable samples");
    const double slope = fit_log_slope(taus, logd);
    if (slope > -f.decay_rate * (1.0 - opts.slack))
        throw ValidationFailure("fiber decay slope " + std::to_string(slope) +
                                " contradicts predicted rate " + std::to_string(f.decay_rate));
    return slope;
}

}  // namespace detail

// Constructs the fiber bundle over the equilibrium curve through the origin.
// Base points are sampled along the direction of eq's parameter block that is
// transverse to S (so the base zeta ranges over [0, ~param_max]); the sample
// at zeta = 0 probes the boundary. Construction walks from the outermost
// point inwards and stops (recording the boundary) when the stable dimension
// changes.
inline StableFiberBundle uniformly_stable_manifold(const SystemSpec& spec,
                                                   const EquilibriumManifold& eq, int n_base,
                                                   const StableManifoldOptions& opts = {}) {
    if (n_base < 1) throw Error("uniformly_stable_manifold: n_base must be >= 1");

    // Direction in parameter space along which zeta varies.
    auto zeta_of_param = [&](const Vec& p) { return spec.zeta(eq.parameterization(p)); };
    Vec dir = fd_gradient(zeta_of_param, Vec::Zero(eq.dimension));
    const double dn = dir.norm();
    if (dn <= 1e-12)
        throw Error("uniformly_stable_manifold: zeta does not vary along the equilibrium "
                    "manifold parameters");
    dir /= dn;

    std::vector<double> params;
    for (int i = n_base; i >= 0; --i) params.push_back(opts.param_max * i / n_base);

    StableFiberBundle bundle;
    for (double s : params) {
        const Vec base = eq.parameterization(s * dir);
        const Mat A = spec.jacobian_F(base);
        const SpectralSplit split = spectral_split(A, opts.tol_center);
        const int dim = static_cast<int>(split.stable.cols());
        if (bundle.fibers.empty()) {
            if (dim == 0)
                throw NoStableDirections("uniformly_stable_manifold: no stable directions at "
                                         "the outermost base point");
            bundle.fiber_dim = dim;
        } else if (dim != bundle.fiber_dim) {
            bundle.boundary_param = s;
            break;
        }

        StableFiber f;
        f.param = s;
        f.base = base;
        f.zeta_base = spec.zeta(base);
        f.base_tangents = eq.tangents(s * dir);
        f.eigenvalues = split.stable_eigs;
        f.decay_rate = std::numeric_limits<double>::infinity();
        for (const auto& lam : f.eigenvalues)
            f.decay_rate = std::min(f.decay_rate, std::abs(lam.real()));
        f.fiber = graph_manifold(spec, base, split.stable, opts.order, opts.manifold);
        if (opts.validate) f.fitted_rate = detail::validate_fiber_decay(spec, f, opts);
        bundle.fibers.push_back(std::move(f));
    }
    return bundle;
}

}  // namespace singode
