// Monitored integration of the singular ODE dU/dt = F(U)/zeta(U) and of its
// desingularized companion dU/dtau = F(U). Embedded Dormand-Prince 5(4)
// stepping with PI step control; the rescaled time is carried as an extra
// state. Stiffness near the singular set is handled by termination, not by
// implicit stepping.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "singode/system.hpp"
#include "singode/trajectory.hpp"

namespace singode {

struct IntegrationOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;  // 0 = choose automatically
    double h_min = 0.0;   // 0 = 16 eps max(1, |t_end|)
    double h_max = 0.0;   // 0 = horizon / 10
    long max_steps = 4'000'000;

    // Fixed-step mode (no error control); used by order studies.
    double fixed_step = 0.0;

    // Singular-set monitoring.
    double eps_zeta = 1e-12;    // hard floor for |zeta|
    double eps_blowup = 1e-8;   // blow-up flagged when |F|/zeta > 1/eps_blowup
    double singular_trigger = 1e-6;  // soft trigger, scaled by (1 + |zeta(U0)|)

    // Equilibrium detection: |F|/max(zeta, eps_zeta) < tol_eq over 5 steps.
    double tol_eq = 1e-10;
    int eq_steps = 5;
};

namespace detail {

// Dormand-Prince RK5(4) tableau.
struct Dopri5 {
    static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    };
    // 5th order weights equal a[6]; 4th order embedded weights below.
    static constexpr double b4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                                     -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

using RhsFn = std::function<Vec(const Vec&)>;

struct StepResult {
    Vec y;
    double err = 0.0;  // scaled error estimate
};

inline StepResult dopri5_step(const RhsFn& rhs, const Vec& y0, double h, double rtol, double atol) {
    const int n = static_cast<int>(y0.size());
    std::vector<Vec> k(7);
    k[0] = rhs(y0);
    Vec yi(n);
    for (int s = 1; s < 7; ++s) {
        yi = y0;
        for (int j = 0; j < s; ++j)
            if (Dopri5::a[s][j] != 0.0) yi += (h * Dopri5::a[s][j]) * k[j];
        k[s] = rhs(yi);
    }
    StepResult r;
    r.y = y0;
    for (int j = 0; j < 6; ++j)
        if (Dopri5::a[6][j] != 0.0) r.y += (h * Dopri5::a[6][j]) * k[j];
    // k[6] = rhs at the 5th order solution; embedded difference.
    Vec y4 = y0;
    for (int j = 0; j < 7; ++j)
        if (Dopri5::b4[j] != 0.0) y4 += (h * Dopri5::b4[j]) * k[j];
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(r.y[i]));
        const double e = (r.y[i] - y4[i]) / sc;
        err += e * e;
    }
    r.err = std::sqrt(err / n);
    return r;
}

enum class StepVerdict { cont, stop };

// Generic adaptive driver on an augmented state. `on_accept` inspects each
// accepted step; `on_underflow` classifies a step-size underflow.
struct Driver {
    RhsFn rhs;
    double t = 0.0;
    Vec y;
    double t_end = 0.0;
    IntegrationOptions opts;

    std::function<StepVerdict(double, const Vec&)> on_accept;
    std::function<void(double, const Vec&)> on_underflow;  // must throw or record

    void run() {
        const double span = t_end - t;
        if (span <= 0.0) return;
        double h_max = opts.h_max > 0.0 ? opts.h_max : span / 10.0;
        const double h_floor = opts.h_min > 0.0
                                   ? opts.h_min
                                   : 16.0 * std::numeric_limits<double>::epsilon() *
                                         std::max(1.0, std::abs(t_end));
        double h = opts.fixed_step > 0.0 ? opts.fixed_step
                                         : (opts.h_init > 0.0 ? opts.h_init : span / 100.0);
        h = std::min(h, h_max);

        for (long step = 0; step < opts.max_steps; ++step) {
            if (t >= t_end) return;
            bool clipped = false;
            if (t + h >= t_end) {
                h = t_end - t;
                clipped = true;
            }
            StepResult r = dopri5_step(rhs, y, h, opts.rtol, opts.atol);
            const bool accept = opts.fixed_step > 0.0 || r.err <= 1.0;
            if (accept) {
                t += h;
                y = r.y;
                if (on_accept(t, y) == StepVerdict::stop) return;
            }
            if (opts.fixed_step > 0.0) continue;
            // PI-flavoured resize with the usual clamps.
            double fac = 0.9 * std::pow(std::max(r.err, 1e-10), -0.2);
            fac = std::clamp(fac, 0.2, 5.0);
            if (!std::isfinite(r.err)) fac = 0.2;
            h = std::min(h * fac, h_max);
            if (!accept && !clipped && h < h_floor) {
                on_underflow(t, y);
                return;
            }
            h = std::max(h, h_floor);
        }
        throw StepFailure("integration exceeded max_steps");
    }
};

}  // namespace detail

namespace detail {

inline Sample make_sample(const SystemSpec& spec, double t, double tau, const Vec& u,
                          double eps_zeta) {
    Sample s;
    s.t = t;
    s.tau = tau;
    s.u = u;
    s.zeta = spec.zeta(u);
    s.rhs_norm = spec.F(u).norm() / std::max(std::abs(s.zeta), eps_zeta);
    return s;
}

}  // namespace detail

// Integrates dU/dt = F(U)/zeta(U) from U0 with zeta(U0) > 0, co-integrating
// tau via dtau/dt = 1/zeta. Terminates at the horizon, at a detected
// singularity (with the singular time refined by extrapolating zeta^2, which
// decays linearly in t to first order), or at an equilibrium.
// When `record_times` is non-null, samples are emitted exactly at those times
// instead of at every accepted step.
inline Trajectory integrate_singular(const SystemSpec& spec, const Vec& u0, double horizon,
                                     const IntegrationOptions& opts = {},
                                     const std::vector<double>* record_times = nullptr) {
    const double zeta0 = spec.zeta(u0);
    if (zeta0 <= 0.0)
        throw InvalidInitialState("integrate_singular: zeta(U0) <= 0 (got " +
                                  std::to_string(zeta0) + ")");

    Trajectory traj;
    traj.samples.push_back(detail::make_sample(spec, 0.0, 0.0, u0, opts.eps_zeta));

    const double trigger = std::max(opts.eps_zeta, opts.singular_trigger * (1.0 + std::abs(zeta0)));
    const int d = spec.dim;

    detail::Driver drv;
    drv.opts = opts;
    drv.t_end = horizon;
    drv.y = Vec(d + 1);
    drv.y.head(d) = u0;
    drv.y[d] = 0.0;  // tau

    drv.rhs = [&spec, &opts, d](const Vec& y) {
        const Vec u = y.head(d);
        const double z = spec.zeta(u);
        if (std::abs(z) <= opts.eps_zeta)
            throw SingularEvaluation("rhs evaluation inside the singular floor");
        Vec dy(d + 1);
        dy.head(d) = spec.F(u) / z;
        dy[d] = 1.0 / z;
        return dy;
    };

    int eq_run = 0;
    auto classify_singular = [&](double t, const Vec& y) {
        const Vec u = y.head(d);
        const double z = spec.zeta(u);
        const double s = spec.zeta_dot_F(u);  // d(zeta^2)/dt = 2 s along orbits
        traj.termination = Termination::singularity_reached;
        if (s < 0.0) {
            traj.t_star = t + z * z / (-2.0 * s);
            traj.tau_star = y[d] + z / (-s);
        } else {
            traj.t_star = t;
            traj.tau_star = y[d];
        }
    };

    bool done = false;
    drv.on_accept = [&](double t, const Vec& y) {
        const Vec u = y.head(d);
        Sample s = detail::make_sample(spec, t, y[d], u, opts.eps_zeta);
        if (!record_times) traj.samples.push_back(s);
        if (s.zeta <= opts.eps_zeta ||
            (s.zeta <= trigger && spec.zeta_dot_F(u) < 0.0) ||
            s.rhs_norm > 1.0 / opts.eps_blowup) {
            classify_singular(t, y);
            done = true;
            return detail::StepVerdict::stop;
        }
        eq_run = s.rhs_norm < opts.tol_eq ? eq_run + 1 : 0;
        if (eq_run >= opts.eq_steps) {
            traj.termination = Termination::equilibrium_reached;
            done = true;
            return detail::StepVerdict::stop;
        }
        return detail::StepVerdict::cont;
    };
    drv.on_underflow = [&](double t, const Vec& y) {
        const Vec u = y.head(d);
        const double z = spec.zeta(u);
        if (spec.zeta_dot_F(u) < 0.0 && z <= 1e-3 * (1.0 + std::abs(zeta0))) {
            classify_singular(t, y);
            done = true;
            return;
        }
        throw StepFailure("integrate_singular: step size underflow at t = " + std::to_string(t));
    };

    if (record_times && !record_times->empty()) {
        // Land exactly on every requested time by splitting the run.
        double t_prev = 0.0;
        for (double tr : *record_times) {
            if (tr <= t_prev + 1e-16) continue;
            drv.t_end = tr;
            try {
                drv.run();
            } catch (const SingularEvaluation&) {
                classify_singular(drv.t, drv.y);
                done = true;
            }
            if (done) return traj;
            traj.samples.push_back(
                detail::make_sample(spec, drv.t, drv.y[spec.dim], drv.y.head(spec.dim),
                                    opts.eps_zeta));
            t_prev = tr;
        }
        return traj;
    }

    try {
        drv.run();
    } catch (const SingularEvaluation&) {
        classify_singular(drv.t, drv.y);
    }
    if (!done && traj.termination == Termination::horizon_reached) {
        // Ensure the final sample sits exactly at the horizon.
        if (traj.samples.back().t < horizon - 1e-12 * std::max(1.0, horizon))
            traj.samples.push_back(detail::make_sample(spec, drv.t, drv.y[spec.dim],
                                                       drv.y.head(spec.dim), opts.eps_zeta));
    }
    return traj;
}

// Integrates the desingularized field dU/dtau = F(U), co-integrating
// dt/dtau = zeta(U). F is regular so no singularity monitoring applies;
// equilibrium detection acts on |F|.
inline Trajectory integrate_desingularized(const SystemSpec& spec, const Vec& u0,
                                           double tau_horizon,
                                           const IntegrationOptions& opts = {}) {
    Trajectory traj;
    const int d = spec.dim;

    detail::Driver drv;
    drv.opts = opts;
    drv.t_end = tau_horizon;
    drv.y = Vec(d + 1);
    drv.y.head(d) = u0;
    drv.y[d] = 0.0;  // physical time t

    drv.rhs = [&spec, d](const Vec& y) {
        Vec dy(d + 1);
        const Vec u = y.head(d);
        dy.head(d) = spec.F(u);
        dy[d] = spec.zeta(u);
        return dy;
    };

    auto record = [&](double tau, const Vec& y) {
        Sample s;
        s.tau = tau;
        s.t = y[d];
        s.u = y.head(d);
        s.zeta = spec.zeta(s.u);
        s.rhs_norm = spec.F(s.u).norm() / std::max(std::abs(s.zeta), opts.eps_zeta);
        traj.samples.push_back(std::move(s));
    };
    record(0.0, drv.y);

    int eq_run = 0;
    drv.on_accept = [&](double tau, const Vec& y) {
        record(tau, y);
        eq_run = spec.F(y.head(d)).norm() < opts.tol_eq ? eq_run + 1 : 0;
        if (eq_run >= opts.eq_steps) {
            traj.termination = Termination::equilibrium_reached;
            return detail::StepVerdict::stop;
        }
        return detail::StepVerdict::cont;
    };
    drv.on_underflow = [&](double tau, const Vec&) {
        throw StepFailure("integrate_desingularized: step size underflow at tau = " +
                          std::to_string(tau));
    };
    drv.run();
    return traj;
}

// Convenience wrapper: integrate the singular system and sample exactly at
// `times` (increasing, starting at 0).
inline Trajectory integrate_to_times(const SystemSpec& spec, const Vec& u0,
                                     const std::vector<double>& times,
                                     const IntegrationOptions& opts = {}) {
    return integrate_singular(spec, u0, times.empty() ? 0.0 : times.back(), opts, &times);
}

// Adaptive integration of a plain ODE x' = g(x) sampled exactly at `times`.
// Used for reduced (slow) fields, which are regular by construction.
inline std::vector<Vec> integrate_field_to_times(const VectorFn& g, const Vec& x0,
                                                 const std::vector<double>& times,
                                                 const IntegrationOptions& opts = {}) {
    std::vector<Vec> out;
    out.reserve(times.size());
    detail::Driver drv;
    drv.opts = opts;
    drv.y = x0;
    drv.rhs = [&g](const Vec& y) { return g(y); };
    drv.on_accept = [](double, const Vec&) { return detail::StepVerdict::cont; };
    drv.on_underflow = [](double t, const Vec&) {
        throw StepFailure("integrate_field_to_times: step size underflow at t = " +
                          std::to_string(t));
    };
    double t_prev = 0.0;
    for (double tr : times) {
        if (tr > t_prev + 1e-16) {
            drv.t = t_prev;
            drv.t_end = tr;
            drv.run();
            t_prev = tr;
        }
        out.push_back(drv.y);
    }
    return out;
}

}  // namespace singode
