// Discrete orbit samples in both time variables, plus the sign-preservation
// verdict on a recorded trajectory.
#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "singode/poly.hpp"

namespace singode {

enum class Termination { horizon_reached, singularity_reached, equilibrium_reached, step_failure };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::horizon_reached: return "horizon_reached";
        case Termination::singularity_reached: return "singularity_reached";
        case Termination::equilibrium_reached: return "equilibrium_reached";
        case Termination::step_failure: return "step_failure";
    }
    return "unknown";
}

struct Sample {
    double t = 0.0;
    double tau = 0.0;
    Vec u;
    double zeta = 0.0;
    double rhs_norm = 0.0;  // |F(U)/zeta(U)|
};

struct Trajectory {
    std::vector<Sample> samples;
    Termination termination = Termination::horizon_reached;

    // Estimated singular time/rescaled time when termination is
    // singularity_reached (refined past the last accepted step).
    std::optional<double> t_star;
    std::optional<double> tau_star;

    int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().u.size()); }
    const Sample& front() const { return samples.front(); }
    const Sample& back() const { return samples.back(); }
    double min_zeta() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& s : samples) m = std::min(m, s.zeta);
        return m;
    }
};

// CSV layout: "t,tau,u_0,...,u_{d-1},zeta,rhs_norm" with the termination
// reason on a trailing comment line.
inline std::string to_csv(const Trajectory& traj) {
    std::string out = "t,tau";
    const int d = traj.dim();
    char buf[64];
    for (int i = 0; i < d; ++i) {
        std::snprintf(buf, sizeof(buf), ",u_%d", i);
        out += buf;
    }
    out += ",zeta,rhs_norm\n";
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", s.t, s.tau);
        out += buf;
        for (int i = 0; i < d; ++i) {
            std::snprintf(buf, sizeof(buf), ",%.17g", s.u[i]);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", s.zeta, s.rhs_norm);
        out += buf;
    }
    out += "# termination=";
    out += to_string(traj.termination);
    out += "\n";
    return out;
}

struct SignVerdict {
    bool pass = false;
    // First sample at/after the crossing when the verdict is fail.
    std::optional<Sample> witness;
    std::optional<double> crossing_time;
};

// Pass iff zeta stays strictly positive along the recorded orbit. A
// trajectory terminated by the singularity monitor counts as a crossing at
// the refined singular time.
inline SignVerdict verify_sign_preservation(const Trajectory& traj, double eps_zeta = 1e-12) {
    SignVerdict v;
    for (const auto& s : traj.samples) {
        if (s.zeta <= eps_zeta) {
            v.pass = false;
            v.witness = s;
            v.crossing_time = s.t;
            return v;
        }
    }
    if (traj.termination == Termination::singularity_reached) {
        v.pass = false;
        v.witness = traj.samples.empty() ? std::optional<Sample>{} : traj.back();
        v.crossing_time = traj.t_star ? traj.t_star : std::optional<double>(traj.back().t);
        return v;
    }
    v.pass = true;
    return v;
}

}  // namespace singode
