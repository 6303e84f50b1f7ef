// Sampled diffeomorphism between the original time t and the rescaled time
// tau, with d tau/dt = 1/zeta along the orbit and tau(0) = 0. Evaluation uses
// cubic Hermite interpolation with the known derivatives 1/zeta (for
// tau-of-t) and zeta (for t-of-tau).
#pragma once

#include <algorithm>
#include <vector>

#include "singode/trajectory.hpp"

namespace singode {

class TimeRescale {
  public:
    explicit TimeRescale(const Trajectory& traj) {
        t_.reserve(traj.samples.size());
        tau_.reserve(traj.samples.size());
        zeta_.reserve(traj.samples.size());
        for (const auto& s : traj.samples) {
            if (s.zeta <= 0.0)
                throw NotDiffeomorphism("time_rescale: zeta <= 0 at t = " + std::to_string(s.t));
            t_.push_back(s.t);
            tau_.push_back(s.tau);
            zeta_.push_back(s.zeta);
        }
        if (t_.size() < 2) throw InsufficientSamples("time_rescale: need at least 2 samples");
        for (size_t i = 1; i < t_.size(); ++i)
            if (!(t_[i] > t_[i - 1]) || !(tau_[i] > tau_[i - 1]))
                throw NotDiffeomorphism("time_rescale: non-monotone samples");
    }

    double tau_of_t(double t) const {
        const size_t i = bracket(t_, t);
        // Hermite in t with tau' = 1/zeta.
        return hermite(t, t_[i], t_[i + 1], tau_[i], tau_[i + 1], 1.0 / zeta_[i],
                       1.0 / zeta_[i + 1]);
    }

    double t_of_tau(double tau) const {
        const size_t i = bracket(tau_, tau);
        return hermite(tau, tau_[i], tau_[i + 1], t_[i], t_[i + 1], zeta_[i], zeta_[i + 1]);
    }

    const std::vector<double>& t_samples() const { return t_; }
    const std::vector<double>& tau_samples() const { return tau_; }
    double t_min() const { return t_.front(); }
    double t_max() const { return t_.back(); }

  private:
    static size_t bracket(const std::vector<double>& xs, double x) {
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        size_t i = it == xs.begin() ? 0 : static_cast<size_t>(it - xs.begin()) - 1;
        return std::min(i, xs.size() - 2);
    }

    static double hermite(double x, double x0, double x1, double y0, double y1, double d0,
                          double d1) {
        const double h = x1 - x0;
        const double s = (x - x0) / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 +
               (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
    }

    std::vector<double> t_, tau_, zeta_;
};

inline TimeRescale time_rescale(const Trajectory& traj) { return TimeRescale(traj); }

}  // namespace singode
