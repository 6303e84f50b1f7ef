// Integrates the fast-blow-up system from several initial states and prints
// the detected singular times next to the separation-of-variables prediction
// t* = ln(2 u2 / (2 u2 - u1^2)).
#include <cstdio>

#include "singode/integrate.hpp"
#include "singode/named_systems.hpp"

using namespace singode;

int main() {
    const NamedSystem fb = make_fast_blowup();
    std::printf("%8s %8s | %12s %12s %10s\n", "u1(0)", "u2(0)", "detected t*", "predicted",
                "error");
    for (double u1 : {0.5, 1.0, 1.2}) {
        for (double u2 : {0.8, 1.0, 1.5}) {
            Vec u0(2);
            u0 << u1, u2;
            const double pred = fb.blowup_time(u0);
            const Trajectory traj = integrate_singular(fb.spec, u0, 10.0);
            const double det = traj.t_star ? *traj.t_star : -1.0;
            std::printf("%8.3f %8.3f | %12.8f %12.8f %10.2e\n", u1, u2, det, pred,
                        std::abs(det - pred));
        }
    }
    return 0;
}
