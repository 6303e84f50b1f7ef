// Computes a steady viscous profile of 1-D compressible Navier-Stokes near a
// low-velocity constant state and reports the hypothesis audit plus the
// residual of the profile in the conservation-form equations.
#include <cstdio>

#include "singode/navier_stokes.hpp"

using namespace singode;

int main() {
    const GasModel gas = make_default_gas();
    NSState left;
    left.rho = 1.0;
    left.v = 0.05;
    left.e = 1.0;

    ProfileOptions opts;
    opts.output_step = 0.005;
    const Trajectory prof = compute_profile(gas, left, 0.0, 1.5, opts);
    std::printf("profile: %zu samples, min v = %.6f, residual = %.3e\n", prof.samples.size(),
                prof.min_zeta(), primitive_residual(gas, 0.0, prof));

    const NSSystem ns = make_ns_system(gas);
    const HypothesisReport rep = audit_system(ns.ode.spec, &ns.equilibria);
    std::printf("audit: h1=%s h2=%s h3=%s h4=%s h5=%s\n", to_string(rep.h1.verdict),
                to_string(rep.h2.verdict), to_string(rep.h3.verdict), to_string(rep.h4.verdict),
                to_string(rep.h5.verdict));
    return 0;
}
