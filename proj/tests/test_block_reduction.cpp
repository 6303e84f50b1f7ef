#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "singode/block_reduction.hpp"
#include "singode/integrate.hpp"
#include "singode/navier_stokes.hpp"

using namespace singode;

namespace {

// Decoupled test blocks: a11 = 1, A21 = 0, A22 = diag(-1, -2), b = I.
// The reduced flow keeps the base variable constant and gives z ~ e^{A22 x}.
BlockSystem decoupled_blocks() {
    BlockSystem bs;
    bs.n_hyp = 1;
    bs.n_par = 2;
    bs.a11 = [](const Vec&) { return 1.0; };
    bs.A21 = [](const Vec&) { return Vec(Vec::Zero(2)); };
    bs.A22 = [](const Vec&) {
        Mat A = Mat::Zero(2, 2);
        A(0, 0) = -1.0;
        A(1, 1) = -2.0;
        return A;
    };
    bs.b = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
    return bs;
}

// Closed-form profile of the decoupled system:
//   z(x) = (z10 e^-x, z20 e^-2x), p1(x) = p10 + z10 (1 - e^-x),
//   p2(x) = p20 + z20 (1 - e^-2x) / 2, base constant.
Trajectory decoupled_profile(double h, int n, double b0, double p10, double p20, double z10,
                             double z20) {
    Trajectory traj;
    for (int i = 0; i < n; ++i) {
        const double x = i * h;
        Sample s;
        s.t = x;
        s.tau = x;
        s.u = Vec(5);
        s.u << b0, p10 + z10 * (1.0 - std::exp(-x)), p20 + z20 * (1.0 - std::exp(-2.0 * x)) / 2.0,
            z10 * std::exp(-x), z20 * std::exp(-2.0 * x);
        s.zeta = s.u[1];
        traj.samples.push_back(std::move(s));
    }
    return traj;
}

}  // namespace

TEST_CASE("decoupled blocks: w = 0 and z_x = b^-1 A22 z") {
    const BlockSystem bs = decoupled_blocks();
    const ProfileODE ode = reduce(bs, base_driven_by_w());
    Vec u(5);
    u << 0.7, 1.2, -0.3, 0.4, -0.1;
    const Vec f = ode.spec.F(u);
    // base row: zeta * w = 0
    CHECK(f[0] == Catch::Approx(0.0).margin(1e-15));
    // parabolic rows: zeta * z
    CHECK(f[1] == Catch::Approx(1.2 * 0.4));
    CHECK(f[2] == Catch::Approx(1.2 * -0.1));
    // z rows: zeta * A22 z
    CHECK(f[3] == Catch::Approx(1.2 * -0.4));
    CHECK(f[4] == Catch::Approx(1.2 * 0.2));
}

TEST_CASE("reduced zeta equals the designated component") {
    const GasModel gas = make_default_gas();
    const NSSystem ns = make_ns_system(gas);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(-0.2, 0.2);
    for (int i = 0; i < 1000; ++i) {
        Vec u(5);
        u << 1.0 + unif(rng), unif(rng), 1.0 + unif(rng), unif(rng), unif(rng);
        CHECK(ns.ode.spec.zeta(u) == u[ns.ode.zeta_index]);
    }
}

TEST_CASE("F vanishes identically on z = 0") {
    const GasModel gas = make_default_gas();
    const NSSystem ns = make_ns_system(gas);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unif(-0.3, 0.3);
    for (int i = 0; i < 200; ++i) {
        Vec u(5);
        u << 1.0 + unif(rng), unif(rng), 1.0 + unif(rng), 0.0, 0.0;
        CHECK(ns.ode.spec.F(u).norm() <= 1e-14);
    }
    // the same holds for the decoupled synthetic blocks
    const ProfileODE ode = reduce(decoupled_blocks(), base_driven_by_w());
    Vec u(5);
    u << 0.3, 0.9, -0.4, 0.0, 0.0;
    CHECK(ode.spec.F(u).norm() == 0.0);
}

TEST_CASE("block audit accepts healthy blocks and flags singular b") {
    const BlockSystem good = decoupled_blocks();
    Vec center(5);
    center << 1.0, 1.0, 0.0, 0.0, 0.0;
    CHECK_NOTHROW(audit_block_system(good, center, 0.2));

    BlockSystem bad = decoupled_blocks();
    bad.b = [](const Vec& u) {
        Mat B = Mat::Identity(2, 2);
        B(1, 1) = u[1] - 1.0;  // degenerates inside the box
        return B;
    };
    CHECK_THROWS_AS(audit_block_system(bad, center, 0.2), NonInvertibleB);
}

TEST_CASE("residual_check needs enough samples") {
    const BlockSystem bs = decoupled_blocks();
    const Trajectory tiny = decoupled_profile(0.1, 4, 1.0, 1.0, 0.0, 0.1, 0.1);
    CHECK_THROWS_AS(residual_check(bs, tiny), InsufficientSamples);
}

TEST_CASE("constant states give zero residual") {
    const BlockSystem bs = decoupled_blocks();
    const Trajectory constant = decoupled_profile(0.1, 20, 1.0, 1.0, 0.5, 0.0, 0.0);
    CHECK(residual_check(bs, constant) <= 1e-14);
}

TEST_CASE("analytic profile: residual converges at second order") {
    const BlockSystem bs = decoupled_blocks();
    std::vector<double> res;
    for (double h : {0.02, 0.01, 0.005}) {
        const int n = static_cast<int>(std::round(1.0 / h)) + 1;
        const Trajectory prof = decoupled_profile(h, n, 1.0, 1.0, 0.2, 0.1, -0.05);
        res.push_back(residual_check(bs, prof));
    }
    for (size_t i = 1; i < res.size(); ++i) {
        const double order = std::log2(res[i - 1] / res[i]);
        CHECK(order >= 1.8);
        CHECK(order <= 2.3);
    }
}

TEST_CASE("integrated reduced orbit satisfies the block equations") {
    const BlockSystem bs = decoupled_blocks();
    const ProfileODE ode = reduce(bs, base_driven_by_w());
    Vec u0(5);
    u0 << 1.0, 1.0, 0.2, 0.1, -0.05;
    IntegrationOptions opts;
    opts.rtol = 1e-12;
    opts.atol = 1e-14;
    std::vector<double> res;
    for (double h : {0.02, 0.01}) {
        std::vector<double> times;
        for (double t = 0.0; t <= 1.0 + 1e-12; t += h) times.push_back(t);
        const Trajectory traj = integrate_to_times(ode.spec, u0, times, opts);
        res.push_back(residual_check(bs, traj));
    }
    CHECK(std::log2(res[0] / res[1]) >= 1.8);
}

TEST_CASE("travelling-wave speed shifts the singular component") {
    const GasModel gas = make_default_gas();
    const NSSystem ns = make_ns_system(gas, 1.0, 1.0, 0.3);
    Vec u(5);
    u << 1.0, 0.45, 1.0, 0.01, 0.0;
    CHECK(ns.ode.spec.zeta(u) == Catch::Approx(0.15));
    // the shifted constant state is the distinguished origin
    CHECK(ns.ode.spec.zeta(ns.ode.spec.origin) == Catch::Approx(0.0).margin(1e-15));
    CHECK(ns.ode.spec.F(ns.ode.spec.origin).norm() <= 1e-14);
}
