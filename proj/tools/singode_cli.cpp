// singode command-line front end: wires JSON configs and flags to the library
// operations and emits plot-ready CSV / machine-readable JSON artifacts.
//
// Subcommands: check-hypotheses, integrate, center-manifold, stable-manifold,
// decompose, ns-profile. Built-in systems are addressed by name
// (fast_blowup, linear_slaving, rotation, navier_stokes); inline systems are
// polynomial coefficient tables in the config file.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "singode/decompose.hpp"
#include "singode/io.hpp"
#include "singode/named_systems.hpp"
#include "singode/navier_stokes.hpp"
#include "singode/singode.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace singode;

namespace {

struct Workspace {
    std::string system_name = "linear_slaving";
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    json config;  // parsed config file (or empty object)

    SystemSpec spec;
    std::optional<EquilibriumManifold> equilibria;
    std::optional<NSSystem> ns;  // set when the system is navier_stokes
};

Vec parse_vec(const json& arr) {
    Vec v(static_cast<int>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<double>();
    return v;
}

Vec parse_vec_string(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    Vec v(static_cast<int>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    return v;
}

MultiPoly parse_poly(const json& terms, int dim) {
    MultiPoly p(dim);
    for (const auto& term : terms) {
        Exponents e = term.at("exponents").get<Exponents>();
        if (static_cast<int>(e.size()) != dim)
            throw Error("config: exponent tuple length does not match dim");
        if (total_degree(e) > 4)
            throw Error("config: inline polynomials are limited to degree 4");
        p.add_term(e, term.at("coeff").get<double>());
    }
    return p;
}

// Inline system: {"dim": d, "zeta": [terms], "F": [[terms], ...],
//                 "origin": [...], "equilibrium_manifold": {...}} with
// term = {"exponents": [...], "coeff": c}.
void load_inline_system(Workspace& ws, const json& sys) {
    const int dim = sys.at("dim").get<int>();
    PolyVec F;
    for (const auto& rows : sys.at("F")) F.push_back(parse_poly(rows, dim));
    if (static_cast<int>(F.size()) != dim) throw Error("config: F must have dim rows");
    const MultiPoly zeta = parse_poly(sys.at("zeta"), dim);
    Vec origin = Vec::Zero(dim);
    if (sys.contains("origin")) origin = parse_vec(sys["origin"]);
    ws.spec = make_poly_system(std::move(F), zeta, origin, "inline");

    if (sys.contains("equilibrium_manifold")) {
        const auto& em = sys["equilibrium_manifold"];
        const Vec point = parse_vec(em.at("point"));
        std::vector<Vec> tangents;
        for (const auto& t : em.at("tangents")) tangents.push_back(parse_vec(t));
        Mat T(dim, static_cast<int>(tangents.size()));
        for (size_t i = 0; i < tangents.size(); ++i) T.col(static_cast<int>(i)) = tangents[i];
        EquilibriumManifold eq;
        eq.dimension = static_cast<int>(tangents.size());
        eq.parameterization = [point, T](const Vec& s) { return Vec(point + T * s); };
        eq.tangent_basis = [T](const Vec&) { return T; };
        ws.equilibria = eq;
    }
}

void load_system(Workspace& ws) {
    json sys;
    if (ws.config.contains("system")) sys = ws.config["system"];
    if (sys.is_object()) {
        load_inline_system(ws, sys);
        return;
    }
    if (sys.is_string()) ws.system_name = sys.get<std::string>();

    if (ws.system_name == "navier_stokes") {
        GasModel gas = make_default_gas(
            ws.config.value("gamma", 1.4), ws.config.value("R", 1.0));
        ws.ns = make_ns_system(gas, ws.config.value("rho0", 1.0), ws.config.value("e0", 1.0),
                               ws.config.value("sigma", 0.0));
        ws.spec = ws.ns->ode.spec;
        ws.equilibria = ws.ns->equilibria;
        return;
    }
    NamedSystem named = load_example(ws.system_name);
    ws.spec = named.spec;
    ws.equilibria = named.equilibria;
}

Vec default_u0(const Workspace& ws) {
    if (ws.system_name == "fast_blowup") return parse_vec_string("1,1");
    if (ws.system_name == "linear_slaving") return parse_vec_string("1,1,0.5");
    if (ws.system_name == "rotation") return parse_vec_string("1,0,0.5");
    if (ws.system_name == "navier_stokes") return parse_vec_string("1,0.05,1,0.001,0");
    throw Error("no default initial state for inline systems; pass --u0 or config integrate.u0");
}

HypothesisOptions hypothesis_options(const Workspace& ws) {
    HypothesisOptions opts;
    opts.seed = static_cast<unsigned>(ws.seed ^ 0x9e3779b9u);
    if (ws.config.contains("hypotheses")) {
        const auto& h = ws.config["hypotheses"];
        opts.box_half_width = h.value("box_half_width", opts.box_half_width);
        opts.tol_S = h.value("tol_S", opts.tol_S);
        opts.tol_grad = h.value("tol_grad", opts.tol_grad);
        opts.tol_h4 = h.value("tol_h4", opts.tol_h4);
        opts.tol_h5 = h.value("tol_h5", opts.tol_h5);
        opts.tol_eq = h.value("tol_eq", opts.tol_eq);
        opts.tol_rank = h.value("tol_rank", opts.tol_rank);
        opts.tol_h2 = h.value("tol_h2", opts.tol_h2);
        opts.center_order = h.value("order", opts.center_order);
    }
    return opts;
}

int cmd_check_hypotheses(Workspace& ws) {
    const HypothesisOptions opts = hypothesis_options(ws);
    const HypothesisReport rep =
        audit_system(ws.spec, ws.equilibria ? &*ws.equilibria : nullptr, opts);
    json j = to_json(rep);
    j["system"] = ws.spec.name;
    j["seed"] = ws.seed;
    write_json(fs::path(ws.out_dir) / "hypotheses.json", j);
    std::cout << "h1=" << to_string(rep.h1.verdict) << " h2=" << to_string(rep.h2.verdict)
              << " h3=" << to_string(rep.h3.verdict) << " h4=" << to_string(rep.h4.verdict)
              << " h5=" << to_string(rep.h5.verdict) << "\n";
    return rep.all_pass() ? 0 : 2;
}

int cmd_integrate(Workspace& ws, const std::string& u0_csv, double horizon) {
    const auto& cfg =
        ws.config.contains("integrate") ? ws.config["integrate"] : json::object();
    Vec u0 = !u0_csv.empty()       ? parse_vec_string(u0_csv)
             : cfg.contains("u0") ? parse_vec(cfg["u0"])
                                  : default_u0(ws);
    if (horizon <= 0.0) horizon = cfg.value("horizon", 1.0);
    IntegrationOptions opts;
    opts.rtol = cfg.value("rtol", opts.rtol);
    opts.atol = cfg.value("atol", opts.atol);
    const Trajectory traj = integrate_singular(ws.spec, u0, horizon, opts);
    write_csv(fs::path(ws.out_dir) / "trajectory.csv", traj);
    std::cout << "termination=" << to_string(traj.termination);
    if (traj.t_star) std::cout << " t_star=" << *traj.t_star;
    std::cout << "\n";
    return 0;
}

int cmd_center_manifold(Workspace& ws, int order) {
    const auto& cfg =
        ws.config.contains("center_manifold") ? ws.config["center_manifold"] : json::object();
    if (order <= 0) order = cfg.value("order", 3);
    ManifoldOptions opts;
    opts.seed = static_cast<unsigned>(ws.seed ^ 0x51ed270bu);
    const TaylorManifold cm = center_manifold(ws.spec, order, opts);
    json j = to_json(cm);
    j["system"] = ws.spec.name;
    write_json(fs::path(ws.out_dir) / "center_manifold.json", j);
    std::cout << "graph_dim=" << cm.graph_dim() << " residual=" << cm.residual
              << " validity_radius=" << cm.validity_radius << "\n";
    return 0;
}

int cmd_stable_manifold(Workspace& ws) {
    if (!ws.equilibria)
        throw Error("stable-manifold: the selected system has no equilibrium manifold");
    const auto& cfg =
        ws.config.contains("stable_manifold") ? ws.config["stable_manifold"] : json::object();
    StableManifoldOptions opts;
    opts.param_max = cfg.value("param_max", opts.param_max);
    opts.order = cfg.value("order", opts.order);
    opts.manifold.seed = static_cast<unsigned>(ws.seed ^ 0x2545f491u);
    const int n_base = cfg.value("n_base", 4);
    const StableFiberBundle bundle =
        uniformly_stable_manifold(ws.spec, *ws.equilibria, n_base, opts);
    json j = to_json(bundle);
    j["system"] = ws.spec.name;
    write_json(fs::path(ws.out_dir) / "stable_manifold.json", j);
    std::cout << "fibers=" << bundle.fibers.size() << " fiber_dim=" << bundle.fiber_dim << "\n";
    return 0;
}

int cmd_decompose(Workspace& ws, const std::string& u0_csv, double horizon) {
    if (!ws.equilibria)
        throw Error("decompose: the selected system has no equilibrium manifold");
    const auto& cfg = ws.config.contains("decompose") ? ws.config["decompose"] : json::object();
    Vec u0 = !u0_csv.empty()       ? parse_vec_string(u0_csv)
             : cfg.contains("u0") ? parse_vec(cfg["u0"])
                                  : default_u0(ws);
    if (horizon <= 0.0) horizon = cfg.value("horizon", 1.0);

    StableManifoldOptions sopts;
    sopts.param_max = cfg.value("param_max", 2.0 * std::abs(ws.spec.zeta(u0)));
    sopts.manifold.seed = static_cast<unsigned>(ws.seed ^ 0x2545f491u);
    const StableFiberBundle bundle =
        uniformly_stable_manifold(ws.spec, *ws.equilibria, cfg.value("n_base", 4), sopts);

    IntegrationOptions iopts;
    iopts.rtol = 1e-13;
    iopts.atol = 1e-15;
    const Trajectory traj = integrate_singular(ws.spec, u0, horizon, iopts);
    const OrbitDecomposition dec = decompose_orbit(ws.spec, bundle, *ws.equilibria, traj);

    const fs::path out(ws.out_dir);
    write_csv(out / "decompose_slow.csv", dec.slow);
    write_csv(out / "decompose_fast.csv", dec.fast);
    write_csv(out / "decompose_pert.csv", dec.pert);
    json j;
    j["system"] = ws.spec.name;
    j["c_estimate"] = dec.c_estimate;
    j["fast_decay_rate"] = dec.fast_decay_rate;
    j["fast_fitted_slope"] = dec.fast_fitted_slope;
    j["limit_equilibrium"] = to_json(dec.limit_equilibrium);
    write_json(out / "decompose.json", j);
    std::cout << "c_estimate=" << dec.c_estimate << " fast_slope=" << dec.fast_fitted_slope
              << "\n";
    return 0;
}

struct NsProfileArgs {
    double gamma = 1.4, R = 1.0, sigma = 0.0;
    std::string left = "1,0.05,1";
    double amplitude = 1e-3, length = 1.5, output_step = 0.0;
};

int cmd_ns_profile(Workspace& ws, const NsProfileArgs& args) {
    GasModel gas = make_default_gas(args.gamma, args.R);
    Vec l = parse_vec_string(args.left);
    if (l.size() != 3) throw Error("ns-profile: left state must be rho,v,e");
    NSState left;
    left.rho = l[0];
    left.v = l[1];
    left.e = l[2];

    ProfileOptions popts;
    popts.amplitude = args.amplitude;
    popts.output_step = args.output_step;
    const Trajectory prof = compute_profile(gas, left, args.sigma, args.length, popts);

    NSSystem ns = make_ns_system(gas, left.rho, left.e, args.sigma);
    HypothesisOptions hopts = hypothesis_options(ws);
    const HypothesisReport rep = audit_system(ns.ode.spec, &ns.equilibria, hopts);

    const fs::path out(ws.out_dir);
    write_csv(out / "profile.csv", prof);
    json j = to_json(rep);
    j["system"] = "navier_stokes";
    j["sigma"] = args.sigma;
    j["residual"] = primitive_residual(gas, args.sigma, prof);
    write_json(out / "hypotheses.json", j);
    std::cout << "samples=" << prof.samples.size() << " min_v=" << prof.min_zeta()
              << " residual=" << j["residual"].get<double>() << "\n";
    return rep.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analysis toolkit for singular ODEs dU/dt = F(U)/zeta(U)"};
    app.require_subcommand(1);

    Workspace ws;
    app.add_option("--config", ws.config_path, "JSON config file");
    app.add_option("--out", ws.out_dir, "output directory");
    app.add_option("--seed", ws.seed, "seed for randomized sampling");
    app.add_option("--system", ws.system_name,
                   "built-in system name (fast_blowup, linear_slaving, rotation, "
                   "navier_stokes)");

    auto* c_hyp = app.add_subcommand("check-hypotheses", "audit conditions h1..h5");

    std::string u0_csv;
    double horizon = 0.0;
    auto* c_int = app.add_subcommand("integrate", "integrate the singular system");
    c_int->add_option("--u0", u0_csv, "initial state, comma separated");
    c_int->add_option("--horizon", horizon, "integration horizon");

    int cm_order = 0;
    auto* c_cm = app.add_subcommand("center-manifold", "Taylor center manifold");
    c_cm->add_option("--order", cm_order, "expansion order (>= 2)");

    auto* c_sm = app.add_subcommand("stable-manifold", "uniformly stable fiber bundle");

    std::string dec_u0;
    double dec_horizon = 0.0;
    auto* c_dec = app.add_subcommand("decompose", "slow/fast/perturbation split of an orbit");
    c_dec->add_option("--u0", dec_u0, "initial state, comma separated");
    c_dec->add_option("--horizon", dec_horizon, "integration horizon");

    NsProfileArgs ns_args;
    auto* c_ns = app.add_subcommand("ns-profile", "steady viscous profile of 1-D "
                                                  "compressible Navier-Stokes");
    c_ns->add_option("--gamma", ns_args.gamma, "adiabatic exponent");
    c_ns->add_option("--R", ns_args.R, "gas constant");
    c_ns->add_option("--sigma", ns_args.sigma, "wave speed (0 = steady)");
    c_ns->add_option("--left", ns_args.left, "left state rho,v,e");
    c_ns->add_option("--amplitude", ns_args.amplitude, "fiber perturbation amplitude");
    c_ns->add_option("--length", ns_args.length, "profile length");
    c_ns->add_option("--output-step", ns_args.output_step, "uniform output grid step");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!ws.config_path.empty()) {
            std::ifstream in(ws.config_path);
            if (!in) throw Error("cannot open config file " + ws.config_path);
            in >> ws.config;
        } else {
            ws.config = json::object();
        }
        if (!c_ns->parsed()) load_system(ws);

        if (c_hyp->parsed()) return cmd_check_hypotheses(ws);
        if (c_int->parsed()) return cmd_integrate(ws, u0_csv, horizon);
        if (c_cm->parsed()) return cmd_center_manifold(ws, cm_order);
        if (c_sm->parsed()) return cmd_stable_manifold(ws);
        if (c_dec->parsed()) return cmd_decompose(ws, dec_u0, dec_horizon);
        if (c_ns->parsed()) return cmd_ns_profile(ws, ns_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
