// JSON serialization of reports and manifolds plus atomic file output
// (temp file + rename, so readers never observe partial writes).
#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "singode/hypotheses.hpp"
#include "singode/manifolds.hpp"
#include "singode/stable.hpp"
#include "singode/trajectory.hpp"

namespace singode {

using json = nlohmann::json;

inline json to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json to_json_rows(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline json to_json(const HypothesisResult& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["margin"] = r.margin;
    if (r.witness) j["witness"] = to_json(*r.witness);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline json to_json(const HypothesisReport& rep) {
    json j;
    j["h1"] = to_json(rep.h1);
    j["h2"] = to_json(rep.h2);
    j["h3"] = to_json(rep.h3);
    j["h4"] = to_json(rep.h4);
    j["h5"] = to_json(rep.h5);
    return j;
}

inline json to_json(const TaylorManifold& mf) {
    json j;
    j["base"] = to_json(mf.base);
    j["domain"] = to_json_rows(mf.domain);
    j["codomain"] = to_json_rows(mf.codomain);
    // One record per multi-index with the codomain coefficients grouped;
    // map ordering keeps the output deterministic.
    std::map<Exponents, bool> indices;
    for (int c = 0; c < mf.codim(); ++c)
        for (const auto& [e, v] : mf.h[c].terms()) indices[e] = true;
    json coeffs = json::array();
    for (const auto& [e, used] : indices) {
        json rec;
        rec["multi_index"] = e;
        json cc = json::array();
        for (int r = 0; r < mf.codim(); ++r) cc.push_back(mf.h[r].coeff(e));
        rec["codomain_coeffs"] = std::move(cc);
        coeffs.push_back(std::move(rec));
    }
    j["coefficients"] = std::move(coeffs);
    j["order"] = mf.order;
    j["residual"] = mf.residual;
    j["residual_radius"] = mf.residual_radius;
    j["validity_radius"] = mf.validity_radius;
    return j;
}

inline json to_json(const StableFiberBundle& bundle) {
    json j;
    json fibers = json::array();
    for (const auto& f : bundle.fibers) {
        json rec;
        rec["param"] = f.param;
        rec["base"] = to_json(f.base);
        rec["zeta_base"] = f.zeta_base;
        rec["decay_rate"] = f.decay_rate;
        rec["fitted_rate"] = f.fitted_rate;
        json eigs = json::array();
        for (const auto& lam : f.eigenvalues) eigs.push_back({lam.real(), lam.imag()});
        rec["eigenvalues"] = std::move(eigs);
        rec["fiber"] = to_json(f.fiber);
        fibers.push_back(std::move(rec));
    }
    j["fibers"] = std::move(fibers);
    j["fiber_dim"] = bundle.fiber_dim;
    if (bundle.boundary_param) j["boundary_param"] = *bundle.boundary_param;
    return j;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("write_file_atomic: cannot open " + tmp.string());
        out << content;
        if (!out) throw Error("write_file_atomic: write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline void write_csv(const std::filesystem::path& path, const Trajectory& traj) {
    write_file_atomic(path, to_csv(traj));
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace singode
