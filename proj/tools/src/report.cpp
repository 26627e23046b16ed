// SPDX-License-Identifier: MIT
#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bernstein/error.hpp"

namespace bernstein::cli {

json to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

json to_json(const Mat& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        a.push_back(row);
    }
    return a;
}

json to_json(const ConstraintPoint& pt) {
    return {{"x", to_json(pt.x)}, {"r", pt.r}, {"p", to_json(pt.p)}, {"M", to_json(pt.M)}};
}

json to_json(const BoundCertificate& c) {
    json j{{"clause", to_string(c.clause)},
           {"status", to_string(c.status)},
           {"eta", c.eta},
           {"nu", c.nu},
           {"K", c.K},
           {"R", c.R},
           {"L", c.L},
           {"margin", c.margin},
           {"vacuous", c.vacuous},
           {"samples", c.samples},
           {"sign_ambiguous", c.sign_ambiguous},
           {"message", c.message}};
    if (c.witness) {
        j["witness"] = to_json(*c.witness);
        if (c.witness_sides) j["witness"]["sides"] = {{"lhs", c.witness_sides->lhs}, {"rhs", c.witness_sides->rhs}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json config_json(const RunConfig& cfg) {
    const auto& eq = cfg.equation;
    json sigma = json::array();
    for (const auto& s : eq.sigma) sigma.push_back(s);
    json j;
    j["equation"] = {{"family", to_string(eq.family)},
                     {"dim", eq.dim},
                     {"m", eq.m},
                     {"f", eq.f},
                     {"sigma", sigma},
                     {"H", eq.hamiltonian},
                     {"exp_change", eq.exp_change},
                     {"v_min", eq.v_min},
                     {"v_max", eq.v_max},
                     {"drift", eq.drift == DriftSign::printed ? "printed" : "derived"}};
    j["chi"] = {{"alpha", cfg.chi.alpha}, {"scale", cfg.chi.scale}};
    const auto& ck = cfg.check;
    j["check"] = {{"clause", to_string(ck.clause)},
                  {"eta", ck.eta},
                  {"K", ck.K ? json(*ck.K) : json("auto")},
                  {"nu", cfg.nu()},
                  {"R", ck.R},
                  {"center", to_json(cfg.center())},
                  {"osc", ck.osc},
                  {"budget", ck.budget},
                  {"p_span", ck.p_span},
                  {"allow_gamma_ge_m", ck.allow_gamma_ge_m}};
    const auto& sv = cfg.solve;
    j["solve"] = {{"lo", sv.lo},
                  {"hi", sv.hi},
                  {"n", sv.n},
                  {"ball_radius", opt(sv.ball_radius)},
                  {"boundary", sv.boundary},
                  {"initial", sv.initial},
                  {"T", sv.T},
                  {"dt", sv.dt},
                  {"scheme", sv.scheme == TimeScheme::implicit ? "implicit" : "explicit"},
                  {"gradient", sv.gradient == GradientScheme::hybrid ? "hybrid" : "upwind"},
                  {"tol", sv.tol},
                  {"max_iter", sv.max_iter}};
    const auto& ex = cfg.extract;
    j["extract"] = {{"grid", ex.grid},
                    {"kind", ex.kind == CouplingKind::linear ? "linear" : "profile"},
                    {"flat", ex.flat},
                    {"rel_tol", ex.rel_tol},
                    {"l_max", ex.l_max}};
    j["lemma"] = {{"states", cfg.lemma.states}, {"L", opt(cfg.lemma.L)}, {"nu", opt(cfg.lemma.nu)}};
    return j;
}

std::string fixed9(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos) return "0.000000000";
    return s;
}

std::string exact(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[40];
    for (int digits = 15; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) { row(header); }

void Csv::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw ValidationError("csv: wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
}

std::string write_artifact(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ValidationError("write to '" + path.string() + "' failed");
    return path.string();
}

}  // namespace bernstein::cli
