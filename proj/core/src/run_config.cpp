// SPDX-License-Identifier: MIT
#include "bernstein/run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace bernstein {

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"equation",
         {"family", "dim", "m", "f", "sigma11", "sigma12", "sigma21", "sigma22", "H", "exp_change", "v_min",
          "v_max", "drift"}},
        {"chi", {"alpha", "scale"}},
        {"check",
         {"clause", "eta", "K", "nu", "R", "center", "osc", "budget", "p_span", "allow_gamma_ge_m"}},
        {"solve",
         {"lo", "hi", "n", "ball_radius", "boundary", "initial", "T", "dt", "scheme", "gradient", "tol",
          "max_iter"}},
        {"extract", {"grid", "kind", "flat", "rel_tol", "l_max"}},
        {"lemma", {"states", "L", "nu"}},
    };
    return s;
}

struct Entry {
    std::string value;
    std::string where;
};

// Typed reads that record problems instead of throwing.
class Reader {
public:
    Reader(const std::map<std::string, Entry>& raw, std::vector<std::string>& problems)
        : raw_(raw), problems_(problems) {}

    bool has(const std::string& key) const { return raw_.count(key) > 0; }

    void number(const std::string& key, double& out) {
        if (!has(key)) return;
        const Entry& e = raw_.at(key);
        char* end = nullptr;
        const double v = std::strtod(e.value.c_str(), &end);
        if (e.value.empty() || end != e.value.c_str() + e.value.size() || !std::isfinite(v)) {
            bad(key, "expected a finite number, got '" + e.value + "'");
            return;
        }
        out = v;
    }

    void number(const std::string& key, std::optional<double>& out) {
        if (!has(key)) return;
        double v = 0.0;
        const std::size_t before = problems_.size();
        number(key, v);
        if (problems_.size() == before) out = v;
    }

    void integer(const std::string& key, int& out) {
        if (!has(key)) return;
        double v = 0.0;
        const std::size_t before = problems_.size();
        number(key, v);
        if (problems_.size() != before) return;
        if (v != std::floor(v) || std::abs(v) > 1e9) {
            bad(key, "expected an integer, got '" + raw_.at(key).value + "'");
            return;
        }
        out = static_cast<int>(v);
    }

    void boolean(const std::string& key, bool& out) {
        if (!has(key)) return;
        const std::string& v = raw_.at(key).value;
        if (v == "true" || v == "1" || v == "yes") {
            out = true;
        } else if (v == "false" || v == "0" || v == "no") {
            out = false;
        } else {
            bad(key, "expected true or false, got '" + v + "'");
        }
    }

    void text(const std::string& key, std::string& out) {
        if (has(key)) out = raw_.at(key).value;
    }

    template <class T>
    void choice(const std::string& key, T& out, const std::vector<std::pair<std::string, T>>& options) {
        if (!has(key)) return;
        const std::string& v = raw_.at(key).value;
        std::vector<std::string> names;
        for (const auto& [name, value] : options) {
            if (v == name) {
                out = value;
                return;
            }
            names.push_back(name);
        }
        bad(key, "expected one of " + join(names, ", ") + ", got '" + v + "'");
    }

    void list(const std::string& key, std::vector<double>& out) {
        if (!has(key)) return;
        out.clear();
        std::stringstream ss(raw_.at(key).value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            char* end = nullptr;
            const double v = std::strtod(item.c_str(), &end);
            if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v)) {
                bad(key, "expected a comma-separated list of numbers, got '" + raw_.at(key).value + "'");
                out.clear();
                return;
            }
            out.push_back(v);
        }
    }

    void bad(const std::string& key, const std::string& what) {
        problems_.push_back(key + " (" + raw_.at(key).where + "): " + what);
    }

private:
    const std::map<std::string, Entry>& raw_;
    std::vector<std::string>& problems_;
};

void parse_lines(std::istream& in, std::map<std::string, Entry>& raw, std::vector<std::string>& problems) {
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') {
                problems.push_back(where + ": unterminated section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section)) {
                problems.push_back(where + ": unknown section [" + section + "]");
                section = "?";
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back(where + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            problems.push_back(where + ": key '" + key + "' appears before any section");
            continue;
        }
        if (section == "?") continue;
        if (!schema().at(section).count(key)) {
            problems.push_back(where + ": unknown key '" + key + "' in [" + section + "]");
            continue;
        }
        const std::string full = section + "." + key;
        if (raw.count(full)) {
            problems.push_back(where + ": duplicate key '" + full + "'");
            continue;
        }
        raw[full] = {value, where};
    }
}

void apply_override(const std::string& text, std::map<std::string, Entry>& raw, std::vector<std::string>& problems) {
    const auto eq = text.find('=');
    const auto dot = text.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        problems.push_back("override '" + text + "': expected section.key=value");
        return;
    }
    const std::string section = trim(text.substr(0, dot));
    const std::string key = trim(text.substr(dot + 1, eq - dot - 1));
    if (!schema().count(section) || !schema().at(section).count(key)) {
        problems.push_back("override '" + text + "': unknown key '" + section + "." + key + "'");
        return;
    }
    raw[section + "." + key] = {trim(text.substr(eq + 1)), "override"};
}

// Expression may only use names from `allowed`.
void check_expr(Reader& r, const std::string& key, const std::string& text, const std::set<std::string>& allowed) {
    try {
        const Expr e = Expr::parse(text);
        for (const auto& v : e.variables()) {
            if (!allowed.count(v)) r.bad(key, "variable '" + v + "' is not available here");
        }
    } catch (const ParseError& err) {
        r.bad(key, err.what());
    } catch (const ValidationError& err) {
        r.bad(key, err.what());
    }
}

std::set<std::string> names(const char* prefix, int dim) {
    std::set<std::string> s;
    for (int k = 1; k <= dim; ++k) s.insert(prefix + std::to_string(k));
    return s;
}

std::vector<std::string> sigma_keys(int dim) {
    if (dim == 1) return {"equation.sigma11"};
    return {"equation.sigma11", "equation.sigma12", "equation.sigma21", "equation.sigma22"};
}

RunConfig build(const std::map<std::string, Entry>& raw, std::vector<std::string>& problems) {
    RunConfig cfg;
    Reader r(raw, problems);
    auto& eq = cfg.equation;
    r.choice<Family>("equation.family", eq.family,
                     {{"eq2", Family::eq2}, {"eq4", Family::eq4}, {"eq8", Family::eq8}, {"generic-H", Family::generic_h}});
    r.integer("equation.dim", eq.dim);
    r.number("equation.m", eq.m);
    r.text("equation.f", eq.f);
    r.text("equation.H", eq.hamiltonian);
    r.boolean("equation.exp_change", eq.exp_change);
    r.number("equation.v_min", eq.v_min);
    r.number("equation.v_max", eq.v_max);
    r.choice<DriftSign>("equation.drift", eq.drift, {{"printed", DriftSign::printed}, {"derived", DriftSign::derived}});

    r.number("chi.alpha", cfg.chi.alpha);
    r.number("chi.scale", cfg.chi.scale);

    auto& ck = cfg.check;
    if (eq.family == Family::eq8) ck.clause = Clause::parabolic;
    r.choice<Clause>("check.clause", ck.clause,
                     {{"i", Clause::i}, {"ii", Clause::ii}, {"iii", Clause::iii}, {"parabolic", Clause::parabolic}});
    r.number("check.eta", ck.eta);
    if (r.has("check.K") && raw.at("check.K").value == "auto") {
        ck.K.reset();
    } else {
        r.number("check.K", ck.K);
    }
    r.number("check.nu", ck.nu);
    r.number("check.R", ck.R);
    r.list("check.center", ck.center);
    r.number("check.osc", ck.osc);
    r.integer("check.budget", ck.budget);
    r.number("check.p_span", ck.p_span);
    r.boolean("check.allow_gamma_ge_m", ck.allow_gamma_ge_m);

    auto& sv = cfg.solve;
    r.number("solve.lo", sv.lo);
    r.number("solve.hi", sv.hi);
    r.integer("solve.n", sv.n);
    r.number("solve.ball_radius", sv.ball_radius);
    r.text("solve.boundary", sv.boundary);
    r.text("solve.initial", sv.initial);
    r.number("solve.T", sv.T);
    r.number("solve.dt", sv.dt);
    r.choice<TimeScheme>("solve.scheme", sv.scheme,
                         {{"implicit", TimeScheme::implicit}, {"explicit", TimeScheme::explicit_euler}});
    r.choice<GradientScheme>("solve.gradient", sv.gradient,
                             {{"hybrid", GradientScheme::hybrid}, {"upwind", GradientScheme::upwind}});
    r.number("solve.tol", sv.tol);
    r.integer("solve.max_iter", sv.max_iter);

    auto& ex = cfg.extract;
    r.text("extract.grid", ex.grid);
    r.choice<CouplingKind>("extract.kind", ex.kind,
                           {{"linear", CouplingKind::linear}, {"profile", CouplingKind::profile}});
    r.boolean("extract.flat", ex.flat);
    r.number("extract.rel_tol", ex.rel_tol);
    r.number("extract.l_max", ex.l_max);

    r.integer("lemma.states", cfg.lemma.states);
    r.number("lemma.L", cfg.lemma.L);
    r.number("lemma.nu", cfg.lemma.nu);

    // Range and cross-field checks. Messages name the key they concern.
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    };
    const bool dim_ok = eq.dim == 1 || eq.dim == 2;
    need(dim_ok, "equation.dim: must be 1 or 2");
    const int d = dim_ok ? eq.dim : 1;
    if (ck.clause == Clause::ii) {
        need(eq.m >= 1.0, "equation.m: must be >= 1");
    } else {
        need(eq.m > 1.0, "equation.m: must be > 1 unless check.clause = ii");
    }
    try {
        validate_chi(cfg.chi);
    } catch (const ValidationError& e) {
        problems.push_back(std::string("chi: ") + e.what());
    }
    const double gamma = 1.0 + 2.0 * cfg.chi.alpha;
    if (eq.family == Family::eq2 && !(gamma < eq.m) && !ck.allow_gamma_ge_m) {
        std::ostringstream msg;
        msg << "chi.alpha: gamma = 1 + 2 alpha = " << gamma << " must be < m = " << eq.m
            << " for eq2 (set check.allow_gamma_ge_m = true to override)";
        problems.push_back(msg.str());
    }
    if (eq.family == Family::eq8) {
        need(ck.clause == Clause::parabolic, "check.clause: eq8 requires clause parabolic");
    } else {
        need(ck.clause != Clause::parabolic, "check.clause: parabolic requires family eq8");
    }
    need(ck.eta > 0.0, "check.eta: must be positive");
    need(!ck.K || *ck.K > 0.0, "check.K: must be positive");
    need(!ck.nu || *ck.nu > 0.0, "check.nu: must be positive");
    need(ck.R > 0.0, "check.R: must be positive");
    need(ck.center.empty() || static_cast<int>(ck.center.size()) == d,
         "check.center: needs " + std::to_string(d) + " coordinate(s)");
    need(ck.osc >= 0.0, "check.osc: must be nonnegative");
    need(ck.budget >= 1, "check.budget: must be >= 1");
    need(ck.p_span > 1.0, "check.p_span: must be > 1");

    const auto xs = names("x", d);
    check_expr(r, "equation.f", eq.f, xs);
    for (const auto& key : sigma_keys(d)) {
        if (raw.count(key)) {
            eq.sigma.push_back(raw.at(key).value);
            check_expr(r, key, raw.at(key).value, xs);
        }
    }
    for (const auto& key : {"equation.sigma12", "equation.sigma21", "equation.sigma22"}) {
        if (d == 1 && raw.count(key)) r.bad(key, "not used when dim = 1");
    }
    if (!eq.sigma.empty() && eq.sigma.size() != sigma_keys(d).size()) {
        problems.push_back("equation.sigma: give all of " + join(sigma_keys(d), ", ") + " or none");
        eq.sigma.clear();
    }
    if (!eq.sigma.empty() && eq.family != Family::eq4 && eq.family != Family::eq8) {
        problems.push_back("equation.sigma: only eq4 and eq8 take a diffusion");
    }
    if (eq.family == Family::generic_h) {
        if (eq.hamiltonian.empty()) {
            problems.push_back("equation.H: required for generic-H");
        } else {
            check_expr(r, "equation.H", eq.hamiltonian, names("p", d));
        }
    } else if (!eq.hamiltonian.empty()) {
        problems.push_back("equation.H: only generic-H takes a Hamiltonian");
    }
    if (eq.exp_change) {
        need(eq.family == Family::eq4 || eq.family == Family::eq8, "equation.exp_change: only for eq4 and eq8");
        need(eq.v_min >= 0.0, "equation.v_min: must be >= 0 (u = exp(v) >= 1)");
        need(eq.v_max > eq.v_min, "equation.v_max: must exceed v_min");
    }

    need(sv.hi > sv.lo, "solve.hi: must exceed solve.lo");
    need(sv.n >= 9, "solve.n: must be >= 9");
    need(!sv.ball_radius || *sv.ball_radius > 0.0, "solve.ball_radius: must be positive");
    need(sv.T > 0.0, "solve.T: must be positive");
    need(sv.dt > 0.0, "solve.dt: must be positive");
    need(sv.tol > 0.0, "solve.tol: must be positive");
    need(sv.max_iter >= 1, "solve.max_iter: must be >= 1");
    auto xt = xs;
    if (eq.family == Family::eq8) xt.insert("t");
    if (raw.count("solve.boundary")) check_expr(r, "solve.boundary", sv.boundary, xt);
    if (!sv.initial.empty()) check_expr(r, "solve.initial", sv.initial, xs);

    need(ex.rel_tol > 0.0, "extract.rel_tol: must be positive");
    need(ex.l_max >= 1.0, "extract.l_max: must be >= 1");
    need(cfg.lemma.states >= 1, "lemma.states: must be >= 1");
    need(!cfg.lemma.L || *cfg.lemma.L >= 1.0, "lemma.L: must be >= 1");
    need(!cfg.lemma.nu || *cfg.lemma.nu > 0.0, "lemma.nu: must be positive");

    for (const auto& [key, e] : raw) cfg.resolved[key] = e.value;
    return cfg;
}

// Central difference of e in p_k at step h max(1, |p_k|).
Vec p_gradient(const Expr& e, const Vec& p) {
    Bindings b;
    b.p = p;
    Vec g(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(p(k)));
        b.p(k) = p(k) + h;
        const double up = e.eval(b);
        b.p(k) = p(k) - h;
        const double down = e.eval(b);
        b.p(k) = p(k);
        g(k) = (up - down) / (2.0 * h);
    }
    return g;
}

std::function<double(const Vec&)> x_function(const std::string& text) {
    const Expr e = Expr::parse(text);
    return [e](const Vec& x) {
        Bindings b;
        b.x = x;
        return e.eval(b);
    };
}

MatrixField sigma_field(const RunConfig& cfg) {
    const int d = cfg.equation.dim;
    std::vector<Expr> entries;
    for (const auto& s : cfg.equation.sigma) entries.push_back(Expr::parse(s));
    MatrixField m;
    m.value = [entries, d](const Vec& x) {
        Bindings b;
        b.x = x;
        Mat s(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) s(i, j) = entries[static_cast<std::size_t>(i * d + j)].eval(b);
        }
        return s;
    };
    m.partials = [entries, d](const Vec& x) {
        Bindings b;
        b.x = x;
        std::vector<Mat> out(static_cast<std::size_t>(d), Mat::Zero(d, d));
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const Vec g = grad_expr(entries[static_cast<std::size_t>(i * d + j)], b);
                for (int k = 0; k < d; ++k) out[static_cast<std::size_t>(k)](i, j) = g(k);
            }
        }
        return out;
    };
    return m;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : ValidationError("invalid run config:\n  " + join(problems, "\n  ")), problems_(std::move(problems)) {}

std::string to_string(Family f) {
    switch (f) {
        case Family::eq2: return "eq2";
        case Family::eq4: return "eq4";
        case Family::eq8: return "eq8";
        case Family::generic_h: return "generic-H";
    }
    return "?";
}

Vec RunConfig::center() const {
    Vec c = Vec::Zero(equation.dim);
    for (std::size_t k = 0; k < check.center.size() && static_cast<Eigen::Index>(k) < c.size(); ++k) {
        c(static_cast<Eigen::Index>(k)) = check.center[k];
    }
    return c;
}

RunConfig parse_run_config(std::istream& in, const std::vector<std::string>& overrides) {
    std::map<std::string, Entry> raw;
    std::vector<std::string> problems;
    parse_lines(in, raw, problems);
    for (const auto& o : overrides) apply_override(o, raw, problems);
    RunConfig cfg = build(raw, problems);
    if (!problems.empty()) throw ConfigError(problems);
    return cfg;
}

RunConfig parse_run_config(std::istream& in) { return parse_run_config(in, {}); }

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config '" + path + "'");
    return parse_run_config(in);
}

ScalarField build_source(const RunConfig& cfg) {
    const Expr e = Expr::parse(cfg.equation.f);
    ScalarField f;
    f.value = [e](const Vec& x) {
        Bindings b;
        b.x = x;
        return e.eval(b);
    };
    f.grad = [e](const Vec& x) {
        Bindings b;
        b.x = x;
        return grad_expr(e, b);
    };
    return f;
}

EquationModel build_model(const RunConfig& cfg) {
    const auto& eq = cfg.equation;
    const ScalarField f = build_source(cfg);
    switch (eq.family) {
        case Family::eq2: return make_power_model(eq.dim, eq.m, f);
        case Family::eq4:
        case Family::eq8: {
            std::optional<MatrixField> sigma;
            double lip = -1.0;
            if (!eq.sigma.empty()) {
                sigma = sigma_field(cfg);
                lip = estimate_lip_M(*sigma, cfg.center(), cfg.check.R);
            }
            if (eq.exp_change) {
                ExpChangeSpec spec;
                spec.dim = eq.dim;
                spec.m = eq.m;
                spec.f = f;
                spec.sigma = sigma.value_or(MatrixField::identity(eq.dim));
                spec.v_min = eq.v_min;
                spec.v_max = eq.v_max;
                spec.lip_M = lip;
                spec.drift = eq.drift;
                EquationModel model = exp_change_of_variable(spec);
                if (eq.family == Family::eq8) {
                    model.name = "eq8-exp";
                    model.parabolic = true;
                }
                return model;
            }
            EquationModel model = make_power_model(eq.dim, eq.m, f, sigma, lip);
            if (eq.family == Family::eq8) {
                model.name = "eq8";
                model.parabolic = true;
            }
            return model;
        }
        case Family::generic_h: {
            const Expr h = Expr::parse(eq.hamiltonian);
            return make_hamiltonian_model(
                eq.dim,
                [h](const Vec& p) {
                    Bindings b;
                    b.p = p;
                    return h.eval(b);
                },
                [h](const Vec& p) { return p_gradient(h, p); }, f);
        }
    }
    throw ValidationError("unknown equation family");
}

namespace {

Domain domain_of(const RunConfig& cfg) {
    Domain dom;
    dom.dims = cfg.equation.dim;
    dom.lo = cfg.solve.lo;
    dom.hi = cfg.solve.hi;
    dom.n = cfg.solve.n;
    if (cfg.solve.ball_radius) dom.ball = Ball{cfg.center(), *cfg.solve.ball_radius};
    return dom;
}

std::function<Mat(const Vec&)> diffusion_of(const RunConfig& cfg) {
    if (cfg.equation.sigma.empty()) return {};
    const MatrixField s = sigma_field(cfg);
    return [s](const Vec& x) {
        const Mat v = s.value(x);
        return Mat(v * v.transpose());
    };
}

}  // namespace

EllipticProblem build_elliptic(const RunConfig& cfg) {
    if (cfg.equation.family != Family::eq2 && cfg.equation.family != Family::eq4) {
        throw ValidationError("solve: elliptic solves take family eq2 or eq4");
    }
    EllipticProblem p;
    p.domain = domain_of(cfg);
    p.m = cfg.equation.m;
    p.f = build_source(cfg).value;
    p.diffusion = diffusion_of(cfg);
    p.boundary = x_function(cfg.solve.boundary);
    p.boundary_description = "u = " + cfg.solve.boundary;
    return p;
}

ParabolicProblem build_parabolic(const RunConfig& cfg) {
    if (cfg.equation.family != Family::eq8) throw ValidationError("solve: parabolic solves take family eq8");
    ParabolicProblem p;
    p.domain = domain_of(cfg);
    p.m = cfg.equation.m;
    p.f = build_source(cfg).value;
    p.diffusion = diffusion_of(cfg);
    const Expr g = Expr::parse(cfg.solve.boundary);
    p.boundary = [g](const Vec& x, double t) {
        Bindings b;
        b.x = x;
        b.t = t;
        return g.eval(b);
    };
    const std::string init = cfg.solve.initial.empty() ? cfg.solve.boundary : cfg.solve.initial;
    const Expr u0 = Expr::parse(init);
    p.initial = [u0](const Vec& x) {
        Bindings b;
        b.x = x;
        b.t = 0.0;
        return u0.eval(b);
    };
    p.T = cfg.solve.T;
    p.boundary_description = "u = " + cfg.solve.boundary;
    return p;
}

}  // namespace bernstein
