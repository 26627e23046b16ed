// SPDX-License-Identifier: MIT
#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "bernstein/auxfun.hpp"
#include "bernstein/doubling.hpp"
#include "bernstein/error.hpp"
#include "bernstein/grid_io.hpp"
#include "bernstein/pde.hpp"
#include "report.hpp"

namespace bernstein::cli {

namespace {

struct Profiles {
    PhiProfile phi;
    std::shared_ptr<const PsiProfile> psi;
    LocalizationProfile loc;
};

Profiles build_profiles(const RunConfig& cfg) {
    validate_chi(cfg.chi);
    Profiles p;
    p.phi = build_phi(cfg.chi);
    p.psi = std::make_shared<const PsiProfile>(build_psi(cfg.chi, calibrate_k3(cfg.chi)));
    p.loc = build_localization(cfg.center(), cfg.check.R, p.psi);
    return p;
}

SamplerOptions sampler_for(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    SamplerOptions s;
    s.center = cfg.center();
    s.radius = cfg.check.R;
    if (cfg.equation.exp_change) {
        s.r_min = cfg.equation.v_min;
        s.r_max = cfg.equation.v_max;
    } else {
        s.r_min = -cfg.check.osc;
        s.r_max = cfg.check.osc;
    }
    s.p_span = cfg.check.p_span;
    s.budget = cfg.check.budget;
    s.seed = ctx.seed;
    return s;
}

double structure_K(const RunConfig& cfg, const Profiles& prof, double nu) {
    return cfg.check.K ? *cfg.check.K : lemma_constant(prof.phi.k1(), prof.loc.k2(), nu);
}

BoundCertificate certify(const Context& ctx, const EquationModel& model, double K, double nu) {
    FindLOptions opts;
    opts.sampler = sampler_for(ctx);
    opts.nu = nu;
    BoundCertificate c = find_min_L(model, ctx.cfg.check.clause, ctx.cfg.chi, ctx.cfg.check.eta, K, opts);
    c.R = ctx.cfg.check.R;
    return c;
}

Status from_certificate(CertStatus s) {
    switch (s) {
        case CertStatus::certified: return Status::ok;
        case CertStatus::violated: return Status::violated;
        case CertStatus::indeterminate: return Status::indeterminate;
    }
    return Status::error;
}

json base_report(const Context& ctx, const std::string& subcommand) {
    return {{"tool", "bernstein"},
            {"version", BERNSTEIN_VERSION},
            {"subcommand", subcommand},
            {"seed", ctx.seed},
            {"config", config_json(ctx.cfg)}};
}

class Run {
public:
    Run(const Context& ctx, std::string name) : ctx_(ctx), report_(base_report(ctx, name)) {
        verdict_.subcommand = std::move(name);
    }

    json& result() { return report_["result"]; }

    void artifact(const std::string& name, const std::string& text) {
        verdict_.artifacts.push_back(write_artifact(ctx_.out_dir, name, text));
        names_.push_back(name);
    }

    void say(const std::string& line) {
        if (ctx_.log) *ctx_.log << line << "\n";
    }

    Verdict finish(Status status, const std::string& message) {
        verdict_.status = status;
        verdict_.message = message;
        report_["status"] = to_string(status);
        report_["message"] = message;
        names_.push_back("report.json");
        report_["artifacts"] = names_;
        verdict_.artifacts.push_back(write_artifact(ctx_.out_dir, "report.json", report_.dump(2) + "\n"));
        say(verdict_.subcommand + ": " + to_string(status) + (message.empty() ? "" : " (" + message + ")"));
        return verdict_;
    }

private:
    const Context& ctx_;
    json report_;
    Verdict verdict_;
    std::vector<std::string> names_;
};

std::string grid_text(const GridField& g) {
    std::ostringstream out;
    write_grid(g, out);
    return out.str();
}

// The field whose gradient the certificate bounds: log u after the exp change.
GridField certified_field(const RunConfig& cfg, const GridField& u) {
    if (!cfg.equation.exp_change) return u;
    GridField v = u;
    for (double& x : v.values()) {
        if (!(x > 0.0)) throw DomainError("verify: exp change of variable needs u > 0 on the grid");
        x = std::log(x);
    }
    return v;
}

Ball inner_ball(const RunConfig& cfg) { return Ball{cfg.center(), 0.25 * cfg.check.R}; }

ExtractResult run_extract(const Context& ctx, const GridField& field, const Profiles& prof) {
    const auto& ex = ctx.cfg.extract;
    ExtractOptions opts;
    opts.kind = ex.kind;
    opts.phi = &prof.phi;
    opts.flat = ex.flat;
    opts.rel_tol = ex.rel_tol;
    opts.l_max = ex.l_max;
    opts.threads = ctx.threads;
    return extract_lipschitz(field, prof.loc, opts);
}

json extract_json(const ExtractResult& r) {
    return {{"bounded", r.bounded},
            {"L_star", r.bounded ? json(r.l_star) : json(nullptr)},
            {"ball", {{"center", to_json(r.center)}, {"radius", r.ball_radius}}},
            {"schedule", r.schedule},
            {"message", r.message}};
}

std::string trace_csv(const ExtractResult& r) {
    Csv csv({"L", "alpha", "max_value", "on_diagonal"});
    for (const auto& e : r.trace) csv.row({exact(e.L), exact(e.alpha), exact(e.max_value), e.on_diagonal ? "1" : "0"});
    return csv.text();
}

std::string margins_csv(const BoundCertificate& c) {
    Csv csv({"p_norm", "margin"});
    for (const auto& [p, m] : c.profile) csv.row({exact(p), exact(m)});
    return csv.text();
}

std::string probes_csv(const BoundCertificate& c) {
    Csv csv({"L", "margin"});
    for (const auto& [l, m] : c.probes) csv.row({exact(l), exact(m)});
    return csv.text();
}

SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions o;
    o.tol = cfg.solve.tol;
    o.max_iter = cfg.solve.max_iter;
    o.scheme = cfg.solve.gradient;
    return o;
}

TimeOptions time_options(const RunConfig& cfg) {
    TimeOptions o;
    o.scheme = cfg.solve.scheme;
    o.dt = cfg.solve.dt;
    const double T = cfg.solve.T;
    o.save_times = {0.25 * T, 0.5 * T, T};
    o.tol = cfg.solve.tol;
    o.gradient = cfg.solve.gradient;
    return o;
}

json solve_report_json(const SolveReport& r) {
    return {{"residual_norm", r.residual_norm},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"boundary", r.boundary_description}};
}

std::string grad_label(const RunConfig& cfg) { return cfg.equation.exp_change ? "sup |D log u|" : "sup |Du|"; }

bool is_parabolic(const RunConfig& cfg) { return cfg.equation.family == Family::eq8; }

}  // namespace

Verdict cmd_auxfun(const Context& ctx) {
    Run run(ctx, "auxfun");
    const RunConfig& cfg = ctx.cfg;
    const ChiValidation cv = validate_chi(cfg.chi);
    const Profiles prof = build_profiles(cfg);
    constexpr int samples = 1000;

    Csv phi({"t", "value", "derivative"});
    const double phi_end = prof.phi.table().t_end();
    for (int k = 0; k <= samples; ++k) {
        const double t = phi_end * k / samples;
        const ProfileSample s = prof.phi.eval(t);
        phi.row({fixed9(t), fixed9(s.value), fixed9(s.d1)});
    }
    run.artifact("phi.csv", phi.text());

    Csv psi({"t", "value", "derivative"});
    const double psi_end = prof.psi->table().t_end();
    for (int k = 0; k <= samples; ++k) {
        const double t = psi_end * k / samples;
        const ProfileSample s = prof.psi->eval(t);
        psi.row({fixed9(t), fixed9(s.value), fixed9(s.d1)});
    }
    run.artifact("psi.csv", psi.text());

    // C along the first axis, by distance from the center.
    Csv loc({"t", "value", "derivative"});
    const double r_end = prof.loc.admissible_radius();
    for (int k = 0; k <= samples; ++k) {
        const double r = r_end * k / samples;
        Vec x = prof.loc.center();
        x(0) += r;
        const LocalizationSample s = prof.loc.eval(x);
        loc.row({fixed9(r), fixed9(s.value), fixed9(s.grad(0))});
    }
    run.artifact("localization.csv", loc.text());

    run.result() = {
        {"chi", {{"alpha", cfg.chi.alpha}, {"scale", cfg.chi.scale}, {"k_chi", cv.k_chi},
                 {"tail_integral_bound", cv.tail_integral_bound}, {"monotone", cv.monotone}}},
        {"phi", {{"k1", prof.phi.k1()}, {"closed_form", prof.phi.closed_form()}, {"t_end", phi_end}}},
        {"psi", {{"k3", prof.psi->k3()}, {"blowup_abscissa", prof.psi->blowup_abscissa()},
                 {"status", to_string(prof.psi->status())}, {"t_end", psi_end}}},
        {"localization", {{"center", to_json(prof.loc.center())}, {"R", prof.loc.radius()},
                          {"k2", prof.loc.k2()}, {"admissible_radius", r_end}}}};
    std::ostringstream msg;
    msg << "K1 = " << exact(prof.phi.k1()) << ", K3 = " << exact(prof.psi->k3()) << ", K2(R) = " << exact(prof.loc.k2());
    run.say(msg.str());
    const bool ok = prof.psi->status() == PsiStatus::calibrated;
    return run.finish(ok ? Status::ok : Status::indeterminate, ok ? "" : "psi " + to_string(prof.psi->status()));
}

Verdict cmd_check(const Context& ctx) {
    Run run(ctx, "check");
    const RunConfig& cfg = ctx.cfg;
    const EquationModel model = build_model(cfg);
    double K = 0.0;
    if (cfg.check.K) {
        K = *cfg.check.K;
    } else {
        K = structure_K(cfg, build_profiles(cfg), cfg.nu());
    }
    const BoundCertificate cert = certify(ctx, model, K, cfg.nu());
    run.artifact("margins.csv", margins_csv(cert));
    run.artifact("probes.csv", probes_csv(cert));
    run.result() = {{"model", model.name}, {"lip_M", model.lip_M}, {"certificate", to_json(cert)}};
    std::ostringstream msg;
    msg << "clause " << to_string(cert.clause) << ": " << to_string(cert.status);
    if (cert.status == CertStatus::certified) msg << ", L = " << exact(cert.L) << ", margin = " << exact(cert.margin);
    run.say(msg.str());
    return run.finish(from_certificate(cert.status), cert.message);
}

Verdict cmd_extract(const Context& ctx) {
    Run run(ctx, "extract");
    const RunConfig& cfg = ctx.cfg;
    const std::string path = ctx.grid.empty() ? cfg.extract.grid : ctx.grid;
    if (path.empty()) throw ValidationError("extract: no grid file (use --grid or extract.grid)");
    const GridField field = read_grid(path);
    if (field.dims() != cfg.equation.dim) throw ValidationError("extract: grid dims differ from equation.dim");
    const Profiles prof = build_profiles(cfg);
    const ExtractResult res = run_extract(ctx, field, prof);
    run.artifact("trace.csv", trace_csv(res));
    run.result() = extract_json(res);
    run.say(res.bounded ? "L* = " + exact(res.l_star) : res.message);
    return run.finish(res.bounded ? Status::ok : Status::violated, res.message);
}

Verdict cmd_solve(const Context& ctx) {
    Run run(ctx, "solve");
    const RunConfig& cfg = ctx.cfg;
    const Ball ball = inner_ball(cfg);
    if (is_parabolic(cfg)) {
        const ParabolicSolution sol = solve_parabolic(build_parabolic(cfg), time_options(cfg));
        json snaps = json::array();
        for (std::size_t k = 0; k < sol.snapshots.size(); ++k) {
            const std::string name = "snapshot_" + std::to_string(k) + ".grid";
            run.artifact(name, grid_text(sol.snapshots[k]));
            const double sup = measure_sup_grad(certified_field(cfg, sol.snapshots[k]), ball);
            snaps.push_back({{"t", *sol.snapshots[k].time}, {"sup_grad", sup}, {"file", name}});
        }
        run.result() = {{"report", solve_report_json(sol.report)},
                        {"steps", sol.steps},
                        {"max_step_residual", sol.max_step_residual},
                        {"measured", grad_label(cfg)},
                        {"snapshots", snaps}};
        run.say("steps = " + std::to_string(sol.steps) + ", max step residual = " + exact(sol.max_step_residual));
        return run.finish(Status::ok, "");
    }
    const EllipticSolution sol = solve_elliptic(build_elliptic(cfg), solve_options(cfg));
    run.artifact("solution.grid", grid_text(sol.field));
    const double sup = measure_sup_grad(certified_field(cfg, sol.field), ball);
    run.result() = {{"report", solve_report_json(sol.report)},
                    {"measured", grad_label(cfg)},
                    {"sup_grad", sup},
                    {"ball", {{"center", to_json(ball.center)}, {"radius", ball.radius}}}};
    run.say("residual = " + exact(sol.report.residual_norm) + ", " + grad_label(cfg) + " = " + exact(sup));
    return run.finish(Status::ok, "");
}

Verdict cmd_verify(const Context& ctx) {
    Run run(ctx, "verify");
    const RunConfig& cfg = ctx.cfg;
    const Ball ball = inner_ball(cfg);
    const EquationModel model = build_model(cfg);
    const Profiles prof = build_profiles(cfg);
    const double nu = cfg.nu();
    const BoundCertificate cert = certify(ctx, model, structure_K(cfg, prof, nu), nu);
    run.artifact("margins.csv", margins_csv(cert));
    json& res = run.result();
    res["certificate"] = to_json(cert);
    res["measured"] = grad_label(cfg);

    std::vector<std::string> failures;
    const bool certified = cert.status == CertStatus::certified;
    if (!certified) failures.push_back("structure certificate " + to_string(cert.status));

    GridField last;
    double bound_for_extract = cert.L;
    if (is_parabolic(cfg)) {
        const ParabolicSolution sol = solve_parabolic(build_parabolic(cfg), time_options(cfg));
        res["solve"] = solve_report_json(sol.report);
        // L_T must also make (1 + nu) k_T <= eta.
        const double alpha = cfg.chi.alpha;
        const double T = cfg.solve.T;
        const double l_eta = std::pow((1.0 + nu) / (cfg.check.eta * alpha * cfg.chi.scale * T), 1.0 / alpha);
        const double l_T = std::max({cert.L, l_eta, 1.0});
        const double k_T = calibrate_k_t(cfg.chi, l_T, T);
        const ParabolicSchedule sched = solve_parabolic_L(cfg.chi, k_T, l_T, T);
        res["schedule"] = {{"L_T", l_T}, {"k_T", k_T}, {"L_T_from_eta", l_eta}};
        json snaps = json::array();
        for (std::size_t k = 0; k < sol.snapshots.size(); ++k) {
            const double t = *sol.snapshots[k].time;
            const double sup = measure_sup_grad(certified_field(cfg, sol.snapshots[k]), ball);
            const double bound = sched(t);
            snaps.push_back({{"t", t}, {"sup_grad", sup}, {"L_t", bound}, {"within", sup <= bound}});
            if (!(sup <= bound)) failures.push_back("measured gradient exceeds L(t) at t = " + exact(t));
        }
        res["snapshots"] = snaps;
        last = sol.snapshots.back();
        bound_for_extract = l_T;
        run.artifact("solution.grid", grid_text(last));
    } else {
        const EllipticSolution fine = solve_elliptic(build_elliptic(cfg), solve_options(cfg));
        RunConfig coarse_cfg = cfg;
        coarse_cfg.solve.n = (cfg.solve.n - 1) / 2 + 1;
        if (coarse_cfg.solve.n < 9) throw ValidationError("verify: solve.n too small for a refinement check");
        const EllipticSolution coarse = solve_elliptic(build_elliptic(coarse_cfg), solve_options(coarse_cfg));
        const double sup = measure_sup_grad(certified_field(cfg, fine.field), ball);
        const double sup_coarse = measure_sup_grad(certified_field(cfg, coarse.field), ball);
        const double drift = std::abs(sup - sup_coarse) / std::max(sup, 1e-300);
        res["solve"] = solve_report_json(fine.report);
        res["sup_grad"] = sup;
        res["sup_grad_coarse"] = sup_coarse;
        res["refinement_drift"] = drift;
        res["ball"] = {{"center", to_json(ball.center)}, {"radius", ball.radius}};
        if (certified && !(sup <= cert.L)) failures.push_back("measured gradient exceeds the certified L");
        last = fine.field;
        run.artifact("solution.grid", grid_text(last));
    }

    const ExtractResult ex = run_extract(ctx, certified_field(cfg, last), prof);
    run.artifact("trace.csv", trace_csv(ex));
    res["extract"] = extract_json(ex);
    if (!ex.bounded) {
        failures.push_back("extraction found no bound");
    } else if (certified && !(ex.l_star <= bound_for_extract)) {
        failures.push_back("extracted L* exceeds the certified bound");
    }
    res["failures"] = failures;

    std::ostringstream msg;
    msg << "certificate " << to_string(cert.status);
    if (certified) msg << " L = " << exact(cert.L);
    if (ex.bounded) msg << ", L* = " << exact(ex.l_star);
    if (res.contains("sup_grad")) msg << ", " << grad_label(cfg) << " = " << exact(res["sup_grad"].get<double>());
    run.say(msg.str());

    Status status = Status::ok;
    if (!certified) {
        status = from_certificate(cert.status);
    } else if (!failures.empty()) {
        status = Status::violated;
    }
    std::string message;
    for (std::size_t i = 0; i < failures.size(); ++i) message += (i ? "; " : "") + failures[i];
    return run.finish(status, message);
}

Verdict cmd_lemma(const Context& ctx) {
    Run run(ctx, "lemma");
    const RunConfig& cfg = ctx.cfg;
    const EquationModel model = build_model(cfg);
    const Profiles prof = build_profiles(cfg);
    const double nu = cfg.lemma.nu.value_or(cfg.nu());
    const double K = structure_K(cfg, prof, nu);

    LemmaSuiteOptions opts;
    opts.states = cfg.lemma.states;
    opts.seed = ctx.seed;
    opts.nu = nu;
    json& res = run.result();
    res["K"] = K;
    res["nu"] = nu;
    if (cfg.lemma.L) {
        opts.L = *cfg.lemma.L;
        res["L_source"] = "config";
    } else {
        const BoundCertificate cert = certify(ctx, model, K, nu);
        res["certificate"] = to_json(cert);
        if (cert.status != CertStatus::certified) {
            return run.finish(from_certificate(cert.status), "no certified L to test at: " + cert.message);
        }
        opts.L = cert.L;
        res["L_source"] = "certificate";
    }
    res["L"] = opts.L;
    const LemmaSuiteResult r = run_lemma_suite(model, prof.phi, prof.loc, opts);
    res["states"] = r.states;
    res["attempts"] = r.attempts;
    res["zeros"] = r.zeros;
    res["failures"] = r.failures;
    res["worst_relative_gprime"] = r.zeros > 0 ? json(r.worst_relative_gprime) : json(nullptr);
    if (r.counterexample) {
        const GPathState& s = *r.counterexample;
        res["counterexample"] = {{"x", to_json(s.x)}, {"y", to_json(s.y)}, {"ux", s.ux}, {"uy", s.uy},
                                 {"p", to_json(s.p)}, {"q", to_json(s.q)}, {"Y", to_json(s.Y)},
                                 {"gamma1", s.gamma1}, {"nu", s.nu}};
    } else {
        res["counterexample"] = nullptr;
    }
    run.say(std::to_string(r.states) + " states, " + std::to_string(r.zeros) + " zeros, " +
            std::to_string(r.failures) + " failures at L = " + exact(opts.L));
    return run.finish(r.failures == 0 ? Status::ok : Status::violated,
                      r.failures == 0 ? "" : std::to_string(r.failures) + " zeros with g' <= 0");
}

}  // namespace bernstein::cli
