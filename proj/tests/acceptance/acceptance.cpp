// SPDX-License-Identifier: MIT
//
// Acceptance checks, one PASS/FAIL line each.
//
//   acceptance            run every check
//   acceptance 7 9 11s    run the listed ones
//
// Exit status is 0 only when every selected check passes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bernstein/auxfun.hpp"
#include "bernstein/cli.hpp"
#include "bernstein/doubling.hpp"
#include "bernstein/equation.hpp"
#include "bernstein/error.hpp"
#include "bernstein/pde.hpp"
#include "bernstein/run_config.hpp"
#include "bernstein/structure.hpp"
#include "oracles.hpp"

using namespace bernstein;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = BERNSTEIN_CONFIG_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
    /// Runtime ceiling in seconds; 0 means none.
    double budget = 0.0;
};

std::string num(double v, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bernstein_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

Vec zero(int d) { return Vec::Zero(d); }

GridField line(int n, const std::function<double(double)>& u) {
    GridField g = GridField::box(1, n, -1.0, 1.0);
    g.fill([&](const Vec& x) { return u(x(0)); });
    return g;
}

LocalizationProfile localization(int dim, double R, const ChiSpec& chi = {0.25, 1.0}) {
    auto psi = std::make_shared<const PsiProfile>(build_psi(chi, calibrate_k3(chi)));
    return build_localization(zero(dim), R, psi);
}

// ---------------------------------------------------------------------------

Outcome phi_closed_form() {
    const PhiProfile phi = build_phi({0.5, 1.0});
    double worst_value = 0.0;
    double worst_slope = 0.0;
    for (int k = 0; k <= 9900; ++k) {
        const double t = 0.99 * k / 9900.0;
        const ProfileSample s = phi.eval(t);
        const double exact_slope = 1.0 / ((1.0 - t) * (1.0 - t));
        worst_value = std::max(worst_value, std::abs(s.value - t / (1.0 - t)));
        worst_slope = std::max(worst_slope, std::abs(s.d1 - exact_slope) / exact_slope);
    }
    return {worst_value <= 1e-8 && worst_slope <= 1e-8,
            "max |phi - t/(1-t)| = " + num(worst_value, 3) + ", max rel |phi' - (1-t)^-2| = " + num(worst_slope, 3),
            1.0};
}

Outcome psi_calibration() {
    bool ok = true;
    std::ostringstream detail;
    for (const ChiSpec chi : {ChiSpec{0.25, 1.0}, ChiSpec{0.5, 1.0}}) {
        const double k3 = calibrate_k3(chi);
        const PsiProfile psi = build_psi(chi, k3);
        const double t_star = oracle::psi_blowup(chi.alpha, chi.scale, k3);
        ok = ok && t_star >= 0.999 && t_star <= 1.001 && psi.status() == PsiStatus::calibrated;

        // psi'' = K3 psi chi(psi)^2, with psi'' from Richardson differences of psi'.
        double worst_residual = 0.0;
        const double end = psi.table().t_end();
        const double h = 1e-5 * end;
        for (int k = 1; k < 1000; ++k) {
            const double t = end * k / 1000.0;
            if (t + h >= end) break;
            auto slope = [&](double x) { return psi.eval(x).d1; };
            const double c1 = (slope(t + h) - slope(t - h)) / (2 * h);
            const double c2 = (slope(t + 0.5 * h) - slope(t - 0.5 * h)) / h;
            const double d2 = (4 * c2 - c1) / 3;
            const double v = psi.eval(t).value;
            const double rhs = k3 * v * chi(v) * chi(v);
            worst_residual = std::max(worst_residual, std::abs(d2 - rhs) / (1 + std::abs(d2)));
        }
        ok = ok && worst_residual <= 1e-6;

        std::size_t envelope_breaks = 0;
        const auto& tab = psi.table();
        for (std::size_t i = 0; i < tab.size(); ++i) {
            if (tab.d1[i] > std::sqrt(2 * k3) * tab.value[i] * chi(tab.value[i]) * (1 + 1e-12)) ++envelope_breaks;
        }
        ok = ok && envelope_breaks == 0;
        detail << "alpha " << chi.alpha << ": t* = " << num(t_star, 7) << ", residual " << num(worst_residual, 3)
               << ", envelope breaks " << envelope_breaks << "; ";
    }
    return {ok, detail.str(), 5.0};
}

Outcome localization_scaling() {
    const ChiSpec chi{0.25, 1.0};
    auto psi = std::make_shared<const PsiProfile>(build_psi(chi, calibrate_k3(chi)));
    bool ok = true;
    std::ostringstream detail;
    for (double R : {0.5, 1.0, 2.0}) {
        const double ratio = build_localization(zero(2), 2 * R, psi).k2() / build_localization(zero(2), R, psi).k2();
        ok = ok && ratio >= 0.24 && ratio <= 0.26;
        detail << "K2(" << 2 * R << ")/K2(" << R << ") = " << num(ratio) << "; ";
    }
    return {ok, detail.str(), 5.0};
}

Outcome matrix_path_identity() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n(0.0, 1.0);
    const double nu = 0.1;
    double worst_identity = 0.0;
    double worst_oracle = 0.0;
    int count = 0;
    for (double g1 : {1.0, 10.0, 100.0}) {
        for (int k = 0; k < 334; ++k) {
            Mat B(3, 3);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) B(i, j) = n(rng);
            Mat Y = -g1 * B * B.transpose() / 3.0;
            // Admissible: -Y <= (1 + nu/2) gamma1.
            const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(Y).eigenvalues().minCoeff();
            if (-lmin > (1 + nu / 2) * g1) Y *= (1 + nu / 2) * g1 / -lmin;
            const double c = (1 + nu) * g1;
            for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                const MatrixPathValue z = matrix_path(Y, c, tau);
                worst_identity = std::max(worst_identity, (z.dZ + z.Z * z.Z / c).norm() / (1 + z.Z.squaredNorm()));
            }
            Vec r(3);
            r << n(rng), n(rng), n(rng);
            const double value = r.dot(matrix_path(Y, c, 1.0).Z * r);
            const double brute = oracle::inf_convolution(Y, c, r);
            worst_oracle = std::max(worst_oracle, std::abs(value - brute) / (std::abs(brute) + 1e-3 * c * r.squaredNorm()));
            ++count;
        }
    }
    return {count >= 1000 && worst_identity <= 1e-9 && worst_oracle <= 1e-3,
            std::to_string(count) + " matrices, identity error " + num(worst_identity, 3) +
                " (relative to 1+|Z|^2), inf-convolution error " + num(worst_oracle, 3),
            30.0};
}

Outcome lemma_suite() {
    const ChiSpec chi{0.25, 1.0};
    const EquationModel model = make_power_model(1, 2.0, ScalarField::constant(0.0, 1));
    const PhiProfile phi = build_phi(chi);
    const LocalizationProfile loc = localization(1, 1.0, chi);
    const double eta = 0.25;
    const double nu = eta / 3.0;
    const double K = lemma_constant(phi.k1(), loc.k2(), nu);
    FindLOptions fo;
    fo.sampler.center = zero(1);
    fo.nu = nu;
    const BoundCertificate cert = find_min_L(model, Clause::i, chi, eta, K, fo);
    if (cert.status != CertStatus::certified) return {false, "no certified L: " + cert.message, 60.0};
    LemmaSuiteOptions lo;
    lo.states = 1000;
    lo.L = cert.L;
    lo.nu = nu;
    const LemmaSuiteResult r = run_lemma_suite(model, phi, loc, lo);
    return {r.states == 1000 && r.zeros > 0 && r.failures == 0,
            "K = " + num(K) + ", L = " + num(cert.L) + ", " + std::to_string(r.states) + " states, " +
                std::to_string(r.zeros) + " zeros, " + std::to_string(r.failures) + " with g' <= 0",
            60.0};
}

Outcome structure_certificate() {
    bool ok = true;
    std::ostringstream detail;
    for (auto [m, alpha] : {std::pair{2.0, 0.25}, std::pair{3.0, 0.5}}) {
        const EquationModel model = make_power_model(1, m, ScalarField::constant(0.0, 1));
        FindLOptions fo;
        fo.sampler.center = zero(1);
        fo.nu = 0.25 / 3.0;
        const BoundCertificate cert = find_min_L(model, Clause::i, {alpha, 1.0}, 0.25, 1.0, fo);
        const bool good = cert.status == CertStatus::certified && std::isfinite(cert.L);
        ok = ok && good;
        detail << "(m " << m << ", alpha " << alpha << "): " << to_string(cert.status) << " L = " << num(cert.L) << "; ";
    }
    // gamma = m forced through a config override.
    const fs::path out = scratch("6");
    std::ostringstream sink;
    const cli::Verdict v = cli::run({"check", "--config", kConfigs + "/eq2_m2_1d.cfg", "--out", out.string(), "--set",
                                     "chi.alpha=0.5", "--set", "check.allow_gamma_ge_m=true"},
                                    sink, sink);
    const bool rejected = v.status == cli::Status::violated || v.status == cli::Status::indeterminate;
    ok = ok && rejected;
    detail << "gamma = m override: " << cli::to_string(v.status);
    return {ok, detail.str(), 60.0};
}

Outcome extractor_oracle() {
    const ExtractResult slope = extract_lipschitz(line(401, [](double x) { return 3.0 * x; }), localization(1, 1.0), {});
    const bool slope_ok = slope.bounded && slope.l_star >= 3.0 && slope.l_star <= 3.15;

    auto u = [](double x) { return -std::log(1.0 + 0.5 * x); };
    const GridField g = line(401, u);
    const double R = 0.5;
    const ExtractResult log_field = extract_lipschitz(g, localization(1, R), {});
    auto brute_on = [&](double radius) {
        std::vector<Eigen::VectorXd> nodes;
        std::vector<double> values;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.coord(k).norm() <= radius) {
                nodes.push_back(g.coord(k));
                values.push_back(g[k]);
            }
        }
        return oracle::discrete_lipschitz(nodes, values);
    };
    // The stated ball B(0, 1/4), and the extractor's own B(0, R/4).
    const double brute = brute_on(0.25);
    const double brute_inner = brute_on(log_field.ball_radius);
    const bool log_ok = log_field.bounded && std::abs(log_field.l_star - brute) <= 0.10 * brute &&
                        std::abs(log_field.l_star - brute_inner) <= 0.10 * brute_inner;
    return {slope_ok && log_ok,
            "3x: L* = " + num(slope.l_star) + "; -log(1+x/2) with R = 1/2: L* = " + num(log_field.l_star) +
                " vs brute force " + num(brute) + " on B(0, 1/4) and " + num(brute_inner) + " on B(0, R/4)",
            30.0};
}

Outcome verify_end_to_end() {
    const fs::path out = scratch("8");
    std::ostringstream sink;
    const cli::Verdict v =
        cli::run({"verify", "--config", kConfigs + "/eq2_m2_1d.cfg", "--out", out.string()}, sink, sink);
    if (v.status != cli::Status::ok) return {false, "verify: " + cli::to_string(v.status) + " " + v.message, 60.0};
    const nlohmann::json report = read_json(out / "report.json");
    const auto& res = report.at("result");
    const double L = res.at("certificate").at("L").get<double>();
    const double sup = res.at("sup_grad").get<double>();
    const double drift = res.at("refinement_drift").get<double>();
    const double closed = 4.0 / 7.0;
    const double err = std::abs(sup - closed) / closed;
    return {sup <= L && err <= 0.02 && drift <= 0.05,
            "sup|Du| = " + num(sup) + " <= L = " + num(L) + ", vs 4/7 " + num(100 * err, 3) + "%, drift " +
                num(100 * drift, 3) + "%",
            60.0};
}

Outcome parabolic_schedule() {
    const ChiSpec chi{0.5, 1.0};
    const double k_t = calibrate_k_t(chi, 100.0, 1.0);
    const ParabolicSchedule s = solve_parabolic_L(chi, k_t, 100.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k <= 950; ++k) {
        const double t = 0.05 + 0.95 * k / 950.0;
        const double exact = std::pow(0.1 * t, -2.0);
        worst = std::max(worst, std::abs(s(t) - exact) / exact);
    }
    const double k2 = calibrate_k_t(chi, 1e2, 1.0);
    const double k3 = calibrate_k_t(chi, 1e3, 1.0);
    const double k4 = calibrate_k_t(chi, 1e4, 1.0);
    return {std::abs(k_t - 0.2) <= 1e-12 && worst <= 1e-6 && k2 > k3 && k3 > k4,
            "k_T = " + num(k_t, 12) + ", max rel error " + num(worst, 3) + ", k_T(1e2,1e3,1e4) = " + num(k2) + ", " +
                num(k3) + ", " + num(k4),
            5.0};
}

Outcome parabolic_end_to_end() {
    // Schedule from the certificate of the exp-changed parabolic model.
    const RunConfig cfg = load_run_config(kConfigs + "/eq8_exp.cfg");
    const double nu = cfg.nu();
    FindLOptions fo;
    fo.sampler.center = cfg.center();
    fo.sampler.radius = cfg.check.R;
    fo.sampler.r_min = cfg.equation.v_min;
    fo.sampler.r_max = cfg.equation.v_max;
    fo.sampler.budget = cfg.check.budget;
    fo.nu = nu;
    const BoundCertificate cert =
        find_min_L(build_model(cfg), cfg.check.clause, cfg.chi, cfg.check.eta, *cfg.check.K, fo);
    if (cert.status != CertStatus::certified) return {false, "eq8 certificate " + to_string(cert.status), 30.0};
    const double T = 1.0;
    const double alpha = cfg.chi.alpha;
    const double l_eta = std::pow((1.0 + nu) / (cfg.check.eta * alpha * cfg.chi.scale * T), 1.0 / alpha);
    const double l_T = std::max({cert.L, l_eta, 1.0});
    const ParabolicSchedule sched = solve_parabolic_L(cfg.chi, calibrate_k_t(cfg.chi, l_T, T), l_T, T);

    Vec a(2);
    a << 1.2, -1.6;
    ParabolicProblem p;
    p.domain = Domain{2, -1.0, 1.0, 33, std::nullopt};
    p.m = 2.0;
    p.f = [](const Vec&) { return 0.0; };
    p.initial = [a](const Vec& x) { return a.dot(x); };
    p.boundary = [a](const Vec& x, double t) { return a.dot(x) - a.squaredNorm() * t; };
    p.T = T;
    TimeOptions o;
    o.dt = 0.01;
    o.save_times = {T / 4, T / 2};
    const ParabolicSolution sol = solve_parabolic(p, o);
    double worst = 0.0;
    bool within = true;
    std::ostringstream detail;
    for (const GridField& snap : sol.snapshots) {
        const double t = *snap.time;
        for (std::size_t k = 0; k < snap.size(); ++k) {
            worst = std::max(worst, std::abs(snap[k] - (a.dot(snap.coord(k)) - a.squaredNorm() * t)));
        }
        const double sup = measure_sup_grad(snap, {zero(2), 0.5});
        within = within && std::abs(sup - a.norm()) <= 1e-8 && sup <= sched(t);
        detail << "t " << t << ": sup " << num(sup, 10) << " <= L(t) " << num(sched(t)) << "; ";
    }
    return {sol.snapshots.size() == 3 && worst <= 1e-8 && within,
            "max error " + num(worst, 3) + "; " + detail.str(), 30.0};
}

struct PairRun {
    PairMaximum result;
    double seconds = 0.0;
};

PairRun time_pairs(int threads) {
    static const LocalizationProfile loc = localization(2, 1.0);
    static const GridField field = [] {
        GridField g = GridField::box(2, 48, -1.0, 1.0);
        g.fill([](const Vec& x) { return std::sin(2 * x(0)) * std::cos(x(1)) + 0.5 * x(0) * x(1); });
        return g;
    }();
    // Unpruned, so the timing covers every admissible pair rather than what pruning leaves.
    CouplingParams cp;
    cp.L = 1.0;
    cp.alpha_dbl = 1.0 / 64;
    cp.threads = threads;
    cp.prune = false;
    const auto start = std::chrono::steady_clock::now();
    PairRun r;
    r.result = maximize_pairs(field, loc, cp);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

bool same_result(const PairMaximum& a, const PairMaximum& b) {
    return a.found == b.found && a.x_index == b.x_index && a.y_index == b.y_index && a.value == b.value &&
           a.on_diagonal == b.on_diagonal && a.pairs_evaluated == b.pairs_evaluated && a.p == b.p &&
           a.gamma1 == b.gamma1;
}

Outcome pair_performance() {
    const PairRun one = time_pairs(1);
    const PairRun four = time_pairs(4);
    return {one.seconds < 60.0 && same_result(one.result, four.result),
            "n = 48, d = 2: " + std::to_string(one.result.pairs_evaluated) + " pairs evaluated in " +
                num(one.seconds, 3) + " s single-threaded; 4-thread result identical: " +
                (same_result(one.result, four.result) ? "yes" : "no"),
            60.0};
}

Outcome pair_scaling() {
    // Best of three runs each, to keep scheduler noise out of the ratio.
    double t1 = 1e300;
    double t4 = 1e300;
    bool same = true;
    const PairRun ref = time_pairs(1);
    for (int rep = 0; rep < 3; ++rep) {
        const PairRun a = time_pairs(1);
        const PairRun b = time_pairs(4);
        t1 = std::min(t1, a.seconds);
        t4 = std::min(t4, b.seconds);
        same = same && same_result(ref.result, b.result);
    }
    const double speedup = t1 / t4;
    return {speedup >= 3.0 && same,
            "speedup on 4 threads " + num(speedup, 3) + "x (" + num(t1, 3) + " s -> " + num(t4, 3) +
                " s), hardware threads available: " + std::to_string(std::thread::hardware_concurrency()),
            0.0};
}

struct Criterion {
    std::string id;
    std::string title;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {"1", "closed-form phi for chi = t^(1/2)", phi_closed_form},
        {"2", "psi blow-up calibration", psi_calibration},
        {"3", "localization K2 scaling", localization_scaling},
        {"4", "matrix path identity and inf-convolution", matrix_path_identity},
        {"5", "g-path lemma suite at the certified L", lemma_suite},
        {"6", "structure certificate for the eq2 family", structure_certificate},
        {"7", "extractor against brute force", extractor_oracle},
        {"8", "end-to-end verify, eq2 m = 2", verify_end_to_end},
        {"9", "parabolic L(t) closed form", parabolic_schedule},
        {"10", "parabolic end-to-end, affine data", parabolic_end_to_end},
        {"11", "pair maximization at n = 48, d = 2", pair_performance},
        {"11s", "pair maximization scaling on 4 threads", pair_scaling},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> wanted(argv + 1, argv + argc);
    int failed = 0;
    int ran = 0;
    for (const Criterion& c : criteria()) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what(), 0.0};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = o.budget <= 0.0 || seconds < o.budget;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::cout << (pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.title << ": " << o.detail << " ("
                  << num(seconds, 3) << " s";
        if (o.budget > 0.0) std::cout << ", limit " << o.budget << " s";
        std::cout << ")" << std::endl;
    }
    if (ran == 0) {
        std::cerr << "no such criterion\n";
        return 1;
    }
    return failed == 0 ? 0 : 1;
}
