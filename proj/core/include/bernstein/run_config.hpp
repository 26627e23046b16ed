// SPDX-License-Identifier: MIT
//
// Run configs: flat key = value lines grouped under [section] headers, '#'
// starts a comment. Sections and keys:
//
//   [equation]  family (eq2|eq4|eq8|generic-H), dim, m, f, sigma11..sigma22,
//               H, exp_change (eq4, eq8), v_min, v_max, drift (printed|derived)
//   [chi]       alpha, scale
//   [check]     clause (i|ii|iii|parabolic), eta, K (number or auto), nu, R, center, osc, budget,
//               p_span, allow_gamma_ge_m
//   [solve]     lo, hi, n, ball_radius, boundary, initial, T, dt, scheme
//               (implicit|explicit), gradient (hybrid|upwind), tol, max_iter
//   [extract]   grid, kind (linear|profile), flat, rel_tol, l_max
//   [lemma]     states, L, nu
//
// Vectors (center) are comma separated. Expressions use the Expr grammar.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bernstein/chi.hpp"
#include "bernstein/doubling.hpp"
#include "bernstein/equation.hpp"
#include "bernstein/error.hpp"
#include "bernstein/expr.hpp"
#include "bernstein/pde.hpp"
#include "bernstein/structure.hpp"

namespace bernstein {

/// Every problem found while loading a config, not just the first.
class ConfigError : public ValidationError {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

enum class Family { eq2, eq4, eq8, generic_h };
std::string to_string(Family f);

struct EquationSection {
    Family family = Family::eq2;
    int dim = 1;
    double m = 2.0;
    std::string f = "0";
    /// Row-major entries of sigma; empty means the identity.
    std::vector<std::string> sigma;
    std::string hamiltonian;
    bool exp_change = false;
    double v_min = 0.0;
    double v_max = 1.0;
    DriftSign drift = DriftSign::printed;
};

struct CheckSection {
    Clause clause = Clause::i;
    double eta = 0.25;
    /// Unset ("auto") means the lemma constant (1+nu) B(R,nu) (1+K1)^2 for this chi and R.
    std::optional<double> K = 1.0;
    /// Defaults to eta / 3.
    std::optional<double> nu;
    double R = 1.0;
    std::vector<double> center;
    double osc = 0.0;
    int budget = 2048;
    double p_span = 4096.0;
    bool allow_gamma_ge_m = false;
};

struct SolveSection {
    double lo = -1.0;
    double hi = 1.0;
    int n = 401;
    std::optional<double> ball_radius;
    std::string boundary = "0";
    std::string initial;
    double T = 1.0;
    double dt = 0.01;
    TimeScheme scheme = TimeScheme::implicit;
    GradientScheme gradient = GradientScheme::hybrid;
    double tol = 1e-10;
    int max_iter = 100;
};

struct ExtractSection {
    std::string grid;
    CouplingKind kind = CouplingKind::linear;
    bool flat = false;
    double rel_tol = 1e-4;
    double l_max = 1073741824.0;
};

struct LemmaSection {
    int states = 1000;
    /// Defaults to the certified L from the check section.
    std::optional<double> L;
    std::optional<double> nu;
};

struct RunConfig {
    EquationSection equation;
    ChiSpec chi{0.25, 1.0};
    CheckSection check;
    SolveSection solve;
    ExtractSection extract;
    LemmaSection lemma;
    /// Every key as written, by "section.key", for reports.
    std::map<std::string, std::string> resolved;

    double nu() const { return check.nu.value_or(check.eta / 3.0); }
    Vec center() const;
};

/// Parse and validate. Throws ConfigError listing every problem.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

/// Apply "section.key=value" overrides (before validation) then validate.
RunConfig parse_run_config(std::istream& in, const std::vector<std::string>& overrides);

/// The equation model described by the config (clause parabolic for eq8).
EquationModel build_model(const RunConfig& cfg);

/// f(x) from the equation section, with a finite-difference gradient.
ScalarField build_source(const RunConfig& cfg);

EllipticProblem build_elliptic(const RunConfig& cfg);
ParabolicProblem build_parabolic(const RunConfig& cfg);

}  // namespace bernstein
