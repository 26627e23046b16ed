// SPDX-License-Identifier: MIT
//
// Doubling of variables on gridded data, and the matrix path / g-path
// machinery behind the diagonal-maximum argument.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bernstein/auxfun.hpp"
#include "bernstein/equation.hpp"
#include "bernstein/grid.hpp"
#include "bernstein/structure.hpp"

namespace bernstein {

enum class CouplingKind {
    profile,  ///< phi from build_phi, pairs with L C(x)(|x-y|+alpha) < 1
    linear,   ///< phi(t) = t, pairs with L C(x)(|x-y|+alpha) <= osc
};

struct CouplingParams {
    CouplingKind kind = CouplingKind::linear;
    /// Required for CouplingKind::profile; not owned.
    const PhiProfile* phi = nullptr;
    double L = 1.0;
    double alpha_dbl = 0.0;
    /// Replace C by 1 on B(x0, 3R/4).
    bool flat = false;
    int threads = 1;
    bool prune = true;
};

struct PairMaximum {
    /// False when no admissible pair exists (diagonal by vacuity).
    bool found = false;
    std::size_t x_index = 0;
    std::size_t y_index = 0;
    Vec x;
    Vec y;
    double value = 0.0;
    double t = 0.0;
    /// |x - y| <= diag_tol and the value does not exceed the best x = y pair.
    bool on_diagonal = true;
    double diag_tol = 0.0;
    Vec p;
    Vec q;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;
    double c_x = 1.0;
    /// Oscillation of u over the grid nodes in B(x0, R).
    double osc = 0.0;
    std::size_t pairs_evaluated = 0;
};

/// Exact maximum of u(x) - u(y) - phi(L C(x)(|x-y| + alpha)) over admissible grid
/// pairs x in B(x0, 3R/4), y in B(x0, R). Ties go to the lexicographically
/// smallest (x index, y index), whatever the thread count.
PairMaximum maximize_pairs(const GridField& field, const LocalizationProfile& loc,
                           const CouplingParams& params);

struct ExtractOptions {
    CouplingKind kind = CouplingKind::linear;
    const PhiProfile* phi = nullptr;
    bool flat = false;
    /// alpha = factor * R / L for each factor.
    std::vector<double> alpha_factors{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
    double l_max = 1073741824.0;
    double rel_tol = 1e-4;
    int threads = 1;
};

struct ExtractTraceEntry {
    double L;
    double alpha;
    double max_value;
    bool on_diagonal;
};

struct ExtractResult {
    bool bounded = false;
    double l_star = 0.0;
    Vec center;
    /// |Du| <= L* is certified on B(center, ball_radius) = B(x0, R/4).
    double ball_radius = 0.0;
    std::vector<double> schedule;
    std::vector<ExtractTraceEntry> trace;
    std::string message;
};

/// Smallest L (to rel_tol) for which every alpha in the schedule gives a
/// diagonal maximizer.
ExtractResult extract_lipschitz(const GridField& field, const LocalizationProfile& loc,
                                const ExtractOptions& opts);

// ---------------------------------------------------------------------------
// matrix path and g-path

struct MatrixPathValue {
    Mat Z;
    Mat dZ;
};

/// Z(tau) = Y (I + tau Y / c)^-1 with c = (1+nu) gamma1, and dZ its tau-derivative
/// taken through the resolvent (it equals -Z^2 / c).
/// Throws DomainError when the factor has condition number above 1e12.
MatrixPathValue matrix_path(const Mat& Y, double c, double tau);

struct GPathState {
    Vec x;
    Vec y;
    double ux = 0.0;
    double uy = 0.0;
    Vec p;
    Vec q;
    Mat Y;
    double gamma1 = 1.0;
    double nu = 0.1;
    /// B(R, nu), chi(C(x)), |x-y| + alpha: the pieces of the tau correction.
    double b_coeff = 0.0;
    double chi_c = 1.0;
    double gap = 0.0;
    /// Parabolic variant: L'(t) C(x) (|x-y| + alpha).
    std::optional<double> time_term;

    double path_scale() const noexcept { return (1.0 + nu) * gamma1; }
    Vec X(double tau) const { return tau * x + (1.0 - tau) * y; }
    double U(double tau) const { return tau * ux + (1.0 - tau) * uy; }
    Vec P(double tau) const { return p + tau * q; }
    MatrixPathValue Z(double tau) const { return matrix_path(Y, path_scale(), tau); }

    /// Throws ValidationError unless -Y <= (1 + nu/2) gamma1 I.
    void check_admissible() const;
};

struct GPathOptions {
    int grid = 257;
};

struct GPathResult {
    std::vector<double> zeros;
    std::vector<double> gprime_at_zeros;
    bool lemma_holds = true;
    double g0 = 0.0;
    double g1 = 0.0;
    /// Smallest g' over the tau grid (the parabolic variant needs it positive).
    double min_gprime = 0.0;
};

double g_value(const EquationModel& model, const GPathState& s, double tau);
double g_derivative(const EquationModel& model, const GPathState& s, double tau);

GPathResult g_path_test(const EquationModel& model, const GPathState& state, const GPathOptions& opts = {});

/// Structure constant K = (1+nu) B(R,nu) (1+K1)^2 under which the g-path
/// correction dominates the localization terms.
double lemma_constant(double k1, double k2, double nu);

struct LemmaSuiteOptions {
    int states = 1000;
    std::uint64_t seed = 1;
    double L = 1.0;
    double nu = 0.1;
    int max_attempts = 200000;
    GPathOptions path;
};

struct LemmaSuiteResult {
    int states = 0;
    int attempts = 0;
    int zeros = 0;
    int failures = 0;
    /// Smallest g' / (|g'| scale) over all zeros.
    double worst_relative_gprime = 0.0;
    std::optional<GPathState> counterexample;
};

/// Seeded admissible states: (x, y, p, q, gamma1) from the coupling formulas at
/// random (x, t), and Y shifted so that g vanishes at a random interior tau.
LemmaSuiteResult run_lemma_suite(const EquationModel& model, const PhiProfile& phi,
                                 const LocalizationProfile& loc, const LemmaSuiteOptions& opts);

}  // namespace bernstein
