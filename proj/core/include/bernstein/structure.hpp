// SPDX-License-Identifier: MIT
//
// Structure conditions on sampled constraint sets and the search for the
// smallest gradient bound L they certify.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bernstein/chi.hpp"
#include "bernstein/equation.hpp"

namespace bernstein {

enum class Clause {
    i,          ///< oscillation-free, chi power 2 in the constraint set
    ii,         ///< oscillation-dependent, chi power 1
    iii,        ///< oscillation-dependent with F_r |p|^2 on the left
    parabolic,  ///< time-dependent variant: only |p| >= L constrains the set
};

std::string to_string(Clause c);
Clause parse_clause(const std::string& s);

struct ConstraintPoint {
    Vec x;
    double r = 0.0;
    Vec p;
    Mat M;
};

/// Width eta |p| chi(|p|)^s of the band |F| <= width; s = 2 for clause i, 1 otherwise.
double constraint_width(Clause clause, const ChiSpec& chi, double eta, double pnorm);

/// |F| <= width and |p| >= L (parabolic: only |p| >= L).
bool in_constraint_set(const EquationModel& model, const ConstraintPoint& pt, Clause clause,
                       const ChiSpec& chi, double eta, double L);

struct ConditionSides {
    double lhs = 0.0;
    double rhs = 0.0;
    /// (lhs - rhs) / (|lhs| + |rhs|), in [-1, 1].
    double relative_margin() const noexcept;
};

/// Both sides of the clause inequality. Throws ValidationError when the
/// point is outside the constraint set for the floor L = max(L, 1).
ConditionSides condition_lhs_rhs(const EquationModel& model, const ConstraintPoint& pt,
                                 Clause clause, const ChiSpec& chi, double eta, double K,
                                 double L = 1.0);

/// For a trace-form model: the interval of Tr(A M) allowed by membership.
std::pair<double, double> trace_interval(const EquationModel& model, const Vec& x, double r,
                                         const Vec& p, Clause clause, const ChiSpec& chi,
                                         double eta);

struct SamplerOptions {
    Vec center;
    double radius = 1.0;
    double r_min = 0.0;
    double r_max = 0.0;
    /// |p| is sampled log-uniformly in [L, L * p_span].
    double p_span = 4096.0;
    int budget = 2048;
    std::uint64_t seed = 1;
    /// Use the trace-form reducer when the model offers one.
    bool use_trace_form = true;
};

struct SampleSet {
    std::vector<ConstraintPoint> points;
    /// Every candidate failed membership; certification is vacuously true.
    bool vacuous = false;
    std::size_t rejected = 0;
};

SampleSet sample_constraint_set(const EquationModel& model, Clause clause, const ChiSpec& chi,
                                double eta, double L, const SamplerOptions& opts);

enum class CertStatus { certified, violated, indeterminate };
std::string to_string(CertStatus s);

struct BoundCertificate {
    Clause clause = Clause::i;
    double eta = 0.0;
    double nu = 0.0;
    double K = 0.0;
    double R = 0.0;
    double L = 0.0;
    CertStatus status = CertStatus::indeterminate;
    /// Minimal relative margin over the samples at L (+1 when vacuous).
    double margin = 0.0;
    std::optional<ConstraintPoint> witness;
    std::optional<ConditionSides> witness_sides;
    bool vacuous = false;
    std::size_t samples = 0;
    /// Samples where taking |F_r| |p|^2 on the right of clause iii flips the verdict.
    std::size_t sign_ambiguous = 0;
    std::string message;
    /// (|p|, relative margin) at the certified L, sorted by |p|.
    std::vector<std::pair<double, double>> profile;
    /// (probe L, minimal margin) for the 2^k probes.
    std::vector<std::pair<double, double>> probes;
};

struct FindLOptions {
    SamplerOptions sampler;
    int max_exponent = 30;
    int bisection_steps = 40;
    double nu = 0.0;
};

/// Probes L = 2^k, k = 0..max_exponent, then bisects between the last failing
/// and first certified probe. Non-monotone probe outcomes give indeterminate.
BoundCertificate find_min_L(const EquationModel& model, Clause clause, const ChiSpec& chi,
                            double eta, double K, const FindLOptions& opts);

/// Spot check of F_M <= 0, F_r >= 0, degenerate ellipticity and partial
/// consistency by central differences. Empty result means all passed.
struct HypothesisReport {
    bool f_m_nonpositive = true;
    bool f_r_nonnegative = true;
    bool elliptic = true;
    bool partials_consistent = true;
    double worst_partial_error = 0.0;
    std::vector<std::string> failures;
};
HypothesisReport check_hypotheses(const EquationModel& model, const SamplerOptions& opts,
                                  int points = 1000);

// ---------------------------------------------------------------------------
// parabolic L(t)

class ParabolicSchedule {
public:
    double k_t() const noexcept { return k_t_; }
    double l_terminal() const noexcept { return l_T_; }
    double horizon() const noexcept { return T_; }
    /// Times below this are outside the table (L exceeded its cap).
    double t_min() const noexcept { return t_.empty() ? T_ : t_.front(); }
    /// Blow-up abscissa inside (0, T) when k_T is too large, else nullopt.
    std::optional<double> blowup() const noexcept { return blowup_; }

    /// L(t) by cubic Hermite interpolation with L' = -k_T L chi(L).
    double operator()(double t) const;
    double derivative(double t) const;

    const std::vector<double>& times() const noexcept { return t_; }
    const std::vector<double>& values() const noexcept { return l_; }

private:
    friend ParabolicSchedule solve_parabolic_L(const ChiSpec&, double, double, double, int);
    ChiSpec chi_;
    double k_t_ = 0.0;
    double l_T_ = 1.0;
    double T_ = 1.0;
    std::optional<double> blowup_;
    std::vector<double> t_;  // increasing
    std::vector<double> l_;
};

/// Integrates dL/dt = -k_T L chi(L) backward from L(T) = L_T with adaptive
/// Dormand-Prince steps; stops at L = 1e30 and records where that happened.
ParabolicSchedule solve_parabolic_L(const ChiSpec& chi, double k_t, double l_T, double T,
                                    int nodes = 4096);

/// k_T = L_T^(-alpha) / (alpha c T): the choice for which L(0+) = +infinity.
double calibrate_k_t(const ChiSpec& chi, double l_T, double T);

}  // namespace bernstein
