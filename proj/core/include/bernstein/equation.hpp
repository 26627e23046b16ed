// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bernstein/linalg.hpp"

namespace bernstein {

/// Scalar coefficient such as f(x), with its gradient.
struct ScalarField {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;

    static ScalarField constant(double c, int dim);
};

/// Matrix coefficient such as sigma(x), with its partial derivatives d/dx_k.
struct MatrixField {
    std::function<Mat(const Vec&)> value;
    std::function<std::vector<Mat>(const Vec&)> partials;

    static MatrixField identity(int dim);
};

/// F = -Tr(A(x) M) + G(x, r, p).
struct TraceForm {
    std::function<Mat(const Vec&)> diffusion;
    std::function<double(const Vec&, double, const Vec&)> lower_order;
    bool constant_diffusion = true;
};

/// A second-order operator F(x, r, p, M) with its partial derivatives.
///
/// Callbacks must be pure and reentrant. d_M is the a.e. derivative with
/// respect to M as a symmetric matrix, and lip_M bounds its Frobenius norm
/// on the region of interest.
struct EquationModel {
    std::string name;
    int dim = 1;
    std::function<double(const Vec&, double, const Vec&, const Mat&)> eval;
    std::function<Vec(const Vec&, double, const Vec&, const Mat&)> d_x;
    std::function<double(const Vec&, double, const Vec&, const Mat&)> d_r;
    std::function<Vec(const Vec&, double, const Vec&, const Mat&)> d_p;
    std::function<Mat(const Vec&, double, const Vec&, const Mat&)> d_M;
    double lip_M = 0.0;
    std::optional<TraceForm> trace_form;
    bool parabolic = false;

    bool has_partials() const noexcept { return d_x && d_r && d_p && d_M; }
};

/// -Tr(A(x) M) + |p|^m - f(x); A = sigma sigma^T, or the identity when sigma is absent.
EquationModel make_power_model(int dim, double m, ScalarField f,
                               std::optional<MatrixField> sigma = std::nullopt,
                               double lip_M = -1.0);

/// -Tr M + H(p) - f(x) for a user Hamiltonian.
EquationModel make_hamiltonian_model(int dim, std::function<double(const Vec&)> hamiltonian,
                                     std::function<Vec(const Vec&)> hamiltonian_grad,
                                     ScalarField f);

/// Sign of the A Dv.Dv drift produced by u = exp(v).
enum class DriftSign {
    printed,  ///< +A Dv.Dv, the form used by the structure analysis
    derived,  ///< -A Dv.Dv, what the chain rule gives for -Tr(A D^2 u)
};

struct ExpChangeSpec {
    int dim = 1;
    double m = 2.0;
    ScalarField f;
    MatrixField sigma;
    /// Range of v = log u on the ball; v_min < 0 would mean u < 1.
    double v_min = 0.0;
    double v_max = 1.0;
    double lip_M = -1.0;
    DriftSign drift = DriftSign::printed;
};

/// Model in v for -Tr(A D^2 u) + |Du|^m = f after u = exp(v):
///   -Tr(A M) + A p.p + exp((m-1) v)|p|^m - exp(-v) f(x).
EquationModel exp_change_of_variable(const ExpChangeSpec& spec);

/// sup of ||A(x)||_F over a deterministic sample of B(center, radius).
double estimate_lip_M(const MatrixField& sigma, const Vec& center, double radius);

/// Cross term of the exp model: |Tr((A_x . p) M)| and the Cauchy-Schwarz bound
/// (1+eta)^-1 Tr(A M^2) + (1+eta) |sigma_p|_F^2 with sigma_p = sum_k p_k d_k sigma.
struct CrossTermBound {
    double cross;
    double bound;
};
CrossTermBound cross_term_bound(const MatrixField& sigma, const Vec& x, const Vec& p,
                                const Mat& M, double eta);

}  // namespace bernstein
