// SPDX-License-Identifier: MIT
//
// Finite-difference solvers for
//   -Tr(A(x) D^2 u) + |Du|^m = f(x)            (elliptic)
//   u_t - Tr(A(x) D^2 u) + |Du|^m = f(x)       (parabolic)
// on a box, optionally restricted to a ball, with Dirichlet data.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bernstein/grid.hpp"
#include "bernstein/linalg.hpp"

namespace bernstein {

struct Ball {
    Vec center;
    double radius = 1.0;
};

struct Domain {
    int dims = 1;
    double lo = -1.0;
    double hi = 1.0;
    int n = 65;
    /// Unknowns are the interior nodes inside the ball; every other node takes boundary data.
    std::optional<Ball> ball;

    GridField make_grid() const;
};

enum class GradientScheme {
    /// Central differences where the cell Peclet number is at most 1, upwind elsewhere.
    hybrid,
    /// Godunov-type upwind magnitude max(D-u, -D+u, 0) on every axis.
    upwind,
};

struct EllipticProblem {
    Domain domain;
    double m = 2.0;
    std::function<double(const Vec&)> f;
    /// Diffusion A(x); identity when empty.
    std::function<Mat(const Vec&)> diffusion;
    std::function<double(const Vec&)> boundary;
    std::function<double(const Vec&)> initial_guess;
    std::string boundary_description;
};

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 100;
    GradientScheme scheme = GradientScheme::hybrid;
    /// Measure sup |Du| over this ball after solving.
    std::optional<Ball> measure;
};

struct SolveReport {
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::optional<double> sup_grad;
    std::string boundary_description;
};

struct EllipticSolution {
    GridField field;
    SolveReport report;
};

/// Damped Newton on the discrete operator; the step is halved (at most 30
/// times) until the max-norm residual decreases. Throws ConvergenceError when
/// max_iter is reached and ValidationError for a non-elliptic A sample.
EllipticSolution solve_elliptic(const EllipticProblem& problem, const SolveOptions& opts = {});

enum class TimeScheme { implicit, explicit_euler };

struct ParabolicProblem {
    Domain domain;
    double m = 2.0;
    std::function<double(const Vec&)> f;
    std::function<Mat(const Vec&)> diffusion;
    std::function<double(const Vec&, double)> boundary;
    std::function<double(const Vec&)> initial;
    double T = 1.0;
    std::string boundary_description;
};

struct TimeOptions {
    TimeScheme scheme = TimeScheme::implicit;
    double dt = 1e-2;
    /// Snapshot times (clamped to the step grid); T is always saved.
    std::vector<double> save_times;
    double tol = 1e-10;
    int max_newton = 50;
    GradientScheme gradient = GradientScheme::hybrid;
    std::optional<Ball> measure;
};

struct ParabolicSolution {
    /// One field per saved time, each with GridField::time set.
    std::vector<GridField> snapshots;
    SolveReport report;
    /// Largest per-step residual of the implicit solves.
    double max_step_residual = 0.0;
    int steps = 0;
};

ParabolicSolution solve_parabolic(const ParabolicProblem& problem, const TimeOptions& opts = {});

/// Central differences inside, second-order one-sided at the edges; one field per axis.
std::vector<GridField> gradient_field(const GridField& field);

/// sup |Du| over grid nodes in the ball, from gradient_field. Throws
/// ValidationError when the ball is not at least one cell inside the grid.
double measure_sup_grad(const GridField& field, const Ball& ball);

}  // namespace bernstein
