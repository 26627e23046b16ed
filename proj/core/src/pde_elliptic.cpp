// SPDX-License-Identifier: MIT
#include <cmath>

#include <Eigen/SparseLU>

#include "bernstein/error.hpp"
#include "bernstein/pde.hpp"
#include "pde_operator.hpp"

namespace bernstein {

GridField Domain::make_grid() const {
    GridField g = GridField::box(dims, n, lo, hi);
    return g;
}

namespace detail {

// Newton with step halving; returns iterations used. u holds Dirichlet data
// at the non-unknown nodes and the initial guess elsewhere.
int newton_solve(const DiscreteOperator& op, std::vector<double>& u, double tol, int max_iter,
                 const std::vector<double>* u_old, double dt, double& residual) {
    Eigen::VectorXd res;
    SparseMat jac;
    op.evaluate(u, res, &jac, u_old, dt);
    residual = res.lpNorm<Eigen::Infinity>();
    Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    for (int it = 0; it < max_iter; ++it) {
        if (residual <= tol) return it;
        if (!analyzed) {
            lu.analyzePattern(jac);
            analyzed = true;
        }
        lu.factorize(jac);
        if (lu.info() != Eigen::Success) {
            // Pattern can change when upwind branches switch.
            lu.analyzePattern(jac);
            lu.factorize(jac);
            if (lu.info() != Eigen::Success) throw ConvergenceError("pde: singular Newton Jacobian");
        }
        const Eigen::VectorXd delta = lu.solve(res);
        const auto& nodes = op.nodes();
        std::vector<double> trial = u;
        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving) {
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                trial[nodes[q]] = u[nodes[q]] - lambda * delta(static_cast<Eigen::Index>(q));
            }
            op.evaluate(trial, res, nullptr, u_old, dt);
            const double r = res.lpNorm<Eigen::Infinity>();
            if (std::isfinite(r) && r < residual) {
                accepted = true;
                residual = r;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            if (residual <= 100.0 * tol) return it;
            throw ConvergenceError("pde: Newton step halving failed to reduce the residual (" +
                                   std::to_string(residual) + ")");
        }
        u.swap(trial);
        op.evaluate(u, res, &jac, u_old, dt);
    }
    if (residual <= tol) return max_iter;
    throw ConvergenceError("pde: Newton did not converge in " + std::to_string(max_iter) +
                           " iterations (residual " + std::to_string(residual) + ")");
}

}  // namespace detail

EllipticSolution solve_elliptic(const EllipticProblem& problem, const SolveOptions& opts) {
    if (!problem.boundary) throw ValidationError("solve: boundary data is required");
    if (!(opts.tol > 0.0)) throw ValidationError("solve: tol must be positive");
    GridField grid = problem.domain.make_grid();
    const detail::DiscreteOperator op(grid, problem.domain, problem.m, problem.f, problem.diffusion, opts.scheme);

    std::vector<double>& u = grid.values();
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Vec x = grid.coord(k);
        if (op.unknown_of(k) < 0) {
            u[k] = problem.boundary(x);
        } else {
            u[k] = problem.initial_guess ? problem.initial_guess(x) : 0.0;
        }
        if (!std::isfinite(u[k])) throw DomainError("solve: boundary or initial data is not finite");
    }

    EllipticSolution out;
    out.report.iterations = detail::newton_solve(op, u, opts.tol, opts.max_iter, nullptr, 0.0,
                                                 out.report.residual_norm);
    out.report.converged = true;
    out.report.boundary_description = problem.boundary_description;
    if (opts.measure) out.report.sup_grad = measure_sup_grad(grid, *opts.measure);
    out.field = std::move(grid);
    return out;
}

}  // namespace bernstein
