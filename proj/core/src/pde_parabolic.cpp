// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cmath>

#include "bernstein/error.hpp"
#include "bernstein/pde.hpp"
#include "pde_operator.hpp"

namespace bernstein {

namespace detail {
int newton_solve(const DiscreteOperator& op, std::vector<double>& u, double tol, int max_iter,
                 const std::vector<double>* u_old, double dt, double& residual);
}

ParabolicSolution solve_parabolic(const ParabolicProblem& problem, const TimeOptions& opts) {
    if (!problem.boundary || !problem.initial) throw ValidationError("solve: boundary and initial data are required");
    if (!(problem.T > 0.0)) throw ValidationError("solve: T must be positive");
    if (!(opts.dt > 0.0)) throw ValidationError("solve: dt must be positive");

    GridField grid = problem.domain.make_grid();
    const GradientScheme scheme =
        opts.scheme == TimeScheme::explicit_euler ? GradientScheme::upwind : opts.gradient;
    const detail::DiscreteOperator op(grid, problem.domain, problem.m, problem.f, problem.diffusion, scheme);

    const int steps = std::max(1, static_cast<int>(std::ceil(problem.T / opts.dt - 1e-9)));
    const double dt = problem.T / steps;
    std::vector<int> save_steps;
    for (double ts : opts.save_times) {
        if (!(ts >= 0.0 && ts <= problem.T)) throw ValidationError("solve: save time outside [0, T]");
        save_steps.push_back(static_cast<int>(std::lround(ts / dt)));
    }
    save_steps.push_back(steps);
    std::sort(save_steps.begin(), save_steps.end());
    save_steps.erase(std::unique(save_steps.begin(), save_steps.end()), save_steps.end());

    std::vector<double>& u = grid.values();
    for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] = problem.initial(grid.coord(k));
        if (!std::isfinite(u[k])) throw DomainError("solve: initial data is not finite");
    }

    ParabolicSolution out;
    out.steps = steps;
    out.report.boundary_description = problem.boundary_description;
    auto snapshot = [&](int step) {
        GridField g = grid;
        g.time = step * dt;
        out.snapshots.push_back(std::move(g));
    };
    std::size_t next_save = 0;
    if (save_steps[next_save] == 0) {
        snapshot(0);
        ++next_save;
    }

    std::vector<double> u_old;
    Eigen::VectorXd res;
    int newton_total = 0;
    for (int s = 1; s <= steps; ++s) {
        const double t = s * dt;
        u_old = u;
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (op.unknown_of(k) < 0) u[k] = problem.boundary(grid.coord(k), t);
        }
        if (opts.scheme == TimeScheme::explicit_euler) {
            const double limit = op.explicit_step_limit(u_old);
            if (dt > limit) {
                throw ValidationError("solve: explicit step " + std::to_string(dt) + " violates the CFL limit " +
                                      std::to_string(limit));
            }
            op.evaluate(u_old, res, nullptr);
            const auto& nodes = op.nodes();
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                u[nodes[q]] = u_old[nodes[q]] - dt * res(static_cast<Eigen::Index>(q));
            }
        } else {
            double r = 0.0;
            newton_total += detail::newton_solve(op, u, opts.tol, opts.max_newton, &u_old, dt, r);
            out.max_step_residual = std::max(out.max_step_residual, r);
        }
        if (next_save < save_steps.size() && save_steps[next_save] == s) {
            snapshot(s);
            ++next_save;
        }
    }
    out.report.iterations = opts.scheme == TimeScheme::explicit_euler ? steps : newton_total;
    out.report.residual_norm = out.max_step_residual;
    out.report.converged = true;
    if (opts.measure) out.report.sup_grad = measure_sup_grad(out.snapshots.back(), *opts.measure);
    return out;
}

}  // namespace bernstein
