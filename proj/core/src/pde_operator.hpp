// SPDX-License-Identifier: MIT
#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "bernstein/pde.hpp"

namespace bernstein::detail {

using SparseMat = Eigen::SparseMatrix<double>;

/// Discrete -Tr(A D^2 u) + |D_h u|^m - f at the unknown nodes, plus an
/// optional (u - u_old)/dt mass term. Non-unknown nodes carry Dirichlet data
/// inside the full-grid vector passed to every call.
class DiscreteOperator {
public:
    DiscreteOperator(const GridField& grid, const Domain& domain, double m,
                     const std::function<double(const Vec&)>& f,
                     const std::function<Mat(const Vec&)>& diffusion, GradientScheme scheme);

    std::size_t unknowns() const noexcept { return nodes_.size(); }
    const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }
    /// Unknown number of a node, or -1 for Dirichlet nodes.
    int unknown_of(std::size_t node) const noexcept { return unk_[node]; }

    /// Residual at the unknowns; fills the Jacobian when jac is non-null.
    void evaluate(const std::vector<double>& u, Eigen::VectorXd& res, SparseMat* jac,
                  const std::vector<double>* u_old = nullptr, double dt = 0.0) const;

    /// Largest stable explicit step for the upwind scheme at state u.
    double explicit_step_limit(const std::vector<double>& u) const;

private:
    const GridField& grid_;
    int dims_;
    double m_;
    GradientScheme scheme_;
    std::vector<std::size_t> nodes_;
    std::vector<int> unk_;
    std::vector<double> f_;
    // Per unknown: A00, A11, A01.
    std::vector<std::array<double, 3>> a_;
};

}  // namespace bernstein::detail
