// SPDX-License-Identifier: MIT
#include "pde_operator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "bernstein/error.hpp"

namespace bernstein::detail {

DiscreteOperator::DiscreteOperator(const GridField& grid, const Domain& domain, double m,
                                   const std::function<double(const Vec&)>& f,
                                   const std::function<Mat(const Vec&)>& diffusion, GradientScheme scheme)
    : grid_(grid), dims_(grid.dims()), m_(m), scheme_(scheme) {
    if (!(m >= 1.0)) throw ValidationError("pde: m must be >= 1");
    if (!f) throw ValidationError("pde: f is required");
    unk_.assign(grid.size(), -1);
    const auto& n = grid.n();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto ij = grid.unflatten(k);
        bool interior = ij[0] > 0 && ij[0] < n[0] - 1;
        if (dims_ == 2) interior = interior && ij[1] > 0 && ij[1] < n[1] - 1;
        if (!interior) continue;
        const Vec x = grid.coord(k);
        if (domain.ball && (x - domain.ball->center).norm() >= domain.ball->radius) continue;
        unk_[k] = static_cast<int>(nodes_.size());
        nodes_.push_back(k);
    }
    if (nodes_.empty()) throw ValidationError("pde: domain has no interior unknowns");

    f_.resize(nodes_.size());
    a_.resize(nodes_.size());
    for (std::size_t q = 0; q < nodes_.size(); ++q) {
        const Vec x = grid.coord(nodes_[q]);
        f_[q] = f(x);
        if (!std::isfinite(f_[q])) throw DomainError("pde: f is not finite at a grid node");
        if (diffusion) {
            const Mat A = diffusion(x);
            if (A.rows() != dims_ || A.cols() != dims_) throw ValidationError("pde: diffusion has wrong size");
            const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(symmetrize(A)).eigenvalues().minCoeff();
            if (lmin < -1e-12 * (1.0 + A.norm())) {
                throw ValidationError("pde: diffusion is not elliptic (negative eigenvalue) at a grid node");
            }
            a_[q] = {A(0, 0), dims_ == 2 ? A(1, 1) : 0.0, dims_ == 2 ? 0.5 * (A(0, 1) + A(1, 0)) : 0.0};
        } else {
            a_[q] = {1.0, dims_ == 2 ? 1.0 : 0.0, 0.0};
        }
    }
}

namespace {

struct AxisGrad {
    double p;           // signed (central) or magnitude (upwind)
    double w_center;    // dp/du at the node
    double w_minus;     // dp/du at the - neighbour
    double w_plus;      // dp/du at the + neighbour
};

AxisGrad upwind(double um, double u0, double up, double h) {
    const double dm = (u0 - um) / h;
    const double dpm = (u0 - up) / h;  // -D+u
    if (dm >= dpm && dm > 0.0) return {dm, 1.0 / h, -1.0 / h, 0.0};
    if (dpm > dm && dpm > 0.0) return {dpm, 1.0 / h, 0.0, -1.0 / h};
    return {0.0, 0.0, 0.0, 0.0};
}

AxisGrad central(double um, double up, double h) {
    return {(up - um) / (2.0 * h), 0.0, -0.5 / h, 0.5 / h};
}

}  // namespace

void DiscreteOperator::evaluate(const std::vector<double>& u, Eigen::VectorXd& res, SparseMat* jac,
                                const std::vector<double>* u_old, double dt) const {
    const std::size_t nu = nodes_.size();
    res.resize(static_cast<Eigen::Index>(nu));
    std::vector<Eigen::Triplet<double>> trip;
    if (jac) trip.reserve(nu * (dims_ == 2 ? 9 : 3));
    const auto& h = grid_.h();
    const auto& n = grid_.n();

    auto add = [&](std::size_t row, std::size_t node, double v) {
        const int c = unk_[node];
        if (c >= 0 && v != 0.0) trip.emplace_back(static_cast<int>(row), c, v);
    };

    for (std::size_t q = 0; q < nu; ++q) {
        const std::size_t k = nodes_[q];
        const auto ij = grid_.unflatten(k);
        const double u0 = u[k];
        double r = -f_[q];
        double diag = 0.0;

        // Neighbours along each axis.
        std::array<std::size_t, 2> km{};
        std::array<std::size_t, 2> kp{};
        km[0] = grid_.index(ij[0] - 1, ij[1]);
        kp[0] = grid_.index(ij[0] + 1, ij[1]);
        if (dims_ == 2) {
            km[1] = grid_.index(ij[0], ij[1] - 1);
            kp[1] = grid_.index(ij[0], ij[1] + 1);
        }

        // Diffusion.
        for (int a = 0; a < dims_; ++a) {
            const double c = a_[q][static_cast<std::size_t>(a)] / (h[a] * h[a]);
            r -= c * (u[kp[a]] - 2.0 * u0 + u[km[a]]);
            diag += 2.0 * c;
            if (jac) {
                add(q, kp[a], -c);
                add(q, km[a], -c);
            }
        }
        if (dims_ == 2 && a_[q][2] != 0.0) {
            const double c = 2.0 * a_[q][2] / (4.0 * h[0] * h[1]);
            const std::size_t pp = grid_.index(ij[0] + 1, ij[1] + 1);
            const std::size_t pm = grid_.index(ij[0] + 1, ij[1] - 1);
            const std::size_t mp = grid_.index(ij[0] - 1, ij[1] + 1);
            const std::size_t mm = grid_.index(ij[0] - 1, ij[1] - 1);
            r -= c * (u[pp] - u[pm] - u[mp] + u[mm]);
            if (jac) {
                add(q, pp, -c);
                add(q, pm, c);
                add(q, mp, c);
                add(q, mm, -c);
            }
        }
        (void)n;

        // Gradient: central where the cell Peclet number allows, upwind otherwise.
        std::array<AxisGrad, 2> g{};
        double p2c = 0.0;
        for (int a = 0; a < dims_; ++a) {
            g[static_cast<std::size_t>(a)] = central(u[km[a]], u[kp[a]], h[a]);
            p2c += g[static_cast<std::size_t>(a)].p * g[static_cast<std::size_t>(a)].p;
        }
        for (int a = 0; a < dims_; ++a) {
            auto& ga = g[static_cast<std::size_t>(a)];
            bool use_central = scheme_ == GradientScheme::hybrid;
            if (use_central) {
                const double aa = a_[q][static_cast<std::size_t>(a)];
                const double dh = p2c > 0.0 ? m_ * std::pow(p2c, 0.5 * m_ - 1.0) * std::abs(ga.p) : 0.0;
                use_central = aa > 0.0 && h[a] * dh <= 2.0 * aa;
            }
            if (!use_central) ga = upwind(u[km[a]], u0, u[kp[a]], h[a]);
        }
        double p2 = 0.0;
        for (int a = 0; a < dims_; ++a) p2 += g[static_cast<std::size_t>(a)].p * g[static_cast<std::size_t>(a)].p;
        r += std::pow(p2, 0.5 * m_);
        if (jac && p2 > 0.0) {
            const double base = m_ * std::pow(p2, 0.5 * m_ - 1.0);
            for (int a = 0; a < dims_; ++a) {
                const auto& ga = g[static_cast<std::size_t>(a)];
                const double dpa = base * ga.p;
                diag += dpa * ga.w_center;
                add(q, km[a], dpa * ga.w_minus);
                add(q, kp[a], dpa * ga.w_plus);
            }
        }

        if (u_old) {
            r += (u0 - (*u_old)[k]) / dt;
            diag += 1.0 / dt;
        }
        res(static_cast<Eigen::Index>(q)) = r;
        if (jac) trip.emplace_back(static_cast<int>(q), static_cast<int>(q), diag);
    }
    if (jac) {
        jac->resize(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu));
        jac->setFromTriplets(trip.begin(), trip.end());
    }
}

double DiscreteOperator::explicit_step_limit(const std::vector<double>& u) const {
    const auto& h = grid_.h();
    double worst = 0.0;
    for (std::size_t q = 0; q < nodes_.size(); ++q) {
        const std::size_t k = nodes_[q];
        const auto ij = grid_.unflatten(k);
        double rate = 0.0;
        double p2 = 0.0;
        std::array<AxisGrad, 2> g{};
        for (int a = 0; a < dims_; ++a) {
            const std::size_t km = a == 0 ? grid_.index(ij[0] - 1, ij[1]) : grid_.index(ij[0], ij[1] - 1);
            const std::size_t kp = a == 0 ? grid_.index(ij[0] + 1, ij[1]) : grid_.index(ij[0], ij[1] + 1);
            g[static_cast<std::size_t>(a)] = upwind(u[km], u[k], u[kp], h[a]);
            p2 += g[static_cast<std::size_t>(a)].p * g[static_cast<std::size_t>(a)].p;
            rate += 2.0 * a_[q][static_cast<std::size_t>(a)] / (h[a] * h[a]);
        }
        if (p2 > 0.0) {
            const double base = m_ * std::pow(p2, 0.5 * m_ - 1.0);
            for (int a = 0; a < dims_; ++a) rate += base * g[static_cast<std::size_t>(a)].p / h[a];
        }
        worst = std::max(worst, rate);
    }
    return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

}  // namespace bernstein::detail
