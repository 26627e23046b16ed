// SPDX-License-Identifier: MIT
#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

namespace oracle {

double phi_prime_power(double t, double alpha) { return std::pow(1.0 - t, -1.0 / alpha); }

double phi_power(double t, double alpha, int panels) {
    if (t == 0.0) return 0.0;
    const double h = t / (2 * panels);
    double s = phi_prime_power(0.0, alpha) + phi_prime_power(t, alpha);
    for (int k = 1; k < 2 * panels; ++k) s += (k % 2 ? 4.0 : 2.0) * phi_prime_power(k * h, alpha);
    return s * h / 3.0;
}

double psi_blowup(double alpha, double c, double k3) {
    // tau = 1 + u^2 removes the square-root singularity of 1/F at tau = 1.
    auto integrand = [=](double u) {
        if (u == 0.0) {
            // F ~ sqrt(4 K3 c^2 u^2) near u = 0, so 2u / F -> 1 / sqrt(K3 c^2).
            return 1.0 / std::sqrt(k3 * c * c);
        }
        const double f2 =
            2.0 * k3 * c * c * std::expm1((2.0 + 2.0 * alpha) * std::log1p(u * u)) / (2.0 + 2.0 * alpha);
        if (!(f2 > 0.0)) return 1.0 / std::sqrt(k3 * c * c);
        if (!std::isfinite(f2) || !std::isfinite(u)) return 0.0;
        return 2.0 * u / std::sqrt(f2);
    };
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
}

namespace {

// Plain loops over preallocated buffers: this runs ~10^8 times per acceptance pass.
void grid_search(const Eigen::MatrixXd& Y, double c, const Eigen::VectorXd& r, Eigen::VectorXd& center,
                 double half, double& best) {
    const int d = static_cast<int>(r.size());
    const int n = 41;
    int total = 1;
    for (int k = 0; k < d; ++k) total *= n;
    std::vector<double> s(static_cast<std::size_t>(d));
    std::vector<double> arg(center.data(), center.data() + d);
    for (int idx = 0; idx < total; ++idx) {
        int rest = idx;
        for (int k = 0; k < d; ++k) {
            s[static_cast<std::size_t>(k)] = center(k) - half + 2.0 * half * (rest % n) / (n - 1);
            rest /= n;
        }
        double v = 0.0;
        for (int i = 0; i < d; ++i) {
            const double si = s[static_cast<std::size_t>(i)];
            double row = 0.0;
            for (int j = 0; j < d; ++j) row += Y(i, j) * s[static_cast<std::size_t>(j)];
            v += si * row + c * (r(i) - si) * (r(i) - si);
        }
        if (v < best) {
            best = v;
            arg = s;
        }
    }
    for (int k = 0; k < d; ++k) center(k) = arg[static_cast<std::size_t>(k)];
}

}  // namespace

double inf_convolution(const Eigen::MatrixXd& Y, double c, const Eigen::VectorXd& r) {
    // Y s.s + c|r-s|^2 >= c|r-s|^2 + lmin |s|^2 bounds the minimizer's distance from r.
    const double lmin = Y.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
    const double reach = lmin < 0.0 ? r.norm() * c / (c + lmin) : r.norm();
    Eigen::VectorXd center = r;
    const double start = 1.05 * (reach + r.norm());
    double half = start;
    double best = std::numeric_limits<double>::infinity();
    grid_search(Y, c, r, center, half, best);
    // Each refinement spans ten cells of the previous grid around its best point, so a
    // minimizer in a long shallow valley is not lost when Y + cI is nearly singular.
    while (half > 1e-4 * start) {
        half *= 10.0 / 40.0;
        grid_search(Y, c, r, center, half, best);
    }
    return best;
}

double discrete_lipschitz(const std::vector<Eigen::VectorXd>& nodes, const std::vector<double>& values) {
    double best = 0.0;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            best = std::max(best, std::abs(values[a] - values[b]) / (nodes[a] - nodes[b]).norm());
        }
    }
    return best;
}

double parabolic_L(double t, double alpha, double c, double k, double l_T, double T) {
    return std::pow(std::pow(l_T, -alpha) - alpha * k * c * (T - t), -1.0 / alpha);
}

}  // namespace oracle
