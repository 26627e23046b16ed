// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "bernstein/auxfun.hpp"
#include "bernstein/error.hpp"
#include "hermite.hpp"

namespace bernstein {

ProfileTable::ProfileTable(double eps_blow, int intervals) {
    if (!(eps_blow > 0.0 && eps_blow < 0.1)) {
        throw ValidationError("profile: eps_blow must lie in (0, 0.1)");
    }
    if (intervals < 1000 || intervals % 2 != 0) {
        throw ValidationError("profile: table needs an even number of intervals >= 1000");
    }
    sigma_step_ = -std::log(eps_blow) / intervals;
    t.resize(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) t[i] = -std::expm1(-i * sigma_step_);
    t.back() = 1.0 - eps_blow;
    value.assign(t.size(), 0.0);
    d1.assign(t.size(), 0.0);
    d2.assign(t.size(), 0.0);
}

void ProfileTable::truncate(std::size_t last) {
    const std::size_t n = std::min(last + 1, t.size());
    t.resize(n);
    value.resize(n);
    d1.resize(n);
    d2.resize(n);
}

ProfileSample ProfileTable::eval(double x) const {
    ProfileSample out;
    if (t.size() < 2) {
        out.saturated = true;
        return out;
    }
    if (x <= 0.0) {
        out.value = value[0];
        out.d1 = d1[0];
        out.d2 = d2[0];
        return out;
    }
    if (x >= t.back()) {
        out.value = value.back();
        out.d1 = d1.back();
        out.d2 = d2.back();
        out.saturated = x > t.back();
        return out;
    }
    const double sigma = -std::log1p(-x);
    auto i = static_cast<std::size_t>(sigma / sigma_step_);
    i = std::min(i, t.size() - 2);
    // Rounding in the sigma map can land one cell off.
    while (i > 0 && x < t[i]) --i;
    while (i + 2 < t.size() && x > t[i + 1]) ++i;
    const double h = t[i + 1] - t[i];
    const auto hv = detail::quintic_hermite((x - t[i]) / h, h, value[i], d1[i], d2[i],
                                            value[i + 1], d1[i + 1], d2[i + 1]);
    out.value = hv.f;
    out.d1 = hv.df;
    out.d2 = hv.d2f;
    return out;
}

double PhiProfile::derivative_lower_bound(double t) const {
    return std::pow(k1_ * (1.0 - t) * chi_.k_chi() * chi_.alpha, -1.0 / chi_.alpha);
}

namespace {

// Tail T(l) = int_l^inf du / chi(e^u), i.e. int_{e^l}^inf ds / (s chi(s)).
double log_tail(const ChiSpec& chi, double l, double* err) {
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double v) { return 1.0 / chi(std::exp(l + v)); };
    double error = 0.0;
    double l1 = 0.0;
    const double val = integrator.integrate(f, 1e-13, &error, &l1);
    if (err) *err = error;
    return val;
}

}  // namespace

PhiProfile build_phi(const ChiSpec& chi, const ProfileOptions& opts) {
    validate_chi(chi);
    PhiProfile phi;
    phi.chi_ = chi;
    phi.eps_blow_ = opts.eps_blow;
    phi.table_ = ProfileTable(opts.eps_blow, opts.intervals);
    phi.closed_form_ = chi.scale == 1.0;

    auto& tab = phi.table_;
    const std::size_t n = tab.size();

    if (phi.closed_form_) {
        phi.k1_ = 1.0 / chi.alpha;
        for (std::size_t i = 0; i < n; ++i) {
            // (1-t)^(-1/alpha) = exp(sigma/alpha) on the graded grid.
            tab.d1[i] = std::exp(-std::log1p(-tab.t[i]) / chi.alpha);
        }
    } else {
        double err = 0.0;
        phi.k1_ = log_tail(chi, 0.0, &err);
        if (!(err <= 1e-10 * phi.k1_) || !std::isfinite(phi.k1_)) {
            throw ConvergenceError("build_phi: K1 quadrature did not converge (error estimate " +
                                   std::to_string(err) + ")");
        }
        // Invert int_{phi'}^inf ds/(s chi(s)) = K1 (1-t) in l = log phi'.
        double l = 0.0;
        tab.d1[0] = 1.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double target = phi.k1_ * (1.0 - tab.t[i]);
            double residual = std::numeric_limits<double>::infinity();
            for (int it = 0; it < 60; ++it) {
                residual = log_tail(chi, l, nullptr) - target;
                const double step = residual * chi(std::exp(l));
                l += step;
                if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(l))) break;
            }
            residual = log_tail(chi, l, nullptr) - target;
            if (!(std::abs(residual) <= 1e-10 * std::max(target, 1e-300) + 1e-14)) {
                throw ConvergenceError("build_phi: inversion residual " +
                                       std::to_string(residual) + " at t = " +
                                       std::to_string(tab.t[i]));
            }
            tab.d1[i] = std::exp(l);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        tab.d2[i] = phi.k1_ * tab.d1[i] * chi(tab.d1[i]);
    }

    // phi by composite Simpson in sigma, where dt = (1-t) dsigma.
    const double ds = tab.sigma_step();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = tab.d1[i] * (1.0 - tab.t[i]);
    tab.value[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        if (i % 2 == 0) {
            tab.value[i] = tab.value[i - 2] + ds / 3.0 * (g[i - 2] + 4.0 * g[i - 1] + g[i]);
        } else {
            tab.value[i] = tab.value[i - 1] + ds / 12.0 * (5.0 * g[i - 1] + 8.0 * g[i] - g[i + 1]);
        }
    }
    return phi;
}

}  // namespace bernstein
