// SPDX-License-Identifier: MIT
#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "bernstein/error.hpp"
#include "bernstein/structure.hpp"

namespace bernstein {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kCap = 1e30;
// Tables reach down to T * 1e-6 unless L passes the cap first.
constexpr double kDecades = 6.0;

}  // namespace

double calibrate_k_t(const ChiSpec& chi, double l_T, double T) {
    validate_chi(chi);
    if (!(l_T >= 1.0)) throw ValidationError("parabolic L: L_T must be >= 1");
    if (!(T > 0.0)) throw ValidationError("parabolic L: T must be positive");
    return std::pow(l_T, -chi.alpha) / (chi.alpha * chi.scale * T);
}

ParabolicSchedule solve_parabolic_L(const ChiSpec& chi, double k_t, double l_T, double T, int nodes) {
    validate_chi(chi);
    if (!(k_t > 0.0)) throw ValidationError("parabolic L: k_T must be positive");
    if (!(l_T >= 1.0)) throw ValidationError("parabolic L: L_T must be >= 1");
    if (!(T > 0.0)) throw ValidationError("parabolic L: T must be positive");
    if (nodes < 16) throw ValidationError("parabolic L: at least 16 nodes are required");

    ParabolicSchedule out;
    out.chi_ = chi;
    out.k_t_ = k_t;
    out.l_T_ = l_T;
    out.T_ = T;

    // s = T - t runs forward; dL/ds = k L chi(L).
    using State = std::array<double, 1>;
    auto sys = [&](const State& x, State& dxds, double) { dxds[0] = k_t * x[0] * chi(x[0]); };
    auto dense = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
    dense.initialize(State{l_T}, 0.0, 1e-6 * T);

    // Nodes t_j = T exp(-j dt), graded towards t = 0.
    const double step = kDecades * std::log(10.0) / (nodes - 1);
    std::vector<double> t_desc;
    std::vector<double> l_desc;
    t_desc.push_back(T);
    l_desc.push_back(l_T);
    int j = 1;
    bool capped = false;
    int guard = 0;
    while (j < nodes && !capped) {
        if (++guard > 5'000'000) throw ConvergenceError("parabolic L: step budget exceeded");
        const auto [s_prev, s_now] = dense.do_step(sys);
        (void)s_prev;
        while (j < nodes) {
            const double t = T * std::exp(-j * step);
            const double s = T - t;
            if (s > s_now) break;
            State x;
            dense.calc_state(s, x);
            if (!(std::isfinite(x[0]) && x[0] < kCap)) {
                capped = true;
                break;
            }
            t_desc.push_back(t);
            l_desc.push_back(x[0]);
            ++j;
        }
        const double cur = dense.current_state()[0];
        if (!(std::isfinite(cur) && cur < kCap)) capped = true;
        if (dense.current_time() >= T) break;
    }

    if (capped) {
        // Remaining distance to blow-up once L is large: chi(L) = c L^alpha there.
        const double s_now = dense.current_time();
        const double l_now = dense.current_state()[0];
        double s_blow = s_now;
        if (std::isfinite(l_now) && l_now > 0.0) {
            s_blow += std::pow(l_now, -chi.alpha) / (chi.alpha * chi.scale * k_t);
        }
        const double t_blow = T - s_blow;
        if (t_blow > 1e-6 * T) out.blowup_ = t_blow;
    }

    out.t_.assign(t_desc.rbegin(), t_desc.rend());
    out.l_.assign(l_desc.rbegin(), l_desc.rend());
    return out;
}

double ParabolicSchedule::operator()(double t) const {
    if (!(t >= t_min() && t <= T_)) {
        throw DomainError("parabolic L: t outside the tabulated range [" + std::to_string(t_min()) + ", " +
                          std::to_string(T_) + "]");
    }
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    if (i + 1 >= t_.size()) return l_.back();
    const double h = t_[i + 1] - t_[i];
    const double s = (t - t_[i]) / h;
    const double d0 = -k_t_ * l_[i] * chi_(l_[i]) * h;
    const double d1 = -k_t_ * l_[i + 1] * chi_(l_[i + 1]) * h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * l_[i] + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * l_[i + 1] +
           (s3 - s2) * d1;
}

double ParabolicSchedule::derivative(double t) const {
    const double l = (*this)(t);
    return -k_t_ * l * chi_(l);
}

}  // namespace bernstein
