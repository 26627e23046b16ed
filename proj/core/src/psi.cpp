// SPDX-License-Identifier: MIT
#include <array>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "bernstein/auxfun.hpp"
#include "bernstein/error.hpp"

namespace bernstein {

namespace odeint = boost::numeric::odeint;

std::string to_string(PsiStatus s) {
    switch (s) {
        case PsiStatus::calibrated: return "calibrated";
        case PsiStatus::calibration_needed: return "calibration_needed";
        case PsiStatus::early_blowup: return "early_blowup";
    }
    return "unknown";
}

namespace {

using State = std::array<double, 1>;

constexpr double kRelTol = 1e-10;
constexpr double kBlowupCap = 1e30;

// F(1 + w) with F(tau)^2 = 2 K3 c^2 (tau^beta - 1) / beta, beta = 2 + 2 alpha.
// Written in w = psi - 1 so that the square-root start stays accurate.
struct Envelope {
    double k;     // K3 * c^2
    double beta;  // 2 + 2 alpha

    double operator()(double w) const {
        if (w <= 0.0) return 0.0;
        return std::sqrt(2.0 * k / beta * std::expm1(beta * std::log1p(w)));
    }
};

struct Start {
    double t0;
    double w0;
};

// Series psi = 1 + (k/2) t^2 + (1+2 alpha) k^2 t^4 / 24 + O(t^6).
Start series_start(const ChiSpec& chi, double k) {
    const double t0 = std::min(1e-3, 1e-3 / std::sqrt(k));
    const double w0 = 0.5 * k * t0 * t0 + (1.0 + 2.0 * chi.alpha) * k * k * std::pow(t0, 4) / 24.0;
    return {t0, w0};
}

double series_w(const ChiSpec& chi, double k, double t) {
    return 0.5 * k * t * t + (1.0 + 2.0 * chi.alpha) * k * k * std::pow(t, 4) / 24.0;
}

// Remaining time to blow-up from psi = 1 + w, using F ~ A tau^(1+alpha).
double asymptotic_tail(const ChiSpec& chi, double k, double w) {
    const double a = std::sqrt(2.0 * k / (2.0 + 2.0 * chi.alpha));
    return std::pow(1.0 + w, -chi.alpha) / (a * chi.alpha);
}

}  // namespace

double PsiProfile::f_env(double tau) const {
    if (tau <= 1.0) return 0.0;
    const Envelope env{k3_ * chi_.scale * chi_.scale, 2.0 + 2.0 * chi_.alpha};
    return env(tau - 1.0);
}

ProfileSample PsiProfile::eval(double s) const {
    if (s <= 0.0) return ProfileSample{1.0, 0.0, 0.0, false};
    // Derivatives come from the first integral psi' = F(psi) and the ODE at the
    // interpolated value; differentiating the interpolant amplifies node noise by 1/h^2.
    ProfileSample out = table_.eval(s);
    out.d1 = f_env(out.value);
    const double c = chi_(out.value);
    out.d2 = k3_ * out.value * c * c;
    return out;
}

double psi_blowup_abscissa(const ChiSpec& chi, double k3) {
    validate_chi(chi);
    if (!(k3 > 0.0)) throw ValidationError("psi: K3 must be positive");
    const double k = k3 * chi.scale * chi.scale;
    const Envelope env{k, 2.0 + 2.0 * chi.alpha};
    const Start st = series_start(chi, k);

    auto sys = [&](const State& x, State& dxdt, double) { dxdt[0] = env(x[0]); };
    auto stepper = odeint::make_controlled(st.w0 * 1e-10, kRelTol,
                                           odeint::runge_kutta_dopri5<State>());
    State x{st.w0};
    double t = st.t0;
    double dt = st.t0;
    int guard = 0;
    while (x[0] < kBlowupCap) {
        if (++guard > 2'000'000) throw ConvergenceError("psi: blow-up search exceeded step budget");
        if (t > 1e3) return std::numeric_limits<double>::infinity();
        const auto res = stepper.try_step(sys, x, t, dt);
        (void)res;
        if (dt < 1e-300) throw ConvergenceError("psi: step size underflow before blow-up");
    }
    return t + asymptotic_tail(chi, k, x[0]);
}

double calibrate_k3(const ChiSpec& chi) {
    double lo = std::log(1e-3);
    double hi = std::log(1e6);
    const double t_lo = psi_blowup_abscissa(chi, std::exp(lo));
    const double t_hi = psi_blowup_abscissa(chi, std::exp(hi));
    // Larger K3 blows up earlier.
    if (!(t_lo > 1.0 && t_hi < 1.0)) {
        throw ConvergenceError("calibrate_k3: blow-up abscissa not bracketed by K3 in [1e-3, 1e6]");
    }
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi_blowup_abscissa(chi, std::exp(mid)) > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::exp(0.5 * (lo + hi));
}

PsiProfile build_psi(const ChiSpec& chi, double k3, const ProfileOptions& opts) {
    validate_chi(chi);
    if (!(k3 > 0.0)) throw ValidationError("psi: K3 must be positive");

    PsiProfile psi;
    psi.chi_ = chi;
    psi.k3_ = k3;
    psi.eps_blow_ = opts.eps_blow;
    psi.table_ = ProfileTable(opts.eps_blow, opts.intervals);
    psi.blowup_ = psi_blowup_abscissa(chi, k3);

    const double k = k3 * chi.scale * chi.scale;
    const Envelope env{k, 2.0 + 2.0 * chi.alpha};
    const Start st = series_start(chi, k);
    auto& tab = psi.table_;
    const std::size_t n = tab.size();

    std::vector<double> w(n, 0.0);
    std::size_t filled = 0;
    while (filled < n && tab.t[filled] <= st.t0) {
        w[filled] = series_w(chi, k, tab.t[filled]);
        ++filled;
    }

    auto sys = [&](const State& x, State& dxdt, double) { dxdt[0] = env(x[0]); };
    auto dense = odeint::make_dense_output(st.w0 * 1e-10, kRelTol,
                                           odeint::runge_kutta_dopri5<State>());
    dense.initialize(State{st.w0}, st.t0, st.t0);
    int guard = 0;
    while (filled < n) {
        if (++guard > 2'000'000) throw ConvergenceError("psi: table integration exceeded step budget");
        const auto [t_prev, t_now] = dense.do_step(sys);
        (void)t_prev;
        while (filled < n && tab.t[filled] <= t_now) {
            State x;
            dense.calc_state(tab.t[filled], x);
            if (!std::isfinite(x[0])) break;
            w[filled] = x[0];
            ++filled;
        }
        const double cur = dense.current_state()[0];
        if (!(cur < kBlowupCap)) break;
    }

    if (filled < n) tab.truncate(filled - 1);
    for (std::size_t i = 0; i < tab.size(); ++i) {
        const double v = 1.0 + w[i];
        tab.value[i] = v;
        tab.d1[i] = env(w[i]);
        const double c = chi(v);
        tab.d2[i] = k3 * v * c * c;
    }
    tab.d1[0] = 0.0;

    if (psi.blowup_ < 1.0 - opts.eps_blow) {
        psi.status_ = PsiStatus::early_blowup;
    } else if (psi.blowup_ > 1.0 + opts.eps_blow) {
        psi.status_ = PsiStatus::calibration_needed;
    } else {
        psi.status_ = PsiStatus::calibrated;
    }
    return psi;
}

}  // namespace bernstein
