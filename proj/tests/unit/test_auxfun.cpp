// SPDX-License-Identifier: MIT
#include <cmath>
#include <memory>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "bernstein/auxfun.hpp"
#include "bernstein/error.hpp"
#include "oracles.hpp"

using namespace bernstein;

namespace {

std::shared_ptr<const PsiProfile> calibrated_psi(const ChiSpec& chi) {
    return std::make_shared<const PsiProfile>(build_psi(chi, calibrate_k3(chi)));
}

// (4 D(h/2) - D(h)) / 3 with central differences D.
template <class F>
double richardson(F f, double t, double h) {
    const double d1 = (f(t + h) - f(t - h)) / (2 * h);
    const double d2 = (f(t + 0.5 * h) - f(t - 0.5 * h)) / h;
    return (4 * d2 - d1) / 3;
}

}  // namespace

TEST(Chi, HalfPowerConstants) {
    const auto v = validate_chi({0.5, 1.0});
    EXPECT_DOUBLE_EQ(v.k_chi, 1.0);
    EXPECT_NEAR(v.tail_integral_bound, 2.0, 1e-14);
    EXPECT_TRUE(v.monotone);
}

TEST(Chi, ScaledQuarterPower) {
    const auto v = validate_chi({0.25, 2.0});
    EXPECT_DOUBLE_EQ(v.k_chi, 2.0);
    EXPECT_NEAR(v.tail_integral_bound, 2.0, 1e-14);
}

TEST(Chi, RejectsOutsideClass) {
    EXPECT_THROW(validate_chi({0.0, 1.0}), ValidationError);
    EXPECT_THROW(validate_chi({1.0, 1.0}), ValidationError);
    EXPECT_THROW(validate_chi({-0.5, 1.0}), ValidationError);
    EXPECT_THROW(validate_chi({0.5, 0.5}), ValidationError);
    try {
        validate_chi({0.0, 1.0});
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("diverges"), std::string::npos);
    }
}

TEST(Chi, FloorMonotoneAndGrowthBound) {
    const ChiSpec chi{0.3, 1.5};
    double prev = chi(1e-9);
    for (int k = 0; k < 2000; ++k) {
        const double t = std::pow(10.0, -6.0 + 12.0 * k / 1999.0);
        const double v = chi(t);
        EXPECT_GE(v, 1.0);
        EXPECT_GE(v, prev);
        if (t >= 1.0) EXPECT_LE(v, chi.k_chi() * std::pow(t, chi.alpha) * (1 + 1e-15));
        prev = v;
    }
}

TEST(Chi, TailBoundAgainstQuadrature) {
    boost::math::quadrature::exp_sinh<double> q;
    for (const ChiSpec chi : {ChiSpec{0.5, 1.0}, ChiSpec{0.25, 2.0}, ChiSpec{0.8, 3.0}}) {
        for (double T : {1.0, 10.0, 1e3}) {
            const double tail = q.integrate([&](double s) { return 1.0 / ((T + s) * chi(T + s)); }, 0.0,
                                            std::numeric_limits<double>::infinity());
            EXPECT_LE(tail, std::pow(T, -chi.alpha) / (chi.scale * chi.alpha) * (1 + 1e-9));
            EXPECT_NEAR(tail, chi.tail_integral(T), 1e-9 * tail);
        }
    }
}

TEST(Phi, HalfPowerClosedForm) {
    const PhiProfile phi = build_phi({0.5, 1.0});
    EXPECT_TRUE(phi.closed_form());
    EXPECT_NEAR(phi.k1(), 2.0, 1e-12);
    EXPECT_EQ(phi.eval(0.0).value, 0.0);
    EXPECT_DOUBLE_EQ(phi.eval(0.0).d1, 1.0);
    EXPECT_NEAR(phi.eval(0.5).value, 1.0, 1e-10);
    EXPECT_NEAR(phi.eval(0.5).d1, 4.0, 1e-10);
    // Equality case of the lower bound.
    EXPECT_NEAR(phi.eval(0.9).d1, 100.0, 1e-8);
    EXPECT_NEAR(phi.derivative_lower_bound(0.9), 100.0, 1e-8);
}

TEST(Phi, NumericInversionMatchesOracle) {
    // chi = 2 t^(1/2): K1 = 1 and phi' is again (1-t)^-2.
    const PhiProfile phi = build_phi({0.5, 2.0});
    EXPECT_FALSE(phi.closed_form());
    EXPECT_NEAR(phi.k1(), 1.0, 1e-10);
    for (double t : {0.0, 0.1, 0.37, 0.5, 0.8, 0.95, 0.99}) {
        const double ref = oracle::phi_prime_power(t, 0.5);
        EXPECT_NEAR(phi.eval(t).d1, ref, 1e-8 * ref) << "t = " << t;
        EXPECT_NEAR(phi.eval(t).value, oracle::phi_power(t, 0.5), 1e-7 * (1 + t / (1 - t))) << "t = " << t;
    }
}

TEST(Phi, ProfileInvariants) {
    for (const ChiSpec chi : {ChiSpec{0.25, 1.0}, ChiSpec{0.5, 1.0}, ChiSpec{0.7, 1.3}}) {
        const PhiProfile phi = build_phi(chi);
        const double end = phi.table().t_end();
        const double h = 1e-5 * end;
        double prev = 0.0;
        for (int k = 1; k < 1000; ++k) {
            const double t = end * k / 1000.0;
            const ProfileSample s = phi.eval(t);
            EXPECT_GE(s.d1, 1.0);
            EXPECT_GE(s.d1, prev);
            prev = s.d1;
            if (t + h < end) {
                const double d2 = richardson([&](double x) { return phi.eval(x).d1; }, t, h);
                EXPECT_LE(d2, phi.k1() * s.d1 * chi(s.d1) * (1 + 1e-6)) << "t = " << t;
            }
            EXPECT_GE(s.d1, phi.derivative_lower_bound(t) * (1 - 1e-9));
        }
    }
}

TEST(Phi, BlowsUpNearOne) {
    ProfileOptions o;
    o.eps_blow = 1e-5;
    const PhiProfile phi = build_phi({0.5, 1.0}, o);
    double prev = 0.0;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        const double v = phi.eval(1.0 - delta).value;
        EXPECT_GT(v, 5.0 * prev + 1.0);
        prev = v;
    }
    EXPECT_GT(phi.eval(1.0 - 1e-4).d1, 1e7);
    EXPECT_TRUE(phi.eval(0.99999999).saturated);
}

TEST(Phi, Deterministic) {
    const PhiProfile a = build_phi({0.3, 1.7});
    const PhiProfile b = build_phi({0.3, 1.7});
    EXPECT_EQ(a.table().value, b.table().value);
    EXPECT_EQ(a.table().d1, b.table().d1);
    EXPECT_EQ(a.table().d2, b.table().d2);
}

TEST(Psi, StartAndEnvelope) {
    const ChiSpec chi{0.5, 1.0};
    const double k3 = calibrate_k3(chi);
    const PsiProfile psi = build_psi(chi, k3);
    EXPECT_EQ(psi.eval(0.0).value, 1.0);
    EXPECT_EQ(psi.eval(0.0).d1, 0.0);
    EXPECT_EQ(psi.eval(-0.3).value, 1.0);
    for (double tau : {1.0, 1.5, 3.0, 10.0}) {
        EXPECT_NEAR(psi.f_env(tau), std::sqrt(2 * k3 / 3 * (tau * tau * tau - 1)), 1e-10 * (1 + psi.f_env(tau)));
    }
    const auto& tab = psi.table();
    double prev = 1.0;
    for (std::size_t i = 0; i < tab.size(); ++i) {
        EXPECT_LE(tab.d1[i], std::sqrt(2 * k3) * tab.value[i] * chi(tab.value[i]) * (1 + 1e-12));
        EXPECT_GE(tab.value[i], prev);
        prev = tab.value[i];
    }
}

TEST(Psi, OdeResidual) {
    const ChiSpec chi{0.25, 1.0};
    const double k3 = calibrate_k3(chi);
    const PsiProfile psi = build_psi(chi, k3);
    const double end = psi.table().t_end();
    const double h = 1e-5 * end;
    for (int k = 1; k < 1000; ++k) {
        const double t = end * k / 1000.0;
        if (t + h >= end) break;
        const double d2 = richardson([&](double x) { return psi.eval(x).d1; }, t, h);
        const double v = psi.eval(t).value;
        const double rhs = k3 * v * chi(v) * chi(v);
        EXPECT_LE(std::abs(d2 - rhs), 1e-6 * (1 + std::abs(d2))) << "t = " << t;
        EXPECT_EQ(psi.eval(t).d2, rhs);
    }
}

TEST(Psi, CalibrationAndQuadratureOracle) {
    for (const ChiSpec chi : {ChiSpec{0.5, 1.0}, ChiSpec{0.25, 1.0}, ChiSpec{0.5, 2.0}}) {
        const double k3 = calibrate_k3(chi);
        const PsiProfile psi = build_psi(chi, k3);
        EXPECT_EQ(psi.status(), PsiStatus::calibrated);
        EXPECT_NEAR(psi.blowup_abscissa(), 1.0, 1e-3);
        EXPECT_NEAR(oracle::psi_blowup(chi.alpha, chi.scale, k3), 1.0, 1e-3);
        EXPECT_GT(psi.table().value.back(), 1e3);
    }
}

TEST(Psi, ScalingLaw) {
    const ChiSpec chi{0.5, 1.0};
    const double k3 = calibrate_k3(chi);
    EXPECT_NEAR(psi_blowup_abscissa(chi, 4 * k3), 0.5 * psi_blowup_abscissa(chi, k3), 1e-6);
    const double a = oracle::psi_blowup(0.5, 1.0, 0.3);
    EXPECT_NEAR(psi_blowup_abscissa(chi, 0.3), a, 1e-3 * a);
}

TEST(Psi, TooSmallK3NeedsCalibration) {
    const ChiSpec chi{0.5, 1.0};
    const PsiProfile psi = build_psi(chi, 0.25 * calibrate_k3(chi));
    EXPECT_EQ(psi.status(), PsiStatus::calibration_needed);
}

TEST(Localization, ValuesOnRings) {
    const ChiSpec chi{0.5, 1.0};
    const auto psi = calibrated_psi(chi);
    Vec x0(2);
    x0 << 0.3, -0.2;
    const double R = 0.8;
    const LocalizationProfile loc = build_localization(x0, R, psi);
    Vec e(2);
    e << 0.6, 0.8;
    EXPECT_EQ(loc.value(x0), 1.0);
    EXPECT_EQ(loc.value(x0 + 0.5 * R * e), 1.0);
    EXPECT_EQ(loc.value(x0 + 0.2 * R * e), 1.0);
    EXPECT_DOUBLE_EQ(loc.value(x0 + 0.625 * R * e), psi->eval(0.5).value);
    EXPECT_GT(loc.value(x0 + loc.admissible_radius() * e), 1e3);
    for (int k = 0; k <= 100; ++k) EXPECT_GE(loc.value(x0 + loc.admissible_radius() * k / 100.0 * e), 1.0);
}

TEST(Localization, DerivativeBoundsByCentralDifferences) {
    const ChiSpec chi{0.25, 1.0};
    const auto psi = calibrated_psi(chi);
    const double R = 1.0;
    const LocalizationProfile loc = build_localization(Vec::Zero(2), R, psi);
    const double h = 1e-5 * R;
    const double k2 = loc.k2();
    Vec e(2);
    e << std::cos(0.7), std::sin(0.7);
    for (int k = 0; k < 1000; ++k) {
        const double r = 0.05 + (loc.admissible_radius() - 0.05 - 2 * h) * k / 999.0;
        const Vec x = r * e;
        const double c = loc.value(x);
        if (c > 1e4) continue;
        Vec g(2);
        Mat H(2, 2);
        for (int a = 0; a < 2; ++a) {
            Vec da = Vec::Zero(2);
            da(a) = h;
            g(a) = (loc.value(x + da) - loc.value(x - da)) / (2 * h);
            for (int b = 0; b < 2; ++b) {
                Vec db = Vec::Zero(2);
                db(b) = h;
                H(a, b) = (loc.value(x + da + db) - loc.value(x + da - db) - loc.value(x - da + db) +
                           loc.value(x - da - db)) / (4 * h * h);
            }
        }
        const double bound = k2 * chi(c) * chi(c);
        EXPECT_LE(g.squaredNorm() / (c * c), bound * 1.01 + 1e-6) << "r = " << r;
        EXPECT_LE(H.norm() / c, bound * 1.01 + 1e-3) << "r = " << r;
    }
}

TEST(Localization, K2Scaling) {
    const auto psi = calibrated_psi({0.5, 1.0});
    const double k2_1 = build_localization(Vec::Zero(1), 1.0, psi).k2();
    for (double R : {0.5, 1.0, 2.0}) {
        const double a = build_localization(Vec::Zero(1), R, psi).k2();
        const double b = build_localization(Vec::Zero(1), 2 * R, psi).k2();
        EXPECT_LE(b, 1.01 * a / 4);
        EXPECT_LE(a, 1.01 * k2_1 / (R * R));
    }
}

TEST(Localization, BCoefficient) {
    EXPECT_DOUBLE_EQ(b_coefficient(3.0, 0.25), (2.0 + 1.0 / 0.5) * 3.0);
}

TEST(Localization, RejectsBadInput) {
    const auto psi = calibrated_psi({0.5, 1.0});
    EXPECT_THROW(build_localization(Vec::Zero(1), 0.0, psi), ValidationError);
    EXPECT_THROW(build_localization(Vec::Zero(1), 1.0, nullptr), ValidationError);
    const auto weak = std::make_shared<const PsiProfile>(build_psi({0.5, 1.0}, 0.01));
    EXPECT_THROW(build_localization(Vec::Zero(1), 1.0, weak), ValidationError);
}
