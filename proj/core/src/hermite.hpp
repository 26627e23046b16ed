// SPDX-License-Identifier: MIT
#pragma once

namespace bernstein::detail {

struct HermiteValue {
    double f;
    double df;
    double d2f;
};

/// Quintic Hermite interpolant on [x0, x0+h] matching value, first and second
/// derivative at both ends; s = (x - x0)/h in [0, 1].
inline HermiteValue quintic_hermite(double s, double h, double f0, double g0, double c0,
                                    double f1, double g1, double c1) noexcept {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;

    const double b0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    const double b1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    const double b2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    const double b3 = 0.5 * (s3 - 2 * s4 + s5);
    const double b4 = -4 * s3 + 7 * s4 - 3 * s5;
    const double b5 = 10 * s3 - 15 * s4 + 6 * s5;

    const double d0 = -30 * s2 + 60 * s3 - 30 * s4;
    const double d1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    const double d2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
    const double d3 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
    const double d4 = -12 * s2 + 28 * s3 - 15 * s4;
    const double d5 = 30 * s2 - 60 * s3 + 30 * s4;

    const double e0 = -60 * s + 180 * s2 - 120 * s3;
    const double e1 = -36 * s + 96 * s2 - 60 * s3;
    const double e2 = 0.5 * (2 - 18 * s + 36 * s2 - 20 * s3);
    const double e3 = 0.5 * (6 * s - 24 * s2 + 20 * s3);
    const double e4 = -24 * s + 84 * s2 - 60 * s3;
    const double e5 = 60 * s - 180 * s2 + 120 * s3;

    const double hh = h * h;
    HermiteValue out;
    out.f = f0 * b0 + h * g0 * b1 + hh * c0 * b2 + hh * c1 * b3 + h * g1 * b4 + f1 * b5;
    out.df = (f0 * d0 + h * g0 * d1 + hh * c0 * d2 + hh * c1 * d3 + h * g1 * d4 + f1 * d5) / h;
    out.d2f = (f0 * e0 + h * g0 * e1 + hh * c0 * e2 + hh * c1 * e3 + h * g1 * e4 + f1 * e5) / hh;
    return out;
}

}  // namespace bernstein::detail
