// SPDX-License-Identifier: MIT
#pragma once

#include <string>

namespace bernstein {

/// Growth weight chi(t) = max(1, scale * t^alpha).
///
/// Members of the admissible class need alpha in (0,1) and scale >= 1; the
/// floor at 1 keeps the codomain inside [1, inf). Use validate_chi() before
/// handing a ChiSpec to any builder.
struct ChiSpec {
    double alpha = 0.5;
    double scale = 1.0;

    double operator()(double t) const noexcept;

    /// chi'(t); zero on the floor region.
    double derivative(double t) const noexcept;

    /// Constant K with chi(t) <= K t^alpha for t >= 1.
    double k_chi() const noexcept { return scale; }

    /// Closed form of the tail integral of dt / (t chi(t)) over [from, inf), from >= 1.
    double tail_integral(double from) const;
};

struct ChiValidation {
    double k_chi = 0.0;
    /// Upper bound on the integral of dt / (t chi(t)) over [1, inf).
    double tail_integral_bound = 0.0;
    bool monotone = false;
};

/// Confirms class membership; throws ValidationError naming the failed condition.
ChiValidation validate_chi(const ChiSpec& chi);

std::string describe(const ChiSpec& chi);

}  // namespace bernstein
