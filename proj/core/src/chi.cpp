// SPDX-License-Identifier: MIT
#include "bernstein/chi.hpp"

#include <cmath>
#include <sstream>

#include "bernstein/error.hpp"

namespace bernstein {

double ChiSpec::operator()(double t) const noexcept {
    if (t <= 0.0) return 1.0;
    return std::max(1.0, scale * std::pow(t, alpha));
}

double ChiSpec::derivative(double t) const noexcept {
    if (t <= 0.0) return 0.0;
    const double v = scale * std::pow(t, alpha);
    return v > 1.0 ? alpha * v / t : 0.0;
}

double ChiSpec::tail_integral(double from) const {
    if (from < 1.0) throw ValidationError("tail_integral: lower limit must be >= 1");
    // scale >= 1 puts every t >= 1 above the floor.
    return std::pow(from, -alpha) / (scale * alpha);
}

ChiValidation validate_chi(const ChiSpec& chi) {
    if (!(chi.alpha > 0.0)) {
        throw ValidationError(
            "chi: alpha must be > 0; the integral of dt/(t chi(t)) over [1,inf) diverges");
    }
    if (!(chi.alpha < 1.0)) {
        throw ValidationError("chi: alpha must be < 1 for chi(t) <= K t^alpha with alpha < 1");
    }
    if (!(chi.scale >= 1.0) || !std::isfinite(chi.scale)) {
        throw ValidationError("chi: scale must be a finite number >= 1");
    }
    ChiValidation out;
    out.k_chi = chi.k_chi();
    out.tail_integral_bound = chi.tail_integral(1.0);
    out.monotone = true;
    // Spot check of monotonicity on a log grid; the closed form is monotone.
    double prev = chi(1e-6);
    for (int k = -5; k <= 12; ++k) {
        const double v = chi(std::pow(10.0, k));
        if (v < prev) out.monotone = false;
        prev = v;
    }
    return out;
}

std::string describe(const ChiSpec& chi) {
    std::ostringstream os;
    os.precision(17);
    os << "max(1, " << chi.scale << " * t^" << chi.alpha << ")";
    return os.str();
}

}  // namespace bernstein
