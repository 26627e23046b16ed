// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cmath>

#include "bernstein/auxfun.hpp"
#include "bernstein/error.hpp"

namespace bernstein {

namespace {

// Radial part of C at distance r: value, radial derivative, second radial derivative.
struct Radial {
    double value;
    double dr;
    double drr;
    bool saturated;
};

Radial radial_eval(const PsiProfile& psi, double radius, double r) {
    const double s = 4.0 * (r - 0.5 * radius) / radius;
    const ProfileSample p = psi.eval(s);
    const double k = 4.0 / radius;
    return {p.value, k * p.d1, k * k * p.d2, p.saturated};
}

// Frobenius norm of D^2 C = C'' e e^T + (C'/r)(I - e e^T) in `dim` dimensions.
double hessian_norm(const Radial& rad, double r, int dim) {
    const double tangential = r > 0.0 ? rad.dr / r : 0.0;
    return std::sqrt(rad.drr * rad.drr + (dim - 1) * tangential * tangential);
}

}  // namespace

double LocalizationProfile::radial_argument(double distance) const noexcept {
    return 4.0 * (distance - 0.5 * radius_) / radius_;
}

double LocalizationProfile::admissible_radius() const noexcept {
    return 0.5 * radius_ + 0.25 * radius_ * psi_->table().t_end();
}

double LocalizationProfile::value(const Vec& x) const {
    const double r = (x - center_).norm();
    if (r <= 0.5 * radius_) return 1.0;
    return psi_->eval(radial_argument(r)).value;
}

LocalizationSample LocalizationProfile::eval(const Vec& x) const {
    const int d = dim();
    if (x.size() != d) throw ValidationError("localization: point dimension mismatch");
    LocalizationSample out;
    out.grad = Vec::Zero(d);
    out.hess = Mat::Zero(d, d);
    const Vec dx = x - center_;
    const double r = dx.norm();
    if (r <= 0.5 * radius_) return out;

    const Radial rad = radial_eval(*psi_, radius_, r);
    const Vec e = dx / r;
    out.value = rad.value;
    out.saturated = rad.saturated;
    out.grad = rad.dr * e;
    const Mat eet = e * e.transpose();
    out.hess = rad.drr * eet + (rad.dr / r) * (Mat::Identity(d, d) - eet);
    return out;
}

LocalizationProfile build_localization(const Vec& x0, double radius,
                                       std::shared_ptr<const PsiProfile> psi) {
    if (!psi) throw ValidationError("localization: psi profile is required");
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ValidationError("localization: radius must be positive");
    }
    if (x0.size() < 1) throw ValidationError("localization: center must have dimension >= 1");
    if (psi->status() != PsiStatus::calibrated) {
        throw ValidationError("localization: psi is not calibrated (" + to_string(psi->status()) + ")");
    }

    LocalizationProfile loc;
    loc.center_ = x0;
    loc.radius_ = radius;
    loc.psi_ = std::move(psi);

    const ChiSpec& chi = loc.psi_->chi();
    const ProfileTable& tab = loc.psi_->table();
    const int d = static_cast<int>(x0.size());
    double k2 = 0.0;
    // Scan the radial profile: every table node plus three interior points per cell.
    for (std::size_t i = 0; i + 1 < tab.size(); ++i) {
        for (int j = 0; j < 4; ++j) {
            const double s = tab.t[i] + 0.25 * j * (tab.t[i + 1] - tab.t[i]);
            const double r = radius * (0.5 + 0.25 * s);
            const Radial rad = radial_eval(*loc.psi_, radius, r);
            const double c2 = chi(rad.value) * chi(rad.value);
            const double h = hessian_norm(rad, r, d) / (rad.value * c2);
            const double g = rad.dr * rad.dr / (rad.value * rad.value * c2);
            k2 = std::max({k2, h, g});
        }
    }
    loc.k2_ = k2;
    return loc;
}

double b_coefficient(double k2, double nu) {
    if (!(nu > 0.0)) throw ValidationError("B(R,nu): nu must be positive");
    return (2.0 + 1.0 / (2.0 * nu)) * k2;
}

}  // namespace bernstein
