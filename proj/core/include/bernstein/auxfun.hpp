// SPDX-License-Identifier: MIT
//
// Auxiliary profiles for the localized doubling argument:
//
//   phi  blow-up profile on [0,1):  phi(0)=0, phi'(0)=1, phi'' = K1 phi' chi(phi')
//   psi  barrier on [0,1):          psi'' = K3 psi chi(psi)^2, psi(0)=1, psi'(0)=0
//   C    localization on a ball:    C = psi(4(|x-x0| - R/2)/R) outside B(x0,R/2), 1 inside
//
// Profiles are tabulated on a grid graded towards t = 1 (uniform in
// sigma = -log(1-t)) and evaluated by quintic Hermite interpolation of
// (value, first, second derivative). Everything is immutable after build.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bernstein/chi.hpp"
#include "bernstein/linalg.hpp"

namespace bernstein {

struct ProfileSample {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    /// Argument was clamped at the end of the table.
    bool saturated = false;
};

/// Table on t_i = 1 - exp(-i * sigma_step), i = 0..intervals, ending at 1 - eps_blow.
class ProfileTable {
public:
    ProfileTable() = default;
    ProfileTable(double eps_blow, int intervals);

    std::size_t size() const noexcept { return t.size(); }
    double t_end() const noexcept { return t.empty() ? 0.0 : t.back(); }
    double sigma_step() const noexcept { return sigma_step_; }

    /// Drop every node after index `last` (used when a profile blows up early).
    void truncate(std::size_t last);

    ProfileSample eval(double x) const;

    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> d1;
    std::vector<double> d2;

private:
    double sigma_step_ = 0.0;
};

struct ProfileOptions {
    double eps_blow = 1e-3;
    int intervals = 16384;
};

// ---------------------------------------------------------------------------
// phi

class PhiProfile {
public:
    const ChiSpec& chi() const noexcept { return chi_; }
    /// K1 = integral of ds / (s chi(s)) over [1, inf).
    double k1() const noexcept { return k1_; }
    /// True when phi' came from the closed form (1-t)^(-1/alpha) rather than inversion.
    bool closed_form() const noexcept { return closed_form_; }
    double eps_blow() const noexcept { return eps_blow_; }
    const ProfileTable& table() const noexcept { return table_; }

    ProfileSample eval(double t) const { return table_.eval(t); }

    /// Lower bound (K1 (1-t) K(chi) alpha)^(-1/alpha) on phi'(t).
    double derivative_lower_bound(double t) const;

private:
    friend PhiProfile build_phi(const ChiSpec&, const ProfileOptions&);
    ChiSpec chi_;
    double k1_ = 0.0;
    bool closed_form_ = false;
    double eps_blow_ = 0.0;
    ProfileTable table_;
};

/// Builds phi from the defining relation int_1^{phi'(t)} ds/(s chi(s)) = K1 t.
/// Throws ConvergenceError when the K1 quadrature or the inversion fails.
PhiProfile build_phi(const ChiSpec& chi, const ProfileOptions& opts = {});

// ---------------------------------------------------------------------------
// psi

enum class PsiStatus {
    calibrated,         ///< blow-up abscissa within eps_blow of 1
    calibration_needed, ///< no blow-up before t = 1: K3 too small
    early_blowup,       ///< blow-up before 1 - eps_blow: K3 too large
};

std::string to_string(PsiStatus s);

class PsiProfile {
public:
    const ChiSpec& chi() const noexcept { return chi_; }
    double k3() const noexcept { return k3_; }
    double eps_blow() const noexcept { return eps_blow_; }
    /// Blow-up abscissa t* of the first-order reduction psi' = F(psi).
    double blowup_abscissa() const noexcept { return blowup_; }
    PsiStatus status() const noexcept { return status_; }
    const ProfileTable& table() const noexcept { return table_; }

    /// F(tau) with F(tau)^2 = 2 K3 int_1^tau s chi(s)^2 ds.
    double f_env(double tau) const;

    /// psi and its derivatives; psi is extended by 1 for s <= 0.
    ProfileSample eval(double s) const;

private:
    friend PsiProfile build_psi(const ChiSpec&, double, const ProfileOptions&);
    ChiSpec chi_;
    double k3_ = 0.0;
    double eps_blow_ = 0.0;
    double blowup_ = 0.0;
    PsiStatus status_ = PsiStatus::calibration_needed;
    ProfileTable table_;
};

/// Integrates psi' = F(psi) from psi(0) = 1 with adaptive Dormand-Prince
/// stepping (rel tol 1e-10). A small-t series seeds the start because F has a
/// square-root singularity at 1.
PsiProfile build_psi(const ChiSpec& chi, double k3, const ProfileOptions& opts = {});

/// Blow-up abscissa of psi for the given K3 (ODE route plus an asymptotic tail).
double psi_blowup_abscissa(const ChiSpec& chi, double k3);

/// Bisection for K3 in [1e-3, 1e6] such that the blow-up abscissa is 1.
/// Throws ConvergenceError on bracket failure.
double calibrate_k3(const ChiSpec& chi);

// ---------------------------------------------------------------------------
// localization

struct LocalizationSample {
    double value = 1.0;
    Vec grad;
    Mat hess;
    bool saturated = false;
};

class LocalizationProfile {
public:
    const Vec& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    int dim() const noexcept { return static_cast<int>(center_.size()); }
    const PsiProfile& psi() const noexcept { return *psi_; }
    /// K2(R): sup of |D^2C|/(C chi(C)^2) and |DC|^2/(C^2 chi(C)^2), Frobenius norms.
    double k2() const noexcept { return k2_; }

    /// Radial coordinate s = 4(|x-x0| - R/2)/R fed to psi.
    double radial_argument(double distance) const noexcept;
    /// Largest distance from the center before the psi table saturates.
    double admissible_radius() const noexcept;

    double value(const Vec& x) const;
    LocalizationSample eval(const Vec& x) const;

private:
    friend LocalizationProfile build_localization(const Vec&, double,
                                                  std::shared_ptr<const PsiProfile>);
    Vec center_;
    double radius_ = 1.0;
    double k2_ = 0.0;
    std::shared_ptr<const PsiProfile> psi_;
};

/// Builds C around x0 with radius R from a calibrated psi.
LocalizationProfile build_localization(const Vec& x0, double radius,
                                       std::shared_ptr<const PsiProfile> psi);

/// B(R, nu) = (2 + 1/(2 nu)) K2.
double b_coefficient(double k2, double nu);

}  // namespace bernstein
