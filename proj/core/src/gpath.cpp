// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "bernstein/doubling.hpp"
#include "bernstein/error.hpp"

namespace bernstein {

MatrixPathValue matrix_path(const Mat& Y, double c, double tau) {
    if (Y.rows() != Y.cols()) throw ValidationError("matrix path: Y must be square");
    if (!(c > 0.0)) throw ValidationError("matrix path: (1+nu) gamma1 must be positive");
    const auto n = Y.rows();
    const Mat factor = Mat::Identity(n, n) + (tau / c) * Y;
    const Eigen::JacobiSVD<Mat> svd(factor);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || sv(0) / smin > 1e12) {
        throw DomainError("matrix path: I + tau Y/((1+nu) gamma1) is near-singular");
    }
    // Y and the factor commute, so solving from either side gives the same Z.
    // dZ differentiates the resolvent directly, so Z' = -Z^2/c stays a checkable identity.
    const auto lu = factor.partialPivLu();
    const Mat solved = lu.solve(Y);
    MatrixPathValue out;
    out.Z = symmetrize(solved);
    out.dZ = symmetrize(-lu.solve(Mat(Y * solved)) / c);
    return out;
}

double lemma_constant(double k1, double k2, double nu) {
    if (!(k1 >= 0.0)) throw ValidationError("lemma constant: K1 must be nonnegative");
    return (1.0 + nu) * b_coefficient(k2, nu) * (1.0 + k1) * (1.0 + k1);
}

void GPathState::check_admissible() const {
    const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(symmetrize(Y)).eigenvalues().minCoeff();
    const double bound = (1.0 + 0.5 * nu) * gamma1;
    if (lmin < -bound * (1.0 + 1e-12)) {
        throw ValidationError("g-path: -Y <= (1 + nu/2) gamma1 I fails");
    }
}

namespace {

double correction(const EquationModel& model, const GPathState& s) {
    return model.lip_M * s.b_coeff * s.gamma1 * s.chi_c * s.chi_c * s.gap * s.gap;
}

}  // namespace

double g_value(const EquationModel& model, const GPathState& s, double tau) {
    const MatrixPathValue z = s.Z(tau);
    double g = model.eval(s.X(tau), s.U(tau), s.P(tau), z.Z) - tau * correction(model, s);
    if (s.time_term) g += tau * *s.time_term;
    return g;
}

double g_derivative(const EquationModel& model, const GPathState& s, double tau) {
    if (!model.has_partials()) throw ValidationError("g-path: model partials are missing");
    const MatrixPathValue z = s.Z(tau);
    const Vec X = s.X(tau);
    const double U = s.U(tau);
    const Vec P = s.P(tau);
    double gp = model.d_x(X, U, P, z.Z).dot(s.x - s.y) + model.d_r(X, U, P, z.Z) * (s.ux - s.uy) +
                model.d_p(X, U, P, z.Z).dot(s.q) + frob_dot(model.d_M(X, U, P, z.Z), z.dZ) -
                correction(model, s);
    if (s.time_term) gp += *s.time_term;
    return gp;
}

GPathResult g_path_test(const EquationModel& model, const GPathState& state, const GPathOptions& opts) {
    if (!model.has_partials()) throw ValidationError("g-path: model partials are missing");
    if (opts.grid < 3) throw ValidationError("g-path: tau grid needs at least 3 points");
    state.check_admissible();

    const int n = opts.grid;
    std::vector<double> taus(static_cast<std::size_t>(n));
    std::vector<double> gs(static_cast<std::size_t>(n));
    GPathResult res;
    res.min_gprime = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        taus[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
        gs[static_cast<std::size_t>(i)] = g_value(model, state, taus[static_cast<std::size_t>(i)]);
        res.min_gprime = std::min(res.min_gprime, g_derivative(model, state, taus[static_cast<std::size_t>(i)]));
    }
    res.g0 = gs.front();
    res.g1 = gs.back();

    auto push_zero = [&](double tau) {
        if (!res.zeros.empty() && std::abs(res.zeros.back() - tau) < 1e-12) return;
        res.zeros.push_back(tau);
    };
    for (std::size_t i = 0; i + 1 < gs.size(); ++i) {
        if (gs[i] == 0.0) {
            push_zero(taus[i]);
            continue;
        }
        if ((gs[i] < 0.0) != (gs[i + 1] < 0.0) && gs[i + 1] != 0.0) {
            double a = taus[i];
            double b = taus[i + 1];
            const bool rising = gs[i] < 0.0;
            for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
                const double m = 0.5 * (a + b);
                const double gm = g_value(model, state, m);
                if ((gm < 0.0) == rising) {
                    a = m;
                } else {
                    b = m;
                }
            }
            push_zero(0.5 * (a + b));
        }
    }
    if (gs.back() == 0.0) push_zero(taus.back());

    for (double z : res.zeros) {
        const double gp = g_derivative(model, state, z);
        res.gprime_at_zeros.push_back(gp);
        if (!(gp > 0.0)) res.lemma_holds = false;
    }
    if (state.time_term && !(res.min_gprime > 0.0)) res.lemma_holds = false;
    return res;
}

namespace {

// Uniform in [0, 1) from the top 53 bits: identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

Vec unit_vector(int d, std::mt19937_64& rng) {
    Vec e(d);
    if (d == 1) {
        e(0) = unit(rng) < 0.5 ? -1.0 : 1.0;
        return e;
    }
    // Gaussian directions via Box-Muller on the portable uniforms.
    do {
        for (int k = 0; k < d; k += 2) {
            const double r = std::sqrt(-2.0 * std::log(1.0 - unit(rng)));
            const double th = 2.0 * M_PI * unit(rng);
            e(k) = r * std::cos(th);
            if (k + 1 < d) e(k + 1) = r * std::sin(th);
        }
    } while (e.norm() == 0.0);
    return e / e.norm();
}

Mat random_orthogonal(int d, std::mt19937_64& rng) {
    Mat g(d, d);
    for (int j = 0; j < d; ++j) g.col(j) = unit_vector(d, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    return qr.householderQ() * Mat::Identity(d, d);
}

}  // namespace

LemmaSuiteResult run_lemma_suite(const EquationModel& model, const PhiProfile& phi,
                                 const LocalizationProfile& loc, const LemmaSuiteOptions& opts) {
    if (model.dim != loc.dim()) throw ValidationError("lemma suite: model and localization dimensions differ");
    if (!model.has_partials()) throw ValidationError("lemma suite: model partials are missing");
    if (!(opts.L >= 1.0)) throw ValidationError("lemma suite: L must be >= 1");
    if (!(opts.nu > 0.0)) throw ValidationError("lemma suite: nu must be positive");
    if (opts.states < 1) throw ValidationError("lemma suite: states must be >= 1");

    const int d = model.dim;
    const double R = loc.radius();
    const Vec& x0 = loc.center();
    const double t_top = phi.table().t_end();
    const double b = b_coefficient(loc.k2(), opts.nu);
    const ChiSpec& chi = phi.chi();
    std::mt19937_64 rng(opts.seed);

    LemmaSuiteResult res;
    res.worst_relative_gprime = std::numeric_limits<double>::infinity();
    while (res.states < opts.states) {
        if (++res.attempts > opts.max_attempts) {
            throw ConvergenceError("lemma suite: too many rejected states (" + std::to_string(res.states) +
                                   " accepted)");
        }
        GPathState s;
        s.nu = opts.nu;
        s.b_coeff = b;

        // x inside the region where C is tabulated.
        const double rx = 0.98 * std::min(0.75 * R, loc.admissible_radius()) *
                          (d == 1 ? unit(rng) : std::sqrt(unit(rng)));
        s.x = x0 + rx * unit_vector(d, rng);
        const LocalizationSample cs = loc.eval(s.x);
        const double t = 0.01 + 0.95 * t_top * unit(rng);
        const double ratio = std::pow(10.0, -4.0 + 2.0 * unit(rng));
        const double L = opts.L;
        const double lc = L * cs.value;
        s.gap = t / lc;
        const double alpha = ratio * s.gap;
        const double dist = s.gap - alpha;
        s.y = s.x - dist * unit_vector(d, rng);
        if ((s.y - x0).norm() >= R) continue;

        const ProfileSample ph = phi.eval(t);
        s.p = ph.d1 * lc * (s.x - s.y) / s.gap;
        s.q = ph.d1 * L * s.gap * cs.grad;
        s.gamma1 = ph.d1 * lc / s.gap + ph.d2 * lc * lc;
        s.uy = 2.0 * unit(rng) - 1.0;
        s.ux = s.uy + ph.value;
        s.chi_c = chi(cs.value);

        const Mat Q = random_orthogonal(d, rng);
        Vec lam(d);
        for (int k = 0; k < d; ++k) lam(k) = s.gamma1 * (-(1.0 + 0.5 * s.nu) * 0.999 + 4.0 * unit(rng));
        const Mat Y0 = Q * lam.asDiagonal() * Q.transpose();
        const double tau0 = 0.05 + 0.9 * unit(rng);

        // g(tau0) is nonincreasing in the shift s of Y0 + s I; solve g(tau0) = 0.
        const double s_lo = -(1.0 + 0.5 * s.nu) * s.gamma1 * (1.0 - 1e-9) - lam.minCoeff();
        auto g_at = [&](double shift) {
            s.Y = Y0 + shift * Mat::Identity(d, d);
            return g_value(model, s, tau0);
        };
        double a = s_lo;
        double fa;
        try {
            fa = g_at(a);
        } catch (const DomainError&) {
            continue;
        }
        if (!(fa > 0.0)) continue;
        double step = s.gamma1;
        double bnd = a + step;
        bool bracketed = false;
        for (int k = 0; k < 80; ++k) {
            double fb;
            try {
                fb = g_at(bnd);
            } catch (const DomainError&) {
                break;
            }
            if (fb <= 0.0) {
                bracketed = true;
                break;
            }
            a = bnd;
            step *= 2.0;
            bnd = a + step;
        }
        if (!bracketed) continue;
        for (int it = 0; it < 200 && bnd - a > 1e-15 * std::abs(bnd); ++it) {
            const double m = 0.5 * (a + bnd);
            if (g_at(m) > 0.0) {
                a = m;
            } else {
                bnd = m;
            }
        }
        s.Y = Y0 + 0.5 * (a + bnd) * Mat::Identity(d, d);

        GPathResult gr;
        try {
            gr = g_path_test(model, s, opts.path);
        } catch (const DomainError&) {
            continue;
        }
        ++res.states;
        for (double z : gr.zeros) {
            const double gp = g_derivative(model, s, z);
            const MatrixPathValue zv = s.Z(z);
            const Vec X = s.X(z);
            const Vec P = s.P(z);
            const double scale = std::abs(model.d_x(X, s.U(z), P, zv.Z).dot(s.x - s.y)) +
                                 std::abs(model.d_p(X, s.U(z), P, zv.Z).dot(s.q)) +
                                 std::abs(frob_dot(model.d_M(X, s.U(z), P, zv.Z), zv.dZ)) +
                                 model.lip_M * s.b_coeff * s.gamma1 * s.chi_c * s.chi_c * s.gap * s.gap;
            ++res.zeros;
            res.worst_relative_gprime = std::min(res.worst_relative_gprime, scale > 0.0 ? gp / scale : gp);
            if (!(gp > 0.0)) {
                ++res.failures;
                if (!res.counterexample) res.counterexample = s;
            }
        }
    }
    return res;
}

}  // namespace bernstein
