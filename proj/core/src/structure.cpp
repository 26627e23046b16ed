// SPDX-License-Identifier: MIT
#include "bernstein/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "bernstein/error.hpp"
#include "bernstein/quasi_random.hpp"

namespace bernstein {

std::string to_string(Clause c) {
    switch (c) {
        case Clause::i: return "i";
        case Clause::ii: return "ii";
        case Clause::iii: return "iii";
        case Clause::parabolic: return "parabolic";
    }
    return "?";
}

Clause parse_clause(const std::string& s) {
    if (s == "i") return Clause::i;
    if (s == "ii") return Clause::ii;
    if (s == "iii") return Clause::iii;
    if (s == "parabolic") return Clause::parabolic;
    throw ValidationError("unknown clause '" + s + "' (expected i, ii, iii or parabolic)");
}

double constraint_width(Clause clause, const ChiSpec& chi, double eta, double pnorm) {
    const double c = chi(pnorm);
    return eta * pnorm * (clause == Clause::i ? c * c : c);
}

bool in_constraint_set(const EquationModel& model, const ConstraintPoint& pt, Clause clause,
                       const ChiSpec& chi, double eta, double L) {
    const double pn = pt.p.norm();
    if (!(pn >= L)) return false;
    if (clause == Clause::parabolic) return true;
    const double f = model.eval(pt.x, pt.r, pt.p, pt.M);
    return std::isfinite(f) && std::abs(f) <= constraint_width(clause, chi, eta, pn);
}

double ConditionSides::relative_margin() const noexcept {
    const double den = std::abs(lhs) + std::abs(rhs);
    if (den == 0.0) return 0.0;
    return (lhs - rhs) / den;
}

namespace {

struct Partials {
    Vec fx;
    double fr;
    Vec fp;
    Mat fm;
};

Partials partials_at(const EquationModel& model, const ConstraintPoint& pt) {
    return {model.d_x(pt.x, pt.r, pt.p, pt.M), model.d_r(pt.x, pt.r, pt.p, pt.M),
            model.d_p(pt.x, pt.r, pt.p, pt.M), model.d_M(pt.x, pt.r, pt.p, pt.M)};
}

// Sides as printed, plus the right side of clause iii / parabolic with |F_r|.
struct SidesEx {
    ConditionSides sides;
    double rhs_abs_fr;
};

SidesEx sides_unchecked(const EquationModel& model, const ConstraintPoint& pt, Clause clause,
                        const ChiSpec& chi, double eta, double K) {
    const Partials d = partials_at(model, pt);
    const double pn = pt.p.norm();
    const double c = chi(pn);
    const double fm_m2 = frob_dot(d.fm, pt.M * pt.M);
    const double kf = K * model.lip_M;
    SidesEx out{};
    switch (clause) {
        case Clause::i: {
            const double pc2 = pn * c * c;
            out.sides.lhs = -fm_m2;
            out.sides.rhs = eta + (2.0 + eta) * d.fx.norm() * pn * c + eta * std::abs(d.fp.dot(pt.p)) +
                            kf * pc2 * pc2;
            out.rhs_abs_fr = out.sides.rhs;
            break;
        }
        case Clause::ii: {
            out.sides.lhs = -fm_m2;
            out.sides.rhs = eta + (1.0 + eta) * d.fx.norm() * pn + eta * std::abs(d.fp.dot(pt.p)) +
                            kf * (pn * c) * (pn * c);
            out.rhs_abs_fr = out.sides.rhs;
            break;
        }
        case Clause::iii:
        case Clause::parabolic: {
            const double fxp = d.fx.dot(pt.p);
            const double p2 = pn * pn;
            const double extra = clause == Clause::parabolic ? p2 * c : 0.0;
            out.sides.lhs = fxp + d.fr * p2 - fm_m2 / (1.0 + eta);
            const double tail = kf * (pn * c) * (pn * c);
            out.sides.rhs = eta + eta * (std::abs(fxp) + d.fr * p2 + d.fp.dot(pt.p) + extra) + tail;
            out.rhs_abs_fr =
                eta + eta * (std::abs(fxp) + std::abs(d.fr) * p2 + d.fp.dot(pt.p) + extra) + tail;
            break;
        }
    }
    return out;
}

}  // namespace

ConditionSides condition_lhs_rhs(const EquationModel& model, const ConstraintPoint& pt, Clause clause,
                                 const ChiSpec& chi, double eta, double K, double L) {
    if (!model.has_partials()) throw ValidationError("condition: model partials are missing");
    if (!in_constraint_set(model, pt, clause, chi, eta, std::max(L, 1.0))) {
        throw ValidationError("condition: point is outside the constraint set of clause " +
                              to_string(clause));
    }
    return sides_unchecked(model, pt, clause, chi, eta, K).sides;
}

std::pair<double, double> trace_interval(const EquationModel& model, const Vec& x, double r,
                                         const Vec& p, Clause clause, const ChiSpec& chi,
                                         double eta) {
    if (!model.trace_form) throw ValidationError("trace interval: model has no trace form");
    const double g = model.trace_form->lower_order(x, r, p);
    const double w = constraint_width(clause, chi, eta, p.norm());
    return {g - w, g + w};
}

// ---------------------------------------------------------------------------
// sampling

namespace {

constexpr double kShrink = 1.0 - 1e-9;

Vec sample_ball(const Vec& center, double radius, double u0, double u1) {
    Vec x = center;
    if (center.size() == 1) {
        x(0) += radius * (2.0 * u0 - 1.0);
    } else {
        const double rho = radius * std::sqrt(u0);
        const double th = 2.0 * M_PI * u1;
        x(0) += rho * std::cos(th);
        x(1) += rho * std::sin(th);
    }
    return x;
}

Vec sample_direction(int d, double u) {
    Vec e(d);
    if (d == 1) {
        e(0) = u < 0.5 ? -1.0 : 1.0;
    } else {
        e(0) = std::cos(2.0 * M_PI * u);
        e(1) = std::sin(2.0 * M_PI * u);
    }
    return e;
}

// Symmetric matrix from coordinates in (0,1): entries in (-1, 1), unit Frobenius norm.
Mat sample_symmetric(int d, const double* u) {
    Mat s(d, d);
    int k = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            s(i, j) = 2.0 * u[k++] - 1.0;
            s(j, i) = s(i, j);
        }
    }
    const double n = s.norm();
    return n > 0.0 ? Mat(s / n) : s;
}

// Root of s -> F(base + s I) - target; F is nonincreasing in s by ellipticity.
std::optional<double> solve_shift(const EquationModel& model, const Vec& x, double r, const Vec& p,
                                  const Mat& base, double target, double tol) {
    const int d = static_cast<int>(base.rows());
    const Mat I = Mat::Identity(d, d);
    auto g = [&](double s) { return model.eval(x, r, p, base + s * I) - target; };
    double lo = 0.0;
    double hi = 0.0;
    const double g0 = g(0.0);
    if (!std::isfinite(g0)) return std::nullopt;
    if (std::abs(g0) <= tol) return 0.0;
    double step = 1.0;
    if (g0 > 0.0) {
        while (true) {
            hi = step;
            const double gh = g(hi);
            if (!std::isfinite(gh)) return std::nullopt;
            if (gh <= 0.0) break;
            lo = hi;
            step *= 2.0;
            if (step > 1e300) return std::nullopt;
        }
    } else {
        while (true) {
            lo = -step;
            const double gl = g(lo);
            if (!std::isfinite(gl)) return std::nullopt;
            if (gl >= 0.0) break;
            hi = lo;
            step *= 2.0;
            if (step > 1e300) return std::nullopt;
        }
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) <= tol) return mid;
        if (mid == lo || mid == hi) return mid;
        if (gm > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

int sampler_dims(int d) { return 8 + d * (d + 1) / 2; }

}  // namespace

SampleSet sample_constraint_set(const EquationModel& model, Clause clause, const ChiSpec& chi,
                                double eta, double L, const SamplerOptions& opts) {
    if (opts.budget < 1) throw ValidationError("sampler: budget must be >= 1");
    const int d = model.dim;
    if (d < 1 || d > 2) throw ValidationError("sampler: only dimensions 1 and 2 are supported");
    if (opts.center.size() != d) throw ValidationError("sampler: center dimension mismatch");
    if (!(opts.radius > 0.0)) throw ValidationError("sampler: radius must be positive");
    if (!(L >= 1.0)) throw ValidationError("sampler: L must be >= 1");
    if (!(opts.p_span >= 1.0)) throw ValidationError("sampler: p_span must be >= 1");
    if (!(opts.r_max >= opts.r_min)) throw ValidationError("sampler: empty r range");

    QuasiRandom qr(sampler_dims(d), opts.seed);
    SampleSet out;
    out.points.reserve(static_cast<std::size_t>(opts.budget));
    const bool reducer = opts.use_trace_form && model.trace_form.has_value();

    for (int n = 0; n < opts.budget; ++n) {
        const auto& u = qr.next();
        ConstraintPoint pt;
        pt.x = sample_ball(opts.center, opts.radius, u[0], u[1]);
        pt.r = opts.r_min + (opts.r_max - opts.r_min) * u[2];
        // A quarter of the samples sit on |p| = L, where the margin is usually smallest.
        const double pn = u[3] < 0.25 ? L : L * std::pow(opts.p_span, (u[3] - 0.25) / 0.75);
        pt.p = pn * sample_direction(d, u[4]);
        const double mode = u[5];
        const double pos = u[6];
        const double amp = u[7];
        const Mat dir = sample_symmetric(d, &u[8]);
        const double w = constraint_width(clause, chi, eta, pn) * kShrink;

        if (clause == Clause::parabolic) {
            // M is unconstrained; sample around 0 on the scale |p|.
            pt.M = mode < 0.25 ? Mat(Mat::Zero(d, d)) : Mat(pn * amp * amp * dir);
        } else if (reducer) {
            const TraceForm& tf = *model.trace_form;
            const Mat A = tf.diffusion(pt.x);
            const double tr_a = A.trace();
            const double g = tf.lower_order(pt.x, pt.r, pt.p);
            double tau;
            if (tr_a <= 0.0) {
                if (std::abs(g) > w) {
                    ++out.rejected;
                    continue;
                }
                tau = 0.0;
            } else if (mode < 0.5) {
                // Scalar matrix at the trace of smallest modulus: minimizes Tr(A M^2).
                tau = std::clamp(0.0, g - w, g + w);
            } else {
                tau = (g - w) + 2.0 * w * pos;
            }
            pt.M = tr_a > 0.0 ? Mat(tau / tr_a * Mat::Identity(d, d)) : Mat(Mat::Zero(d, d));
            if (!tf.constant_diffusion && tr_a > 0.0 && amp > 0.5) {
                // Tr(A P) = 0 keeps the trace constraint.
                Mat P = dir - (frob_dot(A, dir) / tr_a) * Mat::Identity(d, d);
                pt.M += (std::abs(tau) / tr_a + 1.0) * (amp - 0.5) * P;
            }
        } else {
            const double target = w * (2.0 * pos - 1.0);
            const double tol = 1e-6 * w;
            auto s0 = solve_shift(model, pt.x, pt.r, pt.p, Mat::Zero(d, d), target, tol);
            if (!s0) {
                ++out.rejected;
                continue;
            }
            Mat base = Mat::Zero(d, d);
            if (mode >= 0.25) base = 2.0 * std::abs(*s0) * amp * amp * amp * dir;
            auto s = solve_shift(model, pt.x, pt.r, pt.p, base, target, tol);
            if (!s) {
                ++out.rejected;
                continue;
            }
            pt.M = base + (*s) * Mat::Identity(d, d);
        }

        if (!in_constraint_set(model, pt, clause, chi, eta, L)) {
            ++out.rejected;
            continue;
        }
        out.points.push_back(std::move(pt));
    }
    out.vacuous = out.points.empty();
    return out;
}

// ---------------------------------------------------------------------------
// hypotheses

HypothesisReport check_hypotheses(const EquationModel& model, const SamplerOptions& opts, int points) {
    if (!model.has_partials()) throw ValidationError("hypotheses: model partials are missing");
    const int d = model.dim;
    const int nsym = d * (d + 1) / 2;
    QuasiRandom qr(6 + 3 * nsym + 2 * d, opts.seed ^ 0x9e3779b97f4a7c15ULL);
    HypothesisReport rep;
    const Mat I = Mat::Identity(d, d);

    for (int n = 0; n < points; ++n) {
        const auto& u = qr.next();
        std::size_t k = 0;
        auto next = [&]() { return u[k++]; };
        const double u0 = next();
        const double u1 = next();
        const Vec x = sample_ball(opts.center, opts.radius, u0, u1);
        const double r = opts.r_min + (opts.r_max - opts.r_min) * next();
        const double pn = std::pow(10.0, -1.0 + 3.0 * next());
        const Vec p = pn * sample_direction(d, next());
        const Mat M = 10.0 * next() * sample_symmetric(d, &u[k]);
        k += static_cast<std::size_t>(nsym);
        const Mat B = sample_symmetric(d, &u[k]);
        k += static_cast<std::size_t>(nsym);
        const Mat psd = 5.0 * B * B.transpose();
        const Mat dM = sample_symmetric(d, &u[k]);
        k += static_cast<std::size_t>(nsym);
        Vec dx(d);
        Vec dp(d);
        for (int j = 0; j < d; ++j) dx(j) = 2.0 * next() - 1.0;
        const double dr = 2.0 * next() - 1.0;
        for (int j = 0; j < d; ++j) dp(j) = 2.0 * next() - 1.0;

        const Mat fm = model.d_M(x, r, p, M);
        const double fr = model.d_r(x, r, p, M);
        const double top = Eigen::SelfAdjointEigenSolver<Mat>(symmetrize(fm)).eigenvalues().maxCoeff();
        if (top > 1e-12 * (1.0 + fm.norm()) && rep.f_m_nonpositive) {
            rep.f_m_nonpositive = false;
            rep.failures.push_back("F_M has a positive eigenvalue");
        }
        if (fr < -1e-12 * (1.0 + std::abs(fr)) && rep.f_r_nonnegative) {
            rep.f_r_nonnegative = false;
            rep.failures.push_back("F_r is negative");
        }
        const double f0 = model.eval(x, r, p, M);
        const double f1 = model.eval(x, r, p, M + psd);
        if (f1 > f0 + 1e-10 * (1.0 + std::abs(f0)) && rep.elliptic) {
            rep.elliptic = false;
            rep.failures.push_back("F is not nonincreasing in M");
        }

        const double h = 1e-6 * (1.0 + pn);
        const double plus = model.eval(x + h * dx, r + h * dr, p + h * dp, M + h * dM);
        const double minus = model.eval(x - h * dx, r - h * dr, p - h * dp, M - h * dM);
        const double numeric = (plus - minus) / (2.0 * h);
        const double analytic = model.d_x(x, r, p, M).dot(dx) + fr * dr + model.d_p(x, r, p, M).dot(dp) +
                                frob_dot(fm, dM);
        const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6 * (1.0 + std::abs(f0))});
        const double err = std::abs(numeric - analytic) / scale;
        rep.worst_partial_error = std::max(rep.worst_partial_error, err);
    }
    if (rep.worst_partial_error > 1e-4) {
        rep.partials_consistent = false;
        rep.failures.push_back("partial callbacks disagree with central differences");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// bisection for L

std::string to_string(CertStatus s) {
    switch (s) {
        case CertStatus::certified: return "certified";
        case CertStatus::violated: return "violated";
        case CertStatus::indeterminate: return "indeterminate";
    }
    return "?";
}

namespace {

struct Evaluation {
    bool certified = false;
    bool vacuous = false;
    double margin = 1.0;
    std::size_t samples = 0;
    std::size_t ambiguous = 0;
    std::optional<ConstraintPoint> witness;
    std::optional<ConditionSides> witness_sides;
    std::vector<std::pair<double, double>> profile;
};

Evaluation evaluate_at(const EquationModel& model, Clause clause, const ChiSpec& chi, double eta,
                       double K, double L, const SamplerOptions& sopts, bool keep_profile) {
    const SampleSet set = sample_constraint_set(model, clause, chi, eta, L, sopts);
    Evaluation ev;
    ev.vacuous = set.vacuous;
    ev.samples = set.points.size();
    for (const auto& pt : set.points) {
        const SidesEx s = sides_unchecked(model, pt, clause, chi, eta, K);
        const double m = s.sides.relative_margin();
        if (std::isnan(m)) {
            ev.margin = -1.0;
            ev.witness = pt;
            ev.witness_sides = s.sides;
            continue;
        }
        if ((s.sides.lhs > s.sides.rhs) != (s.sides.lhs > s.rhs_abs_fr)) ++ev.ambiguous;
        if (!ev.witness || m < ev.margin) {
            ev.margin = m;
            ev.witness = pt;
            ev.witness_sides = s.sides;
        }
        if (keep_profile) ev.profile.emplace_back(pt.p.norm(), m);
    }
    ev.certified = ev.vacuous || ev.margin > 0.0;
    if (keep_profile) std::sort(ev.profile.begin(), ev.profile.end());
    return ev;
}

void fill(BoundCertificate& cert, const Evaluation& ev) {
    cert.margin = ev.margin;
    cert.vacuous = ev.vacuous;
    cert.samples = ev.samples;
    cert.sign_ambiguous = ev.ambiguous;
    cert.witness = ev.witness;
    cert.witness_sides = ev.witness_sides;
    cert.profile = ev.profile;
}

}  // namespace

BoundCertificate find_min_L(const EquationModel& model, Clause clause, const ChiSpec& chi, double eta,
                            double K, const FindLOptions& opts) {
    validate_chi(chi);
    if (!(eta > 0.0)) throw ValidationError("find_min_L: eta must be positive");
    if (!(K >= 0.0)) throw ValidationError("find_min_L: K must be nonnegative");
    if (!model.has_partials()) throw ValidationError("find_min_L: model partials are missing");
    if (opts.max_exponent < 0 || opts.max_exponent > 60) {
        throw ValidationError("find_min_L: max_exponent must lie in [0, 60]");
    }

    BoundCertificate cert;
    cert.clause = clause;
    cert.eta = eta;
    cert.nu = opts.nu;
    cert.K = K;
    cert.R = opts.sampler.radius;

    const HypothesisReport hyp = check_hypotheses(model, opts.sampler, 200);
    if (!hyp.f_m_nonpositive || !hyp.f_r_nonnegative || !hyp.elliptic) {
        cert.status = CertStatus::indeterminate;
        cert.message = "hypothesis spot check failed:";
        for (const auto& f : hyp.failures) cert.message += " " + f + ";";
        return cert;
    }

    int first = -1;
    bool monotone = true;
    for (int k = 0; k <= opts.max_exponent; ++k) {
        const double L = std::ldexp(1.0, k);
        const Evaluation ev = evaluate_at(model, clause, chi, eta, K, L, opts.sampler, false);
        cert.probes.emplace_back(L, ev.margin);
        if (ev.certified && first < 0) first = k;
        if (!ev.certified && first >= 0) monotone = false;
    }

    if (first < 0) {
        const double L = std::ldexp(1.0, opts.max_exponent);
        const Evaluation ev = evaluate_at(model, clause, chi, eta, K, L, opts.sampler, true);
        fill(cert, ev);
        cert.L = L;
        cert.status = CertStatus::violated;
        cert.message = "no probe up to L_max is certified";
        return cert;
    }
    if (!monotone) {
        const double L = std::ldexp(1.0, first);
        fill(cert, evaluate_at(model, clause, chi, eta, K, L, opts.sampler, true));
        cert.L = L;
        cert.status = CertStatus::indeterminate;
        cert.message = "margin is not monotone in L over the probe grid";
        return cert;
    }

    double hi = std::ldexp(1.0, first);
    if (first > 0) {
        double lo = std::ldexp(1.0, first - 1);
        for (int it = 0; it < opts.bisection_steps; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (evaluate_at(model, clause, chi, eta, K, mid, opts.sampler, false).certified) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    fill(cert, evaluate_at(model, clause, chi, eta, K, hi, opts.sampler, true));
    cert.L = hi;
    cert.status = CertStatus::certified;
    if (cert.vacuous) cert.message = "constraint set is empty at L; certified vacuously";
    return cert;
}

}  // namespace bernstein
