// SPDX-License-Identifier: MIT
#include "bernstein/equation.hpp"

#include <cmath>

#include "bernstein/error.hpp"

namespace bernstein {

ScalarField ScalarField::constant(double c, int dim) {
    return {[c](const Vec&) { return c; }, [dim](const Vec&) { return Vec::Zero(dim); }};
}

MatrixField MatrixField::identity(int dim) {
    return {[dim](const Vec&) { return Mat::Identity(dim, dim); },
            [dim](const Vec&) { return std::vector<Mat>(dim, Mat::Zero(dim, dim)); }};
}

namespace {

// |p|^m and its gradient m |p|^(m-2) p, continuous at p = 0 for m > 1.
double power_norm(const Vec& p, double m) { return std::pow(p.norm(), m); }

Vec power_norm_grad(const Vec& p, double m) {
    const double n = p.norm();
    if (n == 0.0) return Vec::Zero(p.size());
    return m * std::pow(n, m - 2.0) * p;
}

Mat diffusion_of(const MatrixField& sigma, const Vec& x) {
    const Mat s = sigma.value(x);
    return s * s.transpose();
}

// d_k A = d_k sigma sigma^T + sigma d_k sigma^T
std::vector<Mat> diffusion_partials(const MatrixField& sigma, const Vec& x) {
    const Mat s = sigma.value(x);
    std::vector<Mat> ds = sigma.partials(x);
    for (auto& d : ds) d = d * s.transpose() + s * d.transpose();
    return ds;
}

void check_dim(const char* what, int dim) {
    if (dim < 1) throw ValidationError(std::string(what) + ": dimension must be >= 1");
}

}  // namespace

double estimate_lip_M(const MatrixField& sigma, const Vec& center, double radius) {
    const int d = static_cast<int>(center.size());
    double best = diffusion_of(sigma, center).norm();
    // Deterministic rings of points; enough for the smooth coefficients used here.
    for (int ring = 1; ring <= 8; ++ring) {
        const double r = radius * ring / 8.0;
        for (int k = 0; k < 32; ++k) {
            Vec x = center;
            if (d == 1) {
                x(0) += (k % 2 == 0 ? r : -r);
            } else {
                const double th = 2.0 * M_PI * k / 32.0;
                x(0) += r * std::cos(th);
                x(1) += r * std::sin(th);
            }
            best = std::max(best, diffusion_of(sigma, x).norm());
        }
    }
    return best;
}

EquationModel make_power_model(int dim, double m, ScalarField f, std::optional<MatrixField> sigma,
                               double lip_M) {
    check_dim("power model", dim);
    if (!(m >= 1.0)) throw ValidationError("power model: exponent m must be >= 1");
    const bool identity = !sigma.has_value();
    const MatrixField sig = identity ? MatrixField::identity(dim) : *sigma;

    EquationModel model;
    model.name = identity ? "eq2" : "eq4";
    model.dim = dim;
    model.eval = [=](const Vec& x, double, const Vec& p, const Mat& M) {
        const double tr = identity ? M.trace() : frob_dot(diffusion_of(sig, x), M);
        return -tr + power_norm(p, m) - f.value(x);
    };
    model.d_x = [=](const Vec& x, double, const Vec&, const Mat& M) {
        Vec g = -f.grad(x);
        if (!identity) {
            const auto dA = diffusion_partials(sig, x);
            for (int k = 0; k < dim; ++k) g(k) -= frob_dot(dA[k], M);
        }
        return g;
    };
    model.d_r = [](const Vec&, double, const Vec&, const Mat&) { return 0.0; };
    model.d_p = [=](const Vec&, double, const Vec& p, const Mat&) { return power_norm_grad(p, m); };
    model.d_M = [=](const Vec& x, double, const Vec&, const Mat&) -> Mat {
        return identity ? Mat(-Mat::Identity(dim, dim)) : Mat(-diffusion_of(sig, x));
    };
    if (lip_M > 0.0) {
        model.lip_M = lip_M;
    } else if (identity) {
        model.lip_M = std::sqrt(static_cast<double>(dim));
    } else {
        throw ValidationError("power model: lip_M must be supplied for a variable diffusion");
    }
    TraceForm tf;
    tf.diffusion = [=](const Vec& x) -> Mat {
        return identity ? Mat(Mat::Identity(dim, dim)) : diffusion_of(sig, x);
    };
    tf.lower_order = [=](const Vec& x, double, const Vec& p) { return power_norm(p, m) - f.value(x); };
    tf.constant_diffusion = identity;
    model.trace_form = tf;
    return model;
}

EquationModel make_hamiltonian_model(int dim, std::function<double(const Vec&)> hamiltonian,
                                     std::function<Vec(const Vec&)> hamiltonian_grad,
                                     ScalarField f) {
    check_dim("hamiltonian model", dim);
    if (!hamiltonian || !hamiltonian_grad) {
        throw ValidationError("hamiltonian model: H and its gradient are required");
    }
    EquationModel model;
    model.name = "generic-H";
    model.dim = dim;
    model.eval = [=](const Vec& x, double, const Vec& p, const Mat& M) {
        return -M.trace() + hamiltonian(p) - f.value(x);
    };
    model.d_x = [=](const Vec& x, double, const Vec&, const Mat&) -> Vec { return -f.grad(x); };
    model.d_r = [](const Vec&, double, const Vec&, const Mat&) { return 0.0; };
    model.d_p = [=](const Vec&, double, const Vec& p, const Mat&) { return hamiltonian_grad(p); };
    model.d_M = [dim](const Vec&, double, const Vec&, const Mat&) -> Mat {
        return -Mat::Identity(dim, dim);
    };
    model.lip_M = std::sqrt(static_cast<double>(dim));
    TraceForm tf;
    tf.diffusion = [dim](const Vec&) -> Mat { return Mat::Identity(dim, dim); };
    tf.lower_order = [=](const Vec& x, double, const Vec& p) { return hamiltonian(p) - f.value(x); };
    model.trace_form = tf;
    return model;
}

EquationModel exp_change_of_variable(const ExpChangeSpec& spec) {
    if (!(spec.v_min >= 0.0)) {
        throw ValidationError("exp change of variable: v_min < 0 means u < 1 on the ball");
    }
    if (!(spec.v_max >= spec.v_min)) throw ValidationError("exp change of variable: empty v range");
    if (!(spec.m > 1.0)) throw ValidationError("exp change of variable: m must be > 1");
    if (!spec.sigma.value || !spec.sigma.partials || !spec.f.value || !spec.f.grad) {
        throw ValidationError("exp change of variable: sigma and f callbacks (with derivatives) are required");
    }
    const double m = spec.m;
    const ScalarField f = spec.f;
    const MatrixField sig = spec.sigma;
    const double drift = spec.drift == DriftSign::printed ? 1.0 : -1.0;
    const int dim = spec.dim;
    check_dim("exp change of variable", dim);

    EquationModel model;
    model.name = "eq4-exp";
    model.dim = dim;
    model.eval = [=](const Vec& x, double v, const Vec& p, const Mat& M) {
        const Mat A = diffusion_of(sig, x);
        return -frob_dot(A, M) + drift * p.dot(A * p) + std::exp((m - 1.0) * v) * power_norm(p, m) -
               std::exp(-v) * f.value(x);
    };
    model.d_r = [=](const Vec& x, double v, const Vec& p, const Mat&) {
        return (m - 1.0) * std::exp((m - 1.0) * v) * power_norm(p, m) + std::exp(-v) * f.value(x);
    };
    model.d_x = [=](const Vec& x, double v, const Vec& p, const Mat& M) {
        const auto dA = diffusion_partials(sig, x);
        Vec g = -std::exp(-v) * f.grad(x);
        for (int k = 0; k < dim; ++k) g(k) += -frob_dot(dA[k], M) + drift * p.dot(dA[k] * p);
        return g;
    };
    model.d_p = [=](const Vec& x, double v, const Vec& p, const Mat&) {
        const Mat A = diffusion_of(sig, x);
        return Vec(2.0 * drift * (A * p) + std::exp((m - 1.0) * v) * power_norm_grad(p, m));
    };
    model.d_M = [=](const Vec& x, double, const Vec&, const Mat&) -> Mat { return -diffusion_of(sig, x); };
    if (spec.lip_M > 0.0) {
        model.lip_M = spec.lip_M;
    } else {
        model.lip_M = estimate_lip_M(sig, Vec::Zero(dim), 1.0);
    }
    TraceForm tf;
    tf.diffusion = [=](const Vec& x) { return diffusion_of(sig, x); };
    tf.lower_order = [=](const Vec& x, double v, const Vec& p) {
        const Mat A = diffusion_of(sig, x);
        return drift * p.dot(A * p) + std::exp((m - 1.0) * v) * power_norm(p, m) -
               std::exp(-v) * f.value(x);
    };
    tf.constant_diffusion = false;
    model.trace_form = tf;
    return model;
}

CrossTermBound cross_term_bound(const MatrixField& sigma, const Vec& x, const Vec& p, const Mat& M,
                                double eta) {
    const auto dA = diffusion_partials(sigma, x);
    const auto ds = sigma.partials(x);
    const Mat s = sigma.value(x);
    Mat ax_p = Mat::Zero(M.rows(), M.cols());
    Mat sigma_p = Mat::Zero(s.rows(), s.cols());
    for (std::size_t k = 0; k < dA.size(); ++k) {
        ax_p += p(static_cast<Eigen::Index>(k)) * dA[k];
        sigma_p += p(static_cast<Eigen::Index>(k)) * ds[k];
    }
    const Mat A = s * s.transpose();
    CrossTermBound out;
    out.cross = std::abs(frob_dot(ax_p, M));
    out.bound = frob_dot(A, M * M) / (1.0 + eta) + (1.0 + eta) * sigma_p.squaredNorm();
    return out;
}

}  // namespace bernstein
