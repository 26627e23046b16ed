// SPDX-License-Identifier: MIT
#include "bernstein/doubling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "bernstein/error.hpp"

namespace bernstein {

namespace {

struct XNode {
    std::size_t index;
    Vec coord;
    double c;
    double u;
};

struct YBlock {
    Vec lo;
    Vec hi;
    double min_u;
    std::vector<std::size_t> nodes;
};

struct Candidate {
    bool found = false;
    double value = -std::numeric_limits<double>::infinity();
    std::size_t xi = 0;
    std::size_t yi = 0;
    std::size_t evaluated = 0;

    // Larger value wins; equal values go to the smaller (x, y) index pair.
    bool better(double v, std::size_t x, std::size_t y) const {
        if (!found) return true;
        if (v != value) return v > value;
        return x < xi || (x == xi && y < yi);
    }
    void offer(double v, std::size_t x, std::size_t y) {
        if (better(v, x, y)) {
            found = true;
            value = v;
            xi = x;
            yi = y;
        }
    }
};

// Distance from x to the axis-aligned box [lo, hi].
double box_distance(const Vec& x, const Vec& lo, const Vec& hi) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double d = std::max({lo(k) - x(k), 0.0, x(k) - hi(k)});
        s += d * d;
    }
    return std::sqrt(s);
}

class Coupling {
public:
    Coupling(const CouplingParams& params, double osc) : params_(params), osc_(osc) {
        if (params.kind == CouplingKind::profile) {
            if (params.phi == nullptr) throw ValidationError("coupling: profile kind needs a phi profile");
            t_end_ = params.phi->table().t_end();
        }
    }

    // Admissible t: L C(x)(|x-y| + alpha) < 1 (and inside the phi table), or <= osc.
    bool admissible(double t) const {
        if (params_.kind == CouplingKind::profile) return t < t_end_;
        return t <= osc_;
    }

    double phi(double t) const {
        return params_.kind == CouplingKind::profile ? params_.phi->eval(t).value : t;
    }

private:
    const CouplingParams& params_;
    double osc_;
    double t_end_ = 1.0;
};

}  // namespace

PairMaximum maximize_pairs(const GridField& field, const LocalizationProfile& loc,
                           const CouplingParams& params) {
    field.validate();
    if (loc.dim() != field.dims()) throw ValidationError("maximize_pairs: localization dimension mismatch");
    if (!(params.L > 0.0)) throw ValidationError("maximize_pairs: L must be positive");
    if (!(params.alpha_dbl >= 0.0)) throw ValidationError("maximize_pairs: alpha must be nonnegative");
    const Vec& x0 = loc.center();
    const double R = loc.radius();
    if (field.max_h() > R / 16.0 * (1.0 + 1e-12)) {
        throw ValidationError("maximize_pairs: grid spacing must be at most R/16");
    }
    const Vec lo = field.coord(0);
    const Vec hi = field.upper();
    for (int a = 0; a < field.dims(); ++a) {
        if (x0(a) - R < lo(a) - 1e-12 * R || x0(a) + R > hi(a) + 1e-12 * R) {
            throw ValidationError("maximize_pairs: grid does not cover B(x0, R)");
        }
    }

    const double x_radius = std::min(0.75 * R, loc.admissible_radius());
    std::vector<XNode> xs;
    std::vector<std::size_t> ys;
    double umin = std::numeric_limits<double>::infinity();
    double umax = -umin;
    for (std::size_t k = 0; k < field.size(); ++k) {
        const Vec c = field.coord(k);
        const double r = (c - x0).norm();
        if (r < R) {
            ys.push_back(k);
            umin = std::min(umin, field[k]);
            umax = std::max(umax, field[k]);
        }
        if (r < x_radius) xs.push_back({k, c, params.flat ? 1.0 : loc.value(c), field[k]});
    }
    PairMaximum out;
    out.osc = ys.empty() ? 0.0 : umax - umin;
    out.diag_tol = 1.5 * field.max_h();
    const Coupling coupling(params, out.osc);

    // y nodes grouped by grid tiles for pruning.
    const int tile = field.dims() == 1 ? 16 : 8;
    std::vector<YBlock> blocks;
    {
        const auto n1 = field.dims() == 2 ? field.n()[1] : 1;
        const int tiles1 = (n1 + tile - 1) / tile;
        std::vector<int> block_of(static_cast<std::size_t>(((field.n()[0] + tile - 1) / tile) * tiles1), -1);
        for (std::size_t k : ys) {
            const auto ij = field.unflatten(k);
            const int b = (ij[0] / tile) * tiles1 + (field.dims() == 2 ? ij[1] / tile : 0);
            int& slot = block_of[static_cast<std::size_t>(b)];
            const Vec c = field.coord(k);
            if (slot < 0) {
                slot = static_cast<int>(blocks.size());
                blocks.push_back({c, c, field[k], {}});
            }
            YBlock& blk = blocks[static_cast<std::size_t>(slot)];
            blk.lo = blk.lo.cwiseMin(c);
            blk.hi = blk.hi.cwiseMax(c);
            blk.min_u = std::min(blk.min_u, field[k]);
            blk.nodes.push_back(k);
        }
    }
    std::vector<Vec> ycoord(field.size());
    for (std::size_t k : ys) ycoord[k] = field.coord(k);

    const double L = params.L;
    const double alpha = params.alpha_dbl;
    auto scan = [&](std::size_t begin, std::size_t end, Candidate& best) {
        for (std::size_t a = begin; a < end; ++a) {
            const XNode& xn = xs[a];
            const double lc = L * xn.c;
            for (const YBlock& blk : blocks) {
                const double t_low = lc * (box_distance(xn.coord, blk.lo, blk.hi) + alpha);
                if (!coupling.admissible(t_low)) continue;
                if (params.prune && best.found) {
                    const double bound = xn.u - blk.min_u - coupling.phi(t_low);
                    if (bound < best.value - 1e-12 * (1.0 + std::abs(best.value))) continue;
                }
                for (std::size_t yk : blk.nodes) {
                    const double t = lc * ((xn.coord - ycoord[yk]).norm() + alpha);
                    if (!coupling.admissible(t)) continue;
                    ++best.evaluated;
                    best.offer(xn.u - field[yk] - coupling.phi(t), xn.index, yk);
                }
            }
        }
    };

    const int threads = std::max(1, std::min<int>(params.threads, static_cast<int>(xs.size())));
    std::vector<Candidate> partial(static_cast<std::size_t>(std::max(threads, 1)));
    if (threads <= 1) {
        scan(0, xs.size(), partial[0]);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (xs.size() + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
        for (int w = 0; w < threads; ++w) {
            const std::size_t b = std::min(xs.size(), static_cast<std::size_t>(w) * chunk);
            const std::size_t e = std::min(xs.size(), b + chunk);
            pool.emplace_back([&, b, e, w] { scan(b, e, partial[static_cast<std::size_t>(w)]); });
        }
    }
    Candidate best;
    for (const auto& c : partial) {
        best.evaluated += c.evaluated;
        if (c.found) best.offer(c.value, c.xi, c.yi);
    }
    out.pairs_evaluated = best.evaluated;
    if (!best.found) {
        out.found = false;
        out.on_diagonal = true;
        return out;
    }

    out.found = true;
    out.x_index = best.xi;
    out.y_index = best.yi;
    out.x = field.coord(best.xi);
    out.y = field.coord(best.yi);
    out.value = best.value;
    const double dist = (out.x - out.y).norm();
    out.on_diagonal = dist <= out.diag_tol;
    if (out.on_diagonal && best.xi != best.yi) {
        // A pair within diag_tol is diagonal only if no x = y pair does worse; otherwise a
        // jump between neighbouring nodes would pass for a diagonal maximum.
        double diag_best = -std::numeric_limits<double>::infinity();
        for (const XNode& xn : xs) {
            const double t = L * xn.c * alpha;
            if (coupling.admissible(t)) diag_best = std::max(diag_best, -coupling.phi(t));
        }
        if (best.value > diag_best + 1e-12 * (1.0 + std::abs(diag_best))) out.on_diagonal = false;
    }

    const int d = field.dims();
    LocalizationSample cs;
    if (params.flat) {
        cs.value = 1.0;
        cs.grad = Vec::Zero(d);
        cs.hess = Mat::Zero(d, d);
    } else {
        cs = loc.eval(out.x);
    }
    const double gap = dist + alpha;
    out.c_x = cs.value;
    out.t = L * cs.value * gap;
    double d1 = 1.0;
    double d2 = 0.0;
    if (params.kind == CouplingKind::profile) {
        const ProfileSample ph = params.phi->eval(out.t);
        d1 = ph.d1;
        d2 = ph.d2;
    }
    const double lc = L * cs.value;
    const double gnorm = cs.grad.norm();
    out.p = gap > 0.0 ? Vec(d1 * lc * (out.x - out.y) / gap) : Vec(Vec::Zero(d));
    out.q = d1 * L * gap * cs.grad;
    out.gamma1 = gap > 0.0 ? d1 * lc / gap + d2 * lc * lc : std::numeric_limits<double>::infinity();
    out.gamma2 = d1 * L * gnorm + d2 * L * L * gnorm * cs.value * gap;
    out.gamma3 = d1 * cs.hess.norm() / cs.value * out.t +
                 d2 * gnorm * gnorm / (cs.value * cs.value) * out.t * out.t;
    return out;
}

ExtractResult extract_lipschitz(const GridField& field, const LocalizationProfile& loc,
                                const ExtractOptions& opts) {
    if (opts.alpha_factors.empty()) throw ValidationError("extract: alpha schedule is empty");
    if (!(opts.rel_tol > 0.0)) throw ValidationError("extract: rel_tol must be positive");
    if (!(opts.l_max >= 1.0)) throw ValidationError("extract: l_max must be >= 1");
    const double R = loc.radius();

    ExtractResult res;
    res.center = loc.center();
    res.ball_radius = 0.25 * R;

    auto diagonal_at = [&](double L) {
        CouplingParams cp;
        cp.kind = opts.kind;
        cp.phi = opts.phi;
        cp.L = L;
        cp.flat = opts.flat;
        cp.threads = opts.threads;
        for (double f : opts.alpha_factors) {
            cp.alpha_dbl = f * R / L;
            const PairMaximum pm = maximize_pairs(field, loc, cp);
            res.trace.push_back({L, cp.alpha_dbl, pm.found ? pm.value : 0.0, pm.on_diagonal});
            if (!pm.on_diagonal) return false;
        }
        return true;
    };

    // Bracket [lo, hi] with lo failing and hi passing.
    double lo = 0.0;
    double hi = 1.0;
    if (diagonal_at(1.0)) {
        lo = 0.5;
        while (diagonal_at(lo)) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-9) {
                res.bounded = true;
                res.l_star = hi;
                res.message = "diagonal for every L tried down to 1e-9";
                for (double f : opts.alpha_factors) res.schedule.push_back(f * R / hi);
                return res;
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while (!diagonal_at(hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi > opts.l_max) {
                res.bounded = false;
                res.l_star = std::numeric_limits<double>::infinity();
                res.message = "off-diagonal maximum persists up to L_max: gradient appears unbounded";
                return res;
            }
        }
    }
    while (hi - lo > opts.rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (diagonal_at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    res.bounded = true;
    res.l_star = hi;
    for (double f : opts.alpha_factors) res.schedule.push_back(f * R / hi);
    return res;
}

}  // namespace bernstein
