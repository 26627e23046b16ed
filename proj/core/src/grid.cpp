// SPDX-License-Identifier: MIT
#include "bernstein/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bernstein/error.hpp"

namespace bernstein {

GridField::GridField(int dims, std::array<int, 2> n, std::array<double, 2> h, std::array<double, 2> origin)
    : dims_(dims), n_(n), h_(h), origin_(origin) {
    if (dims != 1 && dims != 2) throw ValidationError("grid: dims must be 1 or 2");
    if (dims == 1) {
        n_[1] = 1;
        h_[1] = 1.0;
        origin_[1] = 0.0;
    }
    for (int a = 0; a < dims; ++a) {
        if (n_[a] < 9) throw ValidationError("grid: at least 9 nodes per axis are required");
        if (!(h_[a] > 0.0) || !std::isfinite(h_[a])) throw ValidationError("grid: spacing must be positive");
        if (!std::isfinite(origin_[a])) throw ValidationError("grid: origin must be finite");
    }
    values_.assign(static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]), 0.0);
}

GridField GridField::box(int dims, int n, double lo, double hi) {
    if (!(hi > lo)) throw ValidationError("grid: empty box");
    if (n < 2) throw ValidationError("grid: at least 9 nodes per axis are required");
    const double h = (hi - lo) / (n - 1);
    return GridField(dims, {n, n}, {h, h}, {lo, lo});
}

double GridField::max_h() const noexcept { return dims_ == 2 ? std::max(h_[0], h_[1]) : h_[0]; }

std::array<int, 2> GridField::unflatten(std::size_t k) const noexcept {
    if (dims_ == 1) return {static_cast<int>(k), 0};
    const auto n1 = static_cast<std::size_t>(n_[1]);
    return {static_cast<int>(k / n1), static_cast<int>(k % n1)};
}

Vec GridField::coord(int i, int j) const {
    Vec x(dims_);
    x(0) = origin_[0] + i * h_[0];
    if (dims_ == 2) x(1) = origin_[1] + j * h_[1];
    return x;
}

Vec GridField::coord(std::size_t k) const {
    const auto ij = unflatten(k);
    return coord(ij[0], ij[1]);
}

Vec GridField::upper() const { return coord(n_[0] - 1, dims_ == 2 ? n_[1] - 1 : 0); }

void GridField::fill(const std::function<double(const Vec&)>& f) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] = f(coord(k));
}

void GridField::validate() const {
    const std::size_t expect = static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
    if (values_.size() != expect) {
        throw ValidationError("grid: expected " + std::to_string(expect) + " values, have " +
                              std::to_string(values_.size()));
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            throw ValidationError("grid: non-finite value at index " + std::to_string(k));
        }
    }
}

}  // namespace bernstein
