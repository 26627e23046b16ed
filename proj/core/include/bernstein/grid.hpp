// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "bernstein/linalg.hpp"

namespace bernstein {

/// Uniform grid with values stored row-major: index = i * n[1] + j in 2D.
class GridField {
public:
    GridField() = default;
    /// Zero-filled grid; throws ValidationError unless dims is 1 or 2, n >= 9 and h > 0.
    GridField(int dims, std::array<int, 2> n, std::array<double, 2> h, std::array<double, 2> origin);

    /// Grid of n nodes per axis spanning [lo, hi] on every axis.
    static GridField box(int dims, int n, double lo, double hi);

    int dims() const noexcept { return dims_; }
    const std::array<int, 2>& n() const noexcept { return n_; }
    const std::array<double, 2>& h() const noexcept { return h_; }
    const std::array<double, 2>& origin() const noexcept { return origin_; }
    double max_h() const noexcept;
    std::size_t size() const noexcept { return values_.size(); }

    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }

    std::size_t index(int i, int j = 0) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(dims_ == 2 ? n_[1] : 1) +
               static_cast<std::size_t>(j);
    }
    /// Axis indices of a flat index.
    std::array<int, 2> unflatten(std::size_t k) const noexcept;
    Vec coord(std::size_t k) const;
    Vec coord(int i, int j) const;
    /// Upper corner of the grid box.
    Vec upper() const;

    /// Fill values from f(x).
    void fill(const std::function<double(const Vec&)>& f);

    std::optional<double> time;

    /// Throws ValidationError on non-finite values or a size mismatch.
    void validate() const;

private:
    int dims_ = 1;
    std::array<int, 2> n_{9, 1};
    std::array<double, 2> h_{1.0, 1.0};
    std::array<double, 2> origin_{0.0, 0.0};
    std::vector<double> values_;
};

}  // namespace bernstein
