// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace bernstein {

/// Sobol points in [0,1)^dims with a seeded digital shift.
/// The same (dims, seed) always yields the same sequence.
class QuasiRandom {
public:
    QuasiRandom(int dims, std::uint64_t seed);
    ~QuasiRandom();
    QuasiRandom(QuasiRandom&&) noexcept;
    QuasiRandom& operator=(QuasiRandom&&) noexcept;

    int dims() const noexcept { return dims_; }
    /// Next point; coordinates lie strictly inside (0,1).
    const std::vector<double>& next();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int dims_;
    std::vector<double> point_;
};

}  // namespace bernstein
