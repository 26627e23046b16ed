// SPDX-License-Identifier: MIT
#include "bernstein/quasi_random.hpp"

#include <random>

#include <boost/random/sobol.hpp>

#include "bernstein/error.hpp"

namespace bernstein {

struct QuasiRandom::Impl {
    boost::random::sobol engine;
    std::vector<std::uint64_t> shift;

    explicit Impl(int dims) : engine(static_cast<std::size_t>(dims)) {}
};

QuasiRandom::QuasiRandom(int dims, std::uint64_t seed) : dims_(dims) {
    if (dims < 1) throw ValidationError("quasi-random: dimension must be >= 1");
    impl_ = std::make_unique<Impl>(dims);
    std::mt19937_64 rng(seed);
    impl_->shift.resize(static_cast<std::size_t>(dims));
    for (auto& s : impl_->shift) s = rng() >> 11;
    // The first Sobol point is the origin; skip it.
    impl_->engine.discard(static_cast<std::uintmax_t>(dims));
    point_.resize(static_cast<std::size_t>(dims));
}

QuasiRandom::~QuasiRandom() = default;
QuasiRandom::QuasiRandom(QuasiRandom&&) noexcept = default;
QuasiRandom& QuasiRandom::operator=(QuasiRandom&&) noexcept = default;

const std::vector<double>& QuasiRandom::next() {
    constexpr double scale = 0x1p-53;
    for (std::size_t k = 0; k < point_.size(); ++k) {
        const std::uint64_t v = (static_cast<std::uint64_t>(impl_->engine()) >> 11) ^ impl_->shift[k];
        point_[k] = (static_cast<double>(v) + 0.5) * scale;
    }
    return point_;
}

}  // namespace bernstein
