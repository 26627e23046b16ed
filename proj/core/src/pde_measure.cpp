// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cmath>

#include "bernstein/error.hpp"
#include "bernstein/pde.hpp"

namespace bernstein {

std::vector<GridField> gradient_field(const GridField& field) {
    field.validate();
    std::vector<GridField> out(static_cast<std::size_t>(field.dims()), field);
    const auto& n = field.n();
    const auto& h = field.h();
    for (int a = 0; a < field.dims(); ++a) {
        GridField& g = out[static_cast<std::size_t>(a)];
        for (std::size_t k = 0; k < field.size(); ++k) {
            auto ij = field.unflatten(k);
            const int i = ij[static_cast<std::size_t>(a)];
            auto at = [&](int shift) {
                auto c = ij;
                c[static_cast<std::size_t>(a)] = i + shift;
                return field[field.index(c[0], c[1])];
            };
            if (i == 0) {
                g[k] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h[a]);
            } else if (i == n[a] - 1) {
                g[k] = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h[a]);
            } else {
                g[k] = (at(1) - at(-1)) / (2.0 * h[a]);
            }
        }
    }
    return out;
}

double measure_sup_grad(const GridField& field, const Ball& ball) {
    if (ball.center.size() != field.dims()) throw ValidationError("measure: ball dimension mismatch");
    if (!(ball.radius >= 0.0)) throw ValidationError("measure: radius must be nonnegative");
    const Vec lo = field.coord(0);
    const Vec hi = field.upper();
    for (int a = 0; a < field.dims(); ++a) {
        const double h = field.h()[a];
        if (ball.center(a) - ball.radius < lo(a) + h * (1.0 - 1e-9) ||
            ball.center(a) + ball.radius > hi(a) - h * (1.0 - 1e-9)) {
            throw ValidationError("measure: ball touches the grid boundary");
        }
    }
    const auto grad = gradient_field(field);
    double sup = 0.0;
    for (std::size_t k = 0; k < field.size(); ++k) {
        if ((field.coord(k) - ball.center).norm() > ball.radius * (1.0 + 1e-12)) continue;
        double s = 0.0;
        for (const auto& g : grad) s += g[k] * g[k];
        sup = std::max(sup, std::sqrt(s));
    }
    return sup;
}

}  // namespace bernstein
