// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>

namespace bernstein {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Frobenius inner product Tr(A B) for symmetric arguments.
inline double frob_dot(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace bernstein
