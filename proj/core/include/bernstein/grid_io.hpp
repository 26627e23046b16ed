// SPDX-License-Identifier: MIT
//
// Grid files: one header line, then one value per line in row-major order.
//
//   dims=2 n=9,9 h=0.25 origin=-1,-1 [t=0.5]
//
// h and origin take one value per axis, or a single value shared by all axes.
#pragma once

#include <iosfwd>
#include <string>

#include "bernstein/grid.hpp"

namespace bernstein {

/// Throws ParseError on a malformed header or value line, ValidationError on a
/// value count mismatch or non-finite value.
GridField read_grid(std::istream& in);
GridField read_grid(const std::string& path);

/// Values are written with 17 significant digits, so reading back is exact.
void write_grid(const GridField& field, std::ostream& out);
void write_grid(const GridField& field, const std::string& path);

}  // namespace bernstein
