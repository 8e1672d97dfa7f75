#pragma once

#include "chainreb/caps.hpp"
#include "chainreb/int_matrix.hpp"

namespace chainreb {

/// Square of the product of the nonzero singular values, computed exactly as
/// the sum of the squares of all r x r minors (r = rank). The convention for
/// the zero map is the empty product, so the result is always >= 1.
/// Throws combinatorial_limit_error when the minor count exceeds the cap.
Int pseudo_determinant_squared(const IntMatrix& a, const ResourceCaps& caps = {});

/// Exact determinant of a small dense square matrix (Bareiss fraction-free).
Int determinant(const IntMatrix& a);

} // namespace chainreb
