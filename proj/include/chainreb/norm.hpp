#pragma once

#include "chainreb/caps.hpp"
#include "chainreb/int_matrix.hpp"

namespace chainreb {

/// Certified enclosure of the l2 -> l2 operator norm. The true norm always
/// lies in [lower, upper]; `converged` says whether the interval met the
/// requested relative tolerance. The lower bound comes from an exact Rayleigh
/// quotient of an explicit integer vector, the upper bound from
/// sqrt(|A|_1 |A|_inf) sharpened by exact Gram-power root bounds.
struct NormEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double tolerance = 0.0;
    bool converged = false;
};

NormEstimate operator_norm(const IntMatrix& a, double tol = 1e-2, const ResourceCaps& caps = {});

/// Directed-rounding square roots of an exact nonnegative rational: the
/// returned double d satisfies d*d <= x (lower) or d*d >= x (upper), checked
/// in exact arithmetic.
double sqrt_lower(const Rat& x);
double sqrt_upper(const Rat& x);

} // namespace chainreb
