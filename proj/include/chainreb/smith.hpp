#pragma once

#include "chainreb/caps.hpp"
#include "chainreb/int_matrix.hpp"

#include <vector>

namespace chainreb {

/// Diagonalization A = L^-1 D R^-1 realized as L * A * R = D where L, R are
/// unimodular and D is the diagonal of the invariant factors padded with
/// zeros. Factors are positive and each divides the next.
struct SmithDecomposition {
    std::vector<Int> invariant_factors;
    index_t rank = 0;
    IntMatrix transform_left;
    IntMatrix transform_right;
};

/// Full decomposition with transforms. Pivoting is deterministic: the nonzero
/// entry of minimal absolute value, ties broken by lowest (row, col).
SmithDecomposition smith_normal_form(const IntMatrix& a, const ResourceCaps& caps = {});

/// Invariant factors and rank only; same elimination, no transform tracking.
/// This is the homology workhorse and is considerably lighter on big inputs.
std::vector<Int> invariant_factors(const IntMatrix& a, const ResourceCaps& caps = {});

index_t rank_over_q(const IntMatrix& a, const ResourceCaps& caps = {});

/// Rank of A over the prime field F_p.
index_t rank_mod_p(const IntMatrix& a, std::int64_t p);

} // namespace chainreb
