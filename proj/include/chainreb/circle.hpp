#pragma once

#include "chainreb/rebuild.hpp"

#include <vector>

namespace chainreb {

/// Breakpoints 0 = a_0 < a_1 < ... < a_m = N with every gap in [T/2, T].
struct CirclePartition {
    index_t n = 1;
    double T = 1.0;
    std::vector<index_t> breakpoints;

    index_t segments() const { return static_cast<index_t>(breakpoints.size()) - 1; }
};

/// Cycle graph on N vertices: dims [N, N], d(e_j) = v_{j+1 mod N} - v_j; for
/// N = 1 the single edge is a loop with zero boundary.
ChainComplex circle_complex(index_t n);

/// m = ceil(N/T) segments, gap sizes the balanced pair {floor(N/m),
/// ceil(N/m)} with the larger gaps first. Requires N >= 4T.
CirclePartition choose_partition(index_t n, double T);

/// The compression of the N-cycle onto the m-cycle determined by a
/// partition. Every returned value passes verify().
Rebuilding circle_rebuilding(const CirclePartition& p);
Rebuilding circle_rebuilding(index_t n, double T);

/// Lift of a circle rebuilding to the k-sheeted cover: the partition is
/// replicated in each sheet, giving covers of both sides and lifted maps.
CoverLiftData lift_circle_rebuilding(const CirclePartition& p, index_t sheets);

} // namespace chainreb
