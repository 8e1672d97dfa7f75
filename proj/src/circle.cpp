#include "chainreb/circle.hpp"

#include <cmath>

namespace chainreb {

ChainComplex circle_complex(index_t n) {
    if (n < 1) throw shape_error("circle cover needs at least one cell");
    IntMatrix d1(n, n);
    for (index_t j = 0; j < n; ++j) {
        d1.add_at((j + 1) % n, j, Int(1));
        d1.add_at(j, j, Int(-1));
    }
    return ChainComplex({n, n}, {std::move(d1)});
}

CirclePartition choose_partition(index_t n, double T) {
    if (T < 1.0) throw shape_error("partition scale T must be >= 1");
    if (static_cast<double>(n) < 4.0 * T) throw shape_error("partition needs N >= 4T");
    CirclePartition p;
    p.n = n;
    p.T = T;
    const index_t m = static_cast<index_t>(std::ceil(static_cast<double>(n) / T));
    const index_t lo = n / m, rem = n % m; // rem gaps of size lo+1, then m-rem of size lo
    p.breakpoints.push_back(0);
    for (index_t i = 0; i < m; ++i) {
        index_t gap = (i < rem) ? lo + 1 : lo;
        p.breakpoints.push_back(p.breakpoints.back() + gap);
    }
    for (index_t i = 0; i < m; ++i) {
        double gap = static_cast<double>(p.breakpoints[static_cast<std::size_t>(i + 1)] -
                                         p.breakpoints[static_cast<std::size_t>(i)]);
        if (gap < T / 2.0 || gap > T) throw shape_error("partition gaps escaped [T/2, T]");
    }
    return p;
}

namespace {

// Index of the partition segment containing j: a_i <= j < a_{i+1}.
index_t segment_of(const CirclePartition& p, index_t j) {
    index_t lo = 0, hi = p.segments() - 1;
    while (lo < hi) {
        index_t mid = (lo + hi + 1) / 2;
        if (p.breakpoints[static_cast<std::size_t>(mid)] <= j)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

} // namespace

Rebuilding circle_rebuilding(const CirclePartition& p) {
    const index_t n = p.n;
    const index_t m = p.segments();
    Rebuilding r;
    r.alpha = 1;
    r.source = circle_complex(n);
    r.target = circle_complex(m);

    IntMatrix g0(m, n), g1(m, n), h0(n, m), h1(n, m), rho0(n, n);
    for (index_t j = 0; j < n; ++j) {
        index_t i = segment_of(p, j);
        index_t a_i = p.breakpoints[static_cast<std::size_t>(i)];
        if (j == a_i) {
            g0.set(i, j, 1);
            g1.set(i, j, 1);
        } else {
            g0.set((i + 1) % m, j, 1);
            // the run of edges from v_j up to the next breakpoint
            index_t next = p.breakpoints[static_cast<std::size_t>(i + 1)];
            for (index_t jj = j; jj < next; ++jj) rho0.set(jj % n, j, 1);
        }
    }
    for (index_t i = 0; i < m; ++i) {
        index_t a_i = p.breakpoints[static_cast<std::size_t>(i)];
        index_t a_next = p.breakpoints[static_cast<std::size_t>(i + 1)];
        h0.set(a_i % n, i, 1);
        for (index_t j = a_i; j < a_next; ++j) h1.set(j % n, i, 1);
    }
    r.g = GradedMap(0, {std::move(g0), std::move(g1)});
    r.h = GradedMap(0, {std::move(h0), std::move(h1)});
    r.rho = GradedMap(1, {std::move(rho0)});
    if (!verify(r).empty()) throw shape_error("circle rebuilding failed its own identities");
    return r;
}

Rebuilding circle_rebuilding(index_t n, double T) { return circle_rebuilding(choose_partition(n, T)); }

CoverLiftData lift_circle_rebuilding(const CirclePartition& p, index_t sheets) {
    if (sheets < 1) throw shape_error("cover must have at least one sheet");
    CirclePartition lifted;
    lifted.n = p.n * sheets;
    lifted.T = p.T;
    lifted.breakpoints.push_back(0);
    for (index_t s = 0; s < sheets; ++s)
        for (index_t i = 1; i <= p.segments(); ++i)
            lifted.breakpoints.push_back(s * p.n + p.breakpoints[static_cast<std::size_t>(i)]);
    Rebuilding up = circle_rebuilding(lifted);
    CoverLiftData data;
    data.sheets = sheets;
    data.source_cover = up.source;
    data.target_cover = up.target;
    data.g = up.g;
    data.h = up.h;
    data.rho = up.rho;
    return data;
}

} // namespace chainreb
