#include "chainreb/pseudodet.hpp"

#include "chainreb/smith.hpp"

#include <vector>

namespace chainreb {

namespace {

// Bareiss on a dense copy; exact and division-free in effect.
Int dense_det(std::vector<std::vector<Int>> m) {
    const std::size_t n = m.size();
    if (n == 0) return Int(1);
    Int prev(1);
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return Int(0);
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : Int(-m[n - 1][n - 1]);
}

Int binomial(index_t n, index_t k) {
    if (k < 0 || k > n) return Int(0);
    Int out(1);
    for (index_t i = 0; i < k; ++i) {
        out *= (n - i);
        out /= (i + 1);
    }
    return out;
}

// Lexicographic k-subsets of {0..n-1}.
bool next_subset(std::vector<index_t>& s, index_t n) {
    const index_t k = static_cast<index_t>(s.size());
    index_t i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++s[static_cast<std::size_t>(i)];
    for (index_t j = i + 1; j < k; ++j)
        s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

} // namespace

Int determinant(const IntMatrix& a) {
    if (a.rows() != a.cols()) throw shape_error("determinant needs a square matrix");
    std::vector<std::vector<Int>> m(static_cast<std::size_t>(a.rows()),
                                    std::vector<Int>(static_cast<std::size_t>(a.cols()), Int(0)));
    for (index_t r = 0; r < a.rows(); ++r)
        for (const auto& [c, v] : a.row(r)) m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = v;
    return dense_det(std::move(m));
}

Int pseudo_determinant_squared(const IntMatrix& a, const ResourceCaps& caps) {
    const index_t r = rank_over_q(a, caps);
    if (r == 0) return Int(1);
    Int count = binomial(a.rows(), r) * binomial(a.cols(), r);
    if (count > Int(caps.max_minor_count))
        throw combinatorial_limit_error("too many maximal minors to enumerate");

    std::vector<index_t> rows_sel(static_cast<std::size_t>(r)), cols_sel(static_cast<std::size_t>(r));
    Int total(0);
    for (index_t i = 0; i < r; ++i) rows_sel[static_cast<std::size_t>(i)] = i;
    do {
        for (index_t i = 0; i < r; ++i) cols_sel[static_cast<std::size_t>(i)] = i;
        do {
            std::vector<std::vector<Int>> sub(static_cast<std::size_t>(r),
                                              std::vector<Int>(static_cast<std::size_t>(r), Int(0)));
            for (index_t i = 0; i < r; ++i) {
                const auto& row = a.row(rows_sel[static_cast<std::size_t>(i)]);
                std::size_t k = 0;
                for (const auto& [c, v] : row) {
                    while (k < static_cast<std::size_t>(r) && cols_sel[k] < c) ++k;
                    if (k == static_cast<std::size_t>(r)) break;
                    if (cols_sel[k] == c) sub[static_cast<std::size_t>(i)][k] = v;
                }
            }
            Int d = dense_det(std::move(sub));
            total += d * d;
        } while (next_subset(cols_sel, a.cols()));
    } while (next_subset(rows_sel, a.rows()));
    return total;
}

} // namespace chainreb
