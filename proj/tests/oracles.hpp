#pragma once

// Test-only reference implementations. Everything here is deliberately naive
// and kept independent of the library code paths it is used to check.

#include "chainreb/int_matrix.hpp"
#include "chainreb/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

using chainreb::Int;
using chainreb::IntMatrix;
using chainreb::Rat;
using chainreb::index_t;

using Dense = std::vector<std::vector<Int>>;

inline Dense to_dense(const IntMatrix& a) {
    Dense m(static_cast<std::size_t>(a.rows()),
            std::vector<Int>(static_cast<std::size_t>(a.cols()), Int(0)));
    for (index_t r = 0; r < a.rows(); ++r)
        for (const auto& [c, v] : a.row(r)) m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = v;
    return m;
}

// Dense textbook diagonalization by elementary row/column reduction (smallest
// remaining entry as corner, remainder-halving quotients), then a gcd/lcm
// pass. Returns the invariant factors.
inline std::vector<Int> snf_diagonal(const IntMatrix& a) {
    Dense m = to_dense(a);
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    std::vector<Int> diag;
    std::size_t top = 0, left = 0;
    auto abs_of = [](const Int& x) { return x < 0 ? Int(-x) : x; };
    auto near_q = [&](const Int& x, const Int& d) {
        Int q = x / d;
        Int r = x - q * d;
        if (r != 0 && 2 * abs_of(r) > abs_of(d)) q += ((r < 0) == (d < 0)) ? 1 : -1;
        return q;
    };
    while (top < rows && left < cols) {
        // smallest nonzero entry of the remaining block as the corner
        std::size_t pr = top, pc = left;
        bool found = false;
        for (std::size_t r = top; r < rows; ++r)
            for (std::size_t c = left; c < cols; ++c)
                if (m[r][c] != 0 && (!found || abs_of(m[r][c]) < abs_of(m[pr][pc]))) {
                    pr = r;
                    pc = c;
                    found = true;
                }
        if (!found) break;
        std::swap(m[top], m[pr]);
        for (std::size_t r = top; r < rows; ++r) std::swap(m[r][left], m[r][pc]);
        // reduce until the corner divides and clears its row and column
        while (true) {
            bool again = false;
            for (std::size_t r = top + 1; r < rows; ++r) {
                if (m[r][left] == 0) continue;
                Int q = near_q(m[r][left], m[top][left]);
                for (std::size_t c = left; c < cols; ++c) m[r][c] -= q * m[top][c];
                if (m[r][left] != 0) {
                    std::swap(m[top], m[r]);
                    again = true;
                }
            }
            for (std::size_t c = left + 1; c < cols; ++c) {
                if (m[top][c] == 0) continue;
                Int q = near_q(m[top][c], m[top][left]);
                for (std::size_t r = top; r < rows; ++r) m[r][c] -= q * m[r][left];
                if (m[top][c] != 0) {
                    for (std::size_t r = top; r < rows; ++r) std::swap(m[r][left], m[r][c]);
                    again = true;
                }
            }
            if (!again) break;
        }
        diag.push_back(abs_of(m[top][left]));
        ++top;
        ++left;
    }
    // enforce the divisibility chain
    for (std::size_t i = 0; i + 1 < diag.size(); ++i)
        for (std::size_t j = i + 1; j < diag.size(); ++j)
            if (diag[j] % diag[i] != 0) {
                Int g = boost::multiprecision::gcd(diag[i], diag[j]);
                Int l = diag[i] / g * diag[j];
                diag[i] = g;
                diag[j] = l;
            }
    return diag;
}

inline index_t rank_of(const IntMatrix& a) { return static_cast<index_t>(snf_diagonal(a).size()); }

// Largest singular value via cyclic Jacobi on the Gram matrix, all double.
inline double top_singular_value(const IntMatrix& a) {
    const std::size_t n = static_cast<std::size_t>(a.cols());
    std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
    Dense d = to_dense(a);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < static_cast<std::size_t>(a.rows()); ++k)
                s += static_cast<double>(d[k][i]) * static_cast<double>(d[k][j]);
            b[i][j] = s;
        }
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += b[p][q] * b[p][q];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (b[p][q] == 0.0) continue;
                double theta = (b[q][q] - b[p][p]) / (2.0 * b[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double bkp = b[k][p], bkq = b[k][q];
                    b[k][p] = c * bkp - s * bkq;
                    b[k][q] = s * bkp + c * bkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double bpk = b[p][k], bqk = b[q][k];
                    b[p][k] = c * bpk - s * bqk;
                    b[q][k] = s * bpk + c * bqk;
                }
            }
    }
    double lam = 0.0;
    for (std::size_t i = 0; i < n; ++i) lam = std::max(lam, b[i][i]);
    return std::sqrt(std::max(lam, 0.0));
}

// Recursive Laplace determinant; fine for the <= 6x6 cross-checks.
inline Int laplace_det(const Dense& m) {
    const std::size_t n = m.size();
    if (n == 0) return Int(1);
    if (n == 1) return m[0][0];
    Int out(0);
    int sign = 1;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j] != 0) {
            Dense sub(n - 1, std::vector<Int>(n - 1));
            for (std::size_t r = 1; r < n; ++r) {
                std::size_t cc = 0;
                for (std::size_t c = 0; c < n; ++c) {
                    if (c == j) continue;
                    sub[r - 1][cc++] = m[r][c];
                }
            }
            out += sign * m[0][j] * laplace_det(sub);
        }
        sign = -sign;
    }
    return out;
}

// e_r of the eigenvalues of A^T A via exact Faddeev-LeVerrier; equals the
// squared product of the nonzero singular values when r = rank(A).
inline Int gram_char_coefficient(const IntMatrix& a, index_t r) {
    if (r == 0) return Int(1);
    const index_t n = a.cols();
    IntMatrix b = a.transpose() * a;
    auto trace = [&](const IntMatrix& m) {
        Int t(0);
        for (index_t i = 0; i < n; ++i) t += m.get(i, i);
        return t;
    };
    // M_1 = B, c_k = tr(M_k)/k, M_k = B (M_{k-1} - c_{k-1} I); c_k = e_k(eigs)
    IntMatrix m = b;
    Int ck = trace(m);
    for (index_t k = 2; k <= r; ++k) {
        IntMatrix inner = m;
        for (index_t i = 0; i < n; ++i) inner.add_at(i, i, -ck);
        m = b * inner;
        ck = trace(m) / k;
    }
    // the spectrum is nonnegative, so e_r is |ck| whatever the sign convention
    return ck < 0 ? Int(-ck) : ck;
}

} // namespace oracles
