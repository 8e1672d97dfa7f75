#include "chainreb/smith.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace chainreb {

namespace {

// Quotient minimizing the remainder magnitude, so elimination steps shrink
// entries as fast as plain Euclid allows.
Int nearest_quotient(const Int& a, const Int& b) {
    Int q = a / b;
    Int r = a - q * b;
    if (r != 0) {
        Int babs = abs_int(b);
        if (2 * abs_int(r) > babs) q += (r < 0) == (b < 0) ? 1 : -1;
    }
    return q;
}

class SmithWorker {
public:
    SmithWorker(const IntMatrix& a, bool track, const ResourceCaps& caps)
        : nrows_(a.rows()), ncols_(a.cols()), track_(track), caps_(caps) {
        rows_.resize(static_cast<std::size_t>(nrows_));
        col_rows_.resize(static_cast<std::size_t>(ncols_));
        for (index_t r = 0; r < nrows_; ++r)
            for (const auto& [c, v] : a.row(r)) put(r, c, v);
        if (track_) {
            left_.resize(static_cast<std::size_t>(nrows_));
            right_t_.resize(static_cast<std::size_t>(ncols_));
            for (index_t r = 0; r < nrows_; ++r) left_[static_cast<std::size_t>(r)][r] = 1;
            for (index_t c = 0; c < ncols_; ++c) right_t_[static_cast<std::size_t>(c)][c] = 1;
        }
        row_active_.assign(static_cast<std::size_t>(nrows_), true);
        col_active_.assign(static_cast<std::size_t>(ncols_), true);
    }

    void run() {
        while (true) {
            auto pivot = find_pivot();
            if (pivot.first < 0) break;
            reduce_at(pivot.first, pivot.second);
        }
        fix_divisibility();
    }

    SmithDecomposition finish(const IntMatrix& original) {
        SmithDecomposition d;
        d.invariant_factors = diag_;
        d.rank = static_cast<index_t>(diag_.size());
        if (track_) {
            d.transform_left = IntMatrix(nrows_, nrows_);
            for (index_t r = 0; r < nrows_; ++r)
                for (const auto& [c, v] : left_[static_cast<std::size_t>(r)])
                    d.transform_left.set(r, c, v);
            IntMatrix rt(ncols_, ncols_);
            for (index_t r = 0; r < ncols_; ++r)
                for (const auto& [c, v] : right_t_[static_cast<std::size_t>(r)]) rt.set(r, c, v);
            d.transform_right = rt.transpose();
        } else {
            (void)original;
        }
        return d;
    }

private:
    index_t nrows_, ncols_;
    bool track_;
    ResourceCaps caps_;
    std::vector<std::map<index_t, Int>> rows_;
    std::vector<std::set<index_t>> col_rows_;
    std::set<std::pair<index_t, index_t>> col_order_; // (entry count, col), active columns
    std::vector<bool> row_active_, col_active_;
    std::vector<Int> diag_;
    index_t retired_ = 0;
    // transforms: left as rows, right stored transposed so column ops are row ops
    std::vector<std::map<index_t, Int>> left_, right_t_;

    void check_entry(const Int& v) const {
        if (v != 0 && msb(abs_int(v)) + 1 > caps_.max_entry_bits)
            throw resource_limit_error("matrix entry exceeded the bit-length cap during elimination");
    }

    void put(index_t r, index_t c, const Int& v) {
        auto& row = rows_[static_cast<std::size_t>(r)];
        auto it = row.find(c);
        if (v == 0) {
            if (it != row.end()) {
                row.erase(it);
                column_erase(r, c);
            }
            return;
        }
        check_entry(v);
        if (it == row.end()) {
            row.emplace(c, v);
            column_insert(r, c);
        } else {
            it->second = v;
        }
    }

    void column_erase(index_t r, index_t c) {
        auto& cr = col_rows_[static_cast<std::size_t>(c)];
        col_order_.erase({static_cast<index_t>(cr.size()), c});
        cr.erase(r);
        if (!cr.empty()) col_order_.insert({static_cast<index_t>(cr.size()), c});
    }

    void column_insert(index_t r, index_t c) {
        auto& cr = col_rows_[static_cast<std::size_t>(c)];
        if (!cr.empty()) col_order_.erase({static_cast<index_t>(cr.size()), c});
        cr.insert(r);
        col_order_.insert({static_cast<index_t>(cr.size()), c});
    }

    Int value(index_t r, index_t c) const {
        const auto& row = rows_[static_cast<std::size_t>(r)];
        auto it = row.find(c);
        return it == row.end() ? Int(0) : it->second;
    }

    // Lightest active column first, then the smallest entry in it with the
    // lightest row. Deterministic, and keeps fill-in tame on the large
    // structured boundary matrices.
    std::pair<index_t, index_t> find_pivot() const {
        if (col_order_.empty()) return {-1, -1};
        const index_t c = col_order_.begin()->second;
        index_t best_r = -1;
        Int best_abs;
        std::size_t best_size = 0;
        for (index_t r : col_rows_[static_cast<std::size_t>(c)]) {
            Int a = abs_int(value(r, c));
            std::size_t sz = rows_[static_cast<std::size_t>(r)].size();
            if (best_r < 0 || a < best_abs || (a == best_abs && sz < best_size)) {
                best_abs = a;
                best_size = sz;
                best_r = r;
            }
        }
        return {best_r, c};
    }

    // row r2 -= q * row r1, with the pivot row passed as a stable snapshot
    void row_op(index_t r2, const std::vector<std::pair<index_t, Int>>& r1_snapshot,
                const std::map<index_t, Int>& left_snapshot, const Int& q) {
        if (q == 0) return;
        for (const auto& [c, v] : r1_snapshot) put(r2, c, value(r2, c) - q * v);
        if (track_)
            for (const auto& [c, v] : left_snapshot) {
                auto& dst = left_[static_cast<std::size_t>(r2)][c];
                dst -= q * v;
                check_entry(dst);
                if (dst == 0) left_[static_cast<std::size_t>(r2)].erase(c);
            }
    }

    // col c2 -= q * col c1
    void col_op(index_t c2, index_t c1, const Int& q) {
        if (q == 0) return;
        for (index_t r : std::set<index_t>(col_rows_[static_cast<std::size_t>(c1)]))
            put(r, c2, value(r, c2) - q * value(r, c1));
        if (track_)
            for (const auto& [c, v] : std::map<index_t, Int>(right_t_[static_cast<std::size_t>(c1)])) {
                auto& dst = right_t_[static_cast<std::size_t>(c2)][c];
                dst -= q * v;
                check_entry(dst);
                if (dst == 0) right_t_[static_cast<std::size_t>(c2)].erase(c);
            }
    }

    void negate_row(index_t r) {
        for (auto& [c, v] : rows_[static_cast<std::size_t>(r)]) v = -v;
        if (track_)
            for (auto& [c, v] : left_[static_cast<std::size_t>(r)]) v = -v;
    }

    void swap_rows(index_t r1, index_t r2) {
        if (r1 == r2) return;
        for (const auto& [c, v] : rows_[static_cast<std::size_t>(r1)])
            col_rows_[static_cast<std::size_t>(c)].erase(r1);
        for (const auto& [c, v] : rows_[static_cast<std::size_t>(r2)])
            col_rows_[static_cast<std::size_t>(c)].erase(r2);
        std::swap(rows_[static_cast<std::size_t>(r1)], rows_[static_cast<std::size_t>(r2)]);
        for (const auto& [c, v] : rows_[static_cast<std::size_t>(r1)])
            col_rows_[static_cast<std::size_t>(c)].insert(r1);
        for (const auto& [c, v] : rows_[static_cast<std::size_t>(r2)])
            col_rows_[static_cast<std::size_t>(c)].insert(r2);
        std::swap(row_active_[static_cast<std::size_t>(r1)], row_active_[static_cast<std::size_t>(r2)]);
        if (track_) std::swap(left_[static_cast<std::size_t>(r1)], left_[static_cast<std::size_t>(r2)]);
    }

    void swap_cols(index_t c1, index_t c2) {
        if (c1 == c2) return;
        std::set<index_t> rows_union = col_rows_[static_cast<std::size_t>(c1)];
        for (index_t r : col_rows_[static_cast<std::size_t>(c2)]) rows_union.insert(r);
        for (index_t r : rows_union) {
            Int v1 = value(r, c1), v2 = value(r, c2);
            put(r, c1, v2);
            put(r, c2, v1);
        }
        std::swap(col_active_[static_cast<std::size_t>(c1)], col_active_[static_cast<std::size_t>(c2)]);
        if (track_) std::swap(right_t_[static_cast<std::size_t>(c1)], right_t_[static_cast<std::size_t>(c2)]);
    }

    void reduce_at(index_t r, index_t c) {
        while (true) {
            Int p = value(r, c);
            bool clean = true;
            // clear the column
            std::vector<std::pair<index_t, Int>> pivot_row(rows_[static_cast<std::size_t>(r)].begin(),
                                                           rows_[static_cast<std::size_t>(r)].end());
            std::map<index_t, Int> pivot_left;
            if (track_) pivot_left = left_[static_cast<std::size_t>(r)];
            for (index_t r2 : std::vector<index_t>(col_rows_[static_cast<std::size_t>(c)].begin(),
                                                   col_rows_[static_cast<std::size_t>(c)].end())) {
                if (r2 == r) continue;
                Int q = nearest_quotient(value(r2, c), p);
                row_op(r2, pivot_row, pivot_left, q);
                if (value(r2, c) != 0) clean = false;
            }
            if (!clean) {
                auto nxt = smallest_in_col(c);
                r = nxt;
                continue;
            }
            // clear the row; only row r is touched because the column is clean
            for (const auto& [c2, v] : std::map<index_t, Int>(rows_[static_cast<std::size_t>(r)])) {
                if (c2 == c) continue;
                Int q = nearest_quotient(v, p);
                col_op(c2, c, q);
                if (value(r, c2) != 0) clean = false;
            }
            if (clean) break;
            auto nxtc = smallest_in_row(r);
            c = nxtc;
        }
        if (value(r, c) < 0) negate_row(r);
        // park the pivot on the diagonal
        swap_rows(r, retired_);
        swap_cols(c, retired_);
        diag_.push_back(value(retired_, retired_));
        put(retired_, retired_, Int(0));
        row_active_[static_cast<std::size_t>(retired_)] = false;
        col_active_[static_cast<std::size_t>(retired_)] = false;
        ++retired_;
    }

    index_t smallest_in_col(index_t c) const {
        index_t best_r = -1;
        Int best;
        for (index_t r : col_rows_[static_cast<std::size_t>(c)]) {
            Int a = abs_int(value(r, c));
            if (best_r < 0 || a < best) {
                best = a;
                best_r = r;
            }
        }
        return best_r;
    }

    index_t smallest_in_row(index_t r) const {
        index_t best_c = -1;
        Int best;
        for (const auto& [c, v] : rows_[static_cast<std::size_t>(r)]) {
            Int a = abs_int(v);
            if (best_c < 0 || a < best) {
                best = a;
                best_c = c;
            }
        }
        return best_c;
    }

    // Enforce d_i | d_{i+1} by replacing offending pairs with (gcd, lcm).
    void fix_divisibility() {
        const std::size_t r = diag_.size();
        for (std::size_t i = 0; i + 1 < r; ++i) {
            for (std::size_t j = i + 1; j < r; ++j) {
                if (diag_[j] % diag_[i] == 0) continue;
                Int a = diag_[i], b = diag_[j];
                Int g, x, y;
                ext_gcd(a, b, g, x, y);
                Int lcm = a / g * b;
                if (track_) {
                    const index_t ii = static_cast<index_t>(i), jj = static_cast<index_t>(j);
                    // col_i += col_j, then a unimodular 2x2 row mix, then clean up
                    transform_col_add(ii, jj);
                    transform_row_mix(ii, jj, x, y, -(b / g), a / g);
                    transform_col_add_multiple(jj, ii, -(y * (b / g)));
                }
                diag_[i] = g;
                diag_[j] = lcm;
            }
        }
    }

    static void ext_gcd(const Int& a, const Int& b, Int& g, Int& x, Int& y) {
        if (b == 0) {
            g = a < 0 ? Int(-a) : a;
            x = a < 0 ? Int(-1) : Int(1);
            y = 0;
            return;
        }
        Int x1, y1;
        ext_gcd(b, a % b, g, x1, y1);
        x = y1;
        y = x1 - (a / b) * y1;
    }

    // The three fix-up moves only ever touch frozen diagonal rows/cols, so the
    // sparse state is untouched; only the transforms record them.
    void transform_col_add(index_t ci, index_t cj) { // col_i += col_j
        for (const auto& [c, v] : std::map<index_t, Int>(right_t_[static_cast<std::size_t>(cj)])) {
            auto& dst = right_t_[static_cast<std::size_t>(ci)][c];
            dst += v;
            if (dst == 0) right_t_[static_cast<std::size_t>(ci)].erase(c);
        }
    }

    void transform_col_add_multiple(index_t c2, index_t c1, const Int& q) { // col_{c2} += q col_{c1}
        for (const auto& [c, v] : std::map<index_t, Int>(right_t_[static_cast<std::size_t>(c1)])) {
            auto& dst = right_t_[static_cast<std::size_t>(c2)][c];
            dst += q * v;
            if (dst == 0) right_t_[static_cast<std::size_t>(c2)].erase(c);
        }
    }

    void transform_row_mix(index_t ri, index_t rj, const Int& a11, const Int& a12, const Int& a21,
                           const Int& a22) {
        auto old_i = left_[static_cast<std::size_t>(ri)];
        auto old_j = left_[static_cast<std::size_t>(rj)];
        std::map<index_t, Int> new_i, new_j;
        auto accumulate = [](std::map<index_t, Int>& dst, const std::map<index_t, Int>& src, const Int& f) {
            if (f == 0) return;
            for (const auto& [c, v] : src) {
                auto& slot = dst[c];
                slot += f * v;
                if (slot == 0) dst.erase(c);
            }
        };
        accumulate(new_i, old_i, a11);
        accumulate(new_i, old_j, a12);
        accumulate(new_j, old_i, a21);
        accumulate(new_j, old_j, a22);
        left_[static_cast<std::size_t>(ri)] = std::move(new_i);
        left_[static_cast<std::size_t>(rj)] = std::move(new_j);
    }
};

} // namespace

SmithDecomposition smith_normal_form(const IntMatrix& a, const ResourceCaps& caps) {
    SmithWorker w(a, /*track=*/true, caps);
    w.run();
    return w.finish(a);
}

std::vector<Int> invariant_factors(const IntMatrix& a, const ResourceCaps& caps) {
    SmithWorker w(a, /*track=*/false, caps);
    w.run();
    return w.finish(a).invariant_factors;
}

index_t rank_over_q(const IntMatrix& a, const ResourceCaps& caps) {
    return static_cast<index_t>(invariant_factors(a, caps).size());
}

namespace {

std::int64_t mod_pos(std::int64_t v, std::int64_t p) {
    std::int64_t m = v % p;
    return m < 0 ? m + p : m;
}

std::int64_t mod_inv(std::int64_t a, std::int64_t p) {
    std::int64_t t = 0, newt = 1, r = p, newr = a;
    while (newr != 0) {
        std::int64_t q = r / newr;
        std::swap(t -= q * newt, newt);
        std::swap(r -= q * newr, newr);
    }
    return mod_pos(t, p);
}

} // namespace

index_t rank_mod_p(const IntMatrix& a, std::int64_t p) {
    if (p < 2) throw shape_error("rank_mod_p needs a prime modulus");
    const index_t nrows = a.rows(), ncols = a.cols();
    std::vector<std::map<index_t, std::int64_t>> rows(static_cast<std::size_t>(nrows));
    std::vector<std::set<index_t>> col_rows(static_cast<std::size_t>(ncols));
    for (index_t r = 0; r < nrows; ++r)
        for (const auto& [c, v] : a.row(r)) {
            std::int64_t m = mod_pos(static_cast<std::int64_t>(v % p), p);
            if (m != 0) {
                rows[static_cast<std::size_t>(r)][c] = m;
                col_rows[static_cast<std::size_t>(c)].insert(r);
            }
        }
    // min fill-in flavored pivoting: lightest column, then lightest row in it
    std::set<std::pair<index_t, index_t>> col_order; // (count, col)
    for (index_t c = 0; c < ncols; ++c)
        if (!col_rows[static_cast<std::size_t>(c)].empty())
            col_order.insert({static_cast<index_t>(col_rows[static_cast<std::size_t>(c)].size()), c});
    auto erase_entry = [&](index_t r, index_t c) {
        auto& cr = col_rows[static_cast<std::size_t>(c)];
        col_order.erase({static_cast<index_t>(cr.size()), c});
        cr.erase(r);
        if (!cr.empty()) col_order.insert({static_cast<index_t>(cr.size()), c});
    };
    auto insert_entry = [&](index_t r, index_t c) {
        auto& cr = col_rows[static_cast<std::size_t>(c)];
        if (!cr.empty()) col_order.erase({static_cast<index_t>(cr.size()), c});
        cr.insert(r);
        col_order.insert({static_cast<index_t>(cr.size()), c});
    };
    index_t rank = 0;
    while (!col_order.empty()) {
        index_t c = col_order.begin()->second;
        index_t pr = -1;
        std::size_t best = 0;
        for (index_t r : col_rows[static_cast<std::size_t>(c)]) {
            std::size_t sz = rows[static_cast<std::size_t>(r)].size();
            if (pr < 0 || sz < best) {
                best = sz;
                pr = r;
            }
        }
        ++rank;
        std::int64_t inv = mod_inv(rows[static_cast<std::size_t>(pr)][c], p);
        std::vector<index_t> targets(col_rows[static_cast<std::size_t>(c)].begin(),
                                     col_rows[static_cast<std::size_t>(c)].end());
        for (index_t r2 : targets) {
            if (r2 == pr) continue;
            std::int64_t f = mod_pos(rows[static_cast<std::size_t>(r2)][c] * inv % p, p);
            for (const auto& [cc, vv] : rows[static_cast<std::size_t>(pr)]) {
                auto& row2 = rows[static_cast<std::size_t>(r2)];
                auto it = row2.find(cc);
                std::int64_t nv = mod_pos(((it == row2.end() ? 0 : it->second) - f * vv) % p, p);
                if (nv == 0) {
                    if (it != row2.end()) {
                        row2.erase(it);
                        erase_entry(r2, cc);
                    }
                } else {
                    if (it == row2.end()) {
                        row2[cc] = nv;
                        insert_entry(r2, cc);
                    } else {
                        it->second = nv;
                    }
                }
            }
        }
        // retire pivot row and column
        for (const auto& [cc, vv] : rows[static_cast<std::size_t>(pr)]) erase_entry(pr, cc);
        rows[static_cast<std::size_t>(pr)].clear();
    }
    return rank;
}

} // namespace chainreb
