#pragma once

#include "chainreb/caps.hpp"
#include "chainreb/types.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace chainreb {

/// Sparse integer matrix with arbitrary-precision entries. Stored entries are
/// always nonzero; rows or columns may be zero-dimensional, in which case the
/// matrix behaves as an empty map. Immutable use after construction is the
/// normal pattern; mutation is only used while assembling.
class IntMatrix {
public:
    using Entry = std::pair<index_t, Int>; // (col, value), rows kept sorted by col

    IntMatrix() = default;
    IntMatrix(index_t rows, index_t cols);

    static IntMatrix identity(index_t n);
    static IntMatrix diagonal(const std::vector<Int>& d);
    static IntMatrix from_triplets(index_t rows, index_t cols,
                                   const std::vector<std::tuple<index_t, index_t, Int>>& t);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    index_t nnz() const;
    bool is_zero() const;

    Int get(index_t r, index_t c) const;
    void set(index_t r, index_t c, const Int& v);
    void add_at(index_t r, index_t c, const Int& v);

    const std::vector<Entry>& row(index_t r) const { return data_[static_cast<std::size_t>(r)]; }

    IntMatrix transpose() const;
    IntMatrix operator*(const IntMatrix& other) const;
    IntMatrix operator+(const IntMatrix& other) const;
    IntMatrix operator-(const IntMatrix& other) const;
    IntMatrix operator-() const;
    IntMatrix scaled(const Int& s) const;
    bool operator==(const IntMatrix& other) const;
    bool operator!=(const IntMatrix& other) const { return !(*this == other); }

    std::vector<Int> apply(const std::vector<Int>& v) const;

    /// Largest column sum of absolute values (the l1-induced operator norm).
    Int max_abs_col_sum() const;
    /// Largest row sum of absolute values (the l-infinity-induced norm).
    Int max_abs_row_sum() const;
    Int max_abs_entry() const;

    /// Textual triplet exchange format: a "rows cols nnz" header line followed
    /// by one "row col value" line per stored entry, 0-indexed decimal.
    void write_triplets(std::ostream& os) const;
    static IntMatrix read_triplets(std::istream& is);

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<std::vector<Entry>> data_;

    void check_bounds(index_t r, index_t c) const;
};

} // namespace chainreb
