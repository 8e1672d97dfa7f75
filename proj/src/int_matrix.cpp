#include "chainreb/int_matrix.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace chainreb {

IntMatrix::IntMatrix(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw shape_error("negative matrix dimension");
    data_.resize(static_cast<std::size_t>(rows));
}

IntMatrix IntMatrix::identity(index_t n) {
    IntMatrix m(n, n);
    for (index_t i = 0; i < n; ++i) m.data_[static_cast<std::size_t>(i)].emplace_back(i, Int(1));
    return m;
}

IntMatrix IntMatrix::diagonal(const std::vector<Int>& d) {
    const index_t n = static_cast<index_t>(d.size());
    IntMatrix m(n, n);
    for (index_t i = 0; i < n; ++i)
        if (d[static_cast<std::size_t>(i)] != 0)
            m.data_[static_cast<std::size_t>(i)].emplace_back(i, d[static_cast<std::size_t>(i)]);
    return m;
}

IntMatrix IntMatrix::from_triplets(index_t rows, index_t cols,
                                   const std::vector<std::tuple<index_t, index_t, Int>>& t) {
    IntMatrix m(rows, cols);
    for (const auto& [r, c, v] : t) m.add_at(r, c, v);
    return m;
}

index_t IntMatrix::nnz() const {
    index_t n = 0;
    for (const auto& row : data_) n += static_cast<index_t>(row.size());
    return n;
}

bool IntMatrix::is_zero() const { return nnz() == 0; }

void IntMatrix::check_bounds(index_t r, index_t c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw shape_error("matrix index out of range");
}

Int IntMatrix::get(index_t r, index_t c) const {
    check_bounds(r, c);
    const auto& row = data_[static_cast<std::size_t>(r)];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const Entry& e, index_t col) { return e.first < col; });
    if (it != row.end() && it->first == c) return it->second;
    return Int(0);
}

void IntMatrix::set(index_t r, index_t c, const Int& v) {
    check_bounds(r, c);
    auto& row = data_[static_cast<std::size_t>(r)];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const Entry& e, index_t col) { return e.first < col; });
    if (it != row.end() && it->first == c) {
        if (v == 0)
            row.erase(it);
        else
            it->second = v;
    } else if (v != 0) {
        row.insert(it, {c, v});
    }
}

void IntMatrix::add_at(index_t r, index_t c, const Int& v) {
    if (v == 0) return;
    check_bounds(r, c);
    auto& row = data_[static_cast<std::size_t>(r)];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const Entry& e, index_t col) { return e.first < col; });
    if (it != row.end() && it->first == c) {
        it->second += v;
        if (it->second == 0) row.erase(it);
    } else {
        row.insert(it, {c, v});
    }
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    std::vector<index_t> counts(static_cast<std::size_t>(cols_), 0);
    for (const auto& row : data_)
        for (const auto& e : row) counts[static_cast<std::size_t>(e.first)]++;
    for (index_t c = 0; c < cols_; ++c)
        t.data_[static_cast<std::size_t>(c)].reserve(static_cast<std::size_t>(counts[static_cast<std::size_t>(c)]));
    for (index_t r = 0; r < rows_; ++r)
        for (const auto& e : data_[static_cast<std::size_t>(r)])
            t.data_[static_cast<std::size_t>(e.first)].emplace_back(r, e.second);
    return t; // rows already sorted because r is increasing
}

IntMatrix IntMatrix::operator*(const IntMatrix& other) const {
    if (cols_ != other.rows_) throw shape_error("matrix product shape mismatch");
    IntMatrix out(rows_, other.cols_);
    std::vector<Int> acc(static_cast<std::size_t>(other.cols_), Int(0));
    std::vector<index_t> touched;
    for (index_t r = 0; r < rows_; ++r) {
        touched.clear();
        for (const auto& [k, v] : data_[static_cast<std::size_t>(r)]) {
            for (const auto& [c, w] : other.data_[static_cast<std::size_t>(k)]) {
                auto& slot = acc[static_cast<std::size_t>(c)];
                if (slot == 0) touched.push_back(c);
                slot += v * w;
            }
        }
        std::sort(touched.begin(), touched.end());
        auto& row = out.data_[static_cast<std::size_t>(r)];
        for (index_t c : touched) {
            auto& slot = acc[static_cast<std::size_t>(c)];
            if (slot != 0) row.emplace_back(c, slot);
            slot = 0;
        }
    }
    return out;
}

IntMatrix IntMatrix::operator+(const IntMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw shape_error("matrix sum shape mismatch");
    IntMatrix out(rows_, cols_);
    for (index_t r = 0; r < rows_; ++r) {
        const auto& a = data_[static_cast<std::size_t>(r)];
        const auto& b = other.data_[static_cast<std::size_t>(r)];
        auto& dst = out.data_[static_cast<std::size_t>(r)];
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
                dst.push_back(a[i++]);
            } else if (i == a.size() || b[j].first < a[i].first) {
                dst.push_back(b[j++]);
            } else {
                Int v = a[i].second + b[j].second;
                if (v != 0) dst.emplace_back(a[i].first, std::move(v));
                ++i, ++j;
            }
        }
    }
    return out;
}

IntMatrix IntMatrix::operator-() const { return scaled(Int(-1)); }

IntMatrix IntMatrix::operator-(const IntMatrix& other) const { return *this + (-other); }

IntMatrix IntMatrix::scaled(const Int& s) const {
    IntMatrix out(rows_, cols_);
    if (s == 0) return out;
    for (index_t r = 0; r < rows_; ++r) {
        auto& dst = out.data_[static_cast<std::size_t>(r)];
        dst.reserve(data_[static_cast<std::size_t>(r)].size());
        for (const auto& [c, v] : data_[static_cast<std::size_t>(r)]) dst.emplace_back(c, v * s);
    }
    return out;
}

bool IntMatrix::operator==(const IntMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
}

std::vector<Int> IntMatrix::apply(const std::vector<Int>& v) const {
    if (static_cast<index_t>(v.size()) != cols_) throw shape_error("matrix-vector shape mismatch");
    std::vector<Int> out(static_cast<std::size_t>(rows_), Int(0));
    for (index_t r = 0; r < rows_; ++r)
        for (const auto& [c, w] : data_[static_cast<std::size_t>(r)])
            out[static_cast<std::size_t>(r)] += w * v[static_cast<std::size_t>(c)];
    return out;
}

Int IntMatrix::max_abs_col_sum() const {
    std::vector<Int> sums(static_cast<std::size_t>(cols_), Int(0));
    for (const auto& row : data_)
        for (const auto& [c, v] : row) sums[static_cast<std::size_t>(c)] += abs_int(v);
    Int best = 0;
    for (const auto& s : sums) best = std::max(best, s);
    return best;
}

Int IntMatrix::max_abs_row_sum() const {
    Int best = 0;
    for (const auto& row : data_) {
        Int s = 0;
        for (const auto& [c, v] : row) s += abs_int(v);
        best = std::max(best, s);
    }
    return best;
}

Int IntMatrix::max_abs_entry() const {
    Int best = 0;
    for (const auto& row : data_)
        for (const auto& [c, v] : row) best = std::max(best, abs_int(v));
    return best;
}

void IntMatrix::write_triplets(std::ostream& os) const {
    os << rows_ << ' ' << cols_ << ' ' << nnz() << '\n';
    for (index_t r = 0; r < rows_; ++r)
        for (const auto& [c, v] : data_[static_cast<std::size_t>(r)])
            os << r << ' ' << c << ' ' << v << '\n';
}

IntMatrix IntMatrix::read_triplets(std::istream& is) {
    index_t rows = 0, cols = 0, nnz = 0;
    if (!(is >> rows >> cols >> nnz)) throw parse_error("bad triplet header");
    IntMatrix m(rows, cols);
    for (index_t i = 0; i < nnz; ++i) {
        index_t r = 0, c = 0;
        std::string value;
        if (!(is >> r >> c >> value)) throw parse_error("truncated triplet body");
        m.add_at(r, c, Int(value));
    }
    return m;
}

} // namespace chainreb
