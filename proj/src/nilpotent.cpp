#include "chainreb/nilpotent.hpp"

#include "chainreb/norm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace chainreb {

namespace {

Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

void add_block(IntMatrix& dst, const IntMatrix& src, index_t row_off, index_t col_off,
               const Int& scale = Int(1)) {
    for (index_t r = 0; r < src.rows(); ++r)
        for (const auto& [c, v] : src.row(r)) dst.add_at(row_off + r, col_off + c, v * scale);
}

IntMatrix identity_like(index_t n) { return IntMatrix::identity(n); }

} // namespace

IntMatrix column_hnf(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw shape_error("hnf expects a square generator matrix");
    const index_t d = m.rows();
    std::vector<std::vector<Int>> col(static_cast<std::size_t>(d),
                                      std::vector<Int>(static_cast<std::size_t>(d), Int(0)));
    for (index_t r = 0; r < d; ++r)
        for (const auto& [c, v] : m.row(r)) col[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] = v;
    // clear row i below the pivot column i, working bottom row upward
    for (index_t i = d - 1; i >= 0; --i) {
        // gcd-fold columns 0..i on row i into column i
        for (index_t j = 0; j < i; ++j) {
            auto& cj = col[static_cast<std::size_t>(j)];
            auto& ci = col[static_cast<std::size_t>(i)];
            while (cj[static_cast<std::size_t>(i)] != 0) {
                Int q = floor_div(ci[static_cast<std::size_t>(i)], cj[static_cast<std::size_t>(i)]);
                for (index_t r = 0; r < d; ++r)
                    ci[static_cast<std::size_t>(r)] -= q * cj[static_cast<std::size_t>(r)];
                std::swap(ci, cj);
            }
        }
        auto& ci = col[static_cast<std::size_t>(i)];
        if (ci[static_cast<std::size_t>(i)] == 0)
            throw shape_error("generator matrix is singular; the sublattice must have finite index");
        if (ci[static_cast<std::size_t>(i)] < 0)
            for (index_t r = 0; r < d; ++r) ci[static_cast<std::size_t>(r)] = -ci[static_cast<std::size_t>(r)];
    }
    // reduce entries right of each diagonal into [0, diagonal); bottom row
    // first, because reducing with column i only touches rows <= i
    for (index_t j = 1; j < d; ++j)
        for (index_t i = j - 1; i >= 0; --i) {
            Int q = floor_div(col[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)],
                              col[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
            if (q != 0)
                for (index_t r = 0; r <= i; ++r)
                    col[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] -=
                        q * col[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
        }
    IntMatrix out(d, d);
    for (index_t j = 0; j < d; ++j)
        for (index_t r = 0; r < d; ++r)
            if (col[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] != 0)
                out.set(r, j, col[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)]);
    return out;
}

Int SubgroupSpec::index() const {
    Int out(1);
    for (const auto& lvl : levels) out *= lvl.jump;
    return out;
}

IntMatrix SubgroupSpec::lattice_matrix() const {
    const index_t d = static_cast<index_t>(levels.size());
    IntMatrix m(d, d);
    for (index_t j = 0; j < d; ++j) {
        const auto& lvl = levels[static_cast<std::size_t>(j)];
        if (static_cast<index_t>(lvl.correction.size()) != j)
            throw shape_error("correction length must equal the level index");
        if (lvl.jump < 1) throw shape_error("level jump must be >= 1");
        m.set(j, j, Int(lvl.jump));
        for (index_t i = 0; i < j; ++i)
            if (lvl.correction[static_cast<std::size_t>(i)] != 0)
                m.set(i, j, lvl.correction[static_cast<std::size_t>(i)]);
    }
    return m;
}

SubgroupSpec subgroup_from_hnf(const IntMatrix& generators) {
    IntMatrix h = column_hnf(generators);
    SubgroupSpec spec;
    for (index_t j = 0; j < h.cols(); ++j) {
        SubgroupLevel lvl;
        Int jump = h.get(j, j);
        if (jump > Int(std::numeric_limits<index_t>::max() / 4))
            throw resource_limit_error("level jump too large");
        lvl.jump = static_cast<index_t>(jump);
        for (index_t i = 0; i < j; ++i) lvl.correction.push_back(h.get(i, j));
        spec.levels.push_back(std::move(lvl));
    }
    return spec;
}

SubgroupSpec parse_subgroup(std::istream& is) {
    std::string line;
    SubgroupSpec spec;
    bool saw_header = false;
    std::vector<std::vector<Int>> hnf_rows;
    bool hnf_mode = false;
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::string word;
        if (!(ss >> word) || word[0] == '#') continue;
        if (word == "tower") {
            saw_header = true;
            continue;
        }
        if (word == "hnf") {
            hnf_mode = true;
            continue;
        }
        if (hnf_mode) {
            std::vector<Int> row;
            std::stringstream rs(line);
            std::string tok;
            while (rs >> tok) row.emplace_back(tok);
            if (!row.empty()) hnf_rows.push_back(std::move(row));
            continue;
        }
        if (word == "level") {
            SubgroupLevel lvl;
            std::string part;
            while (ss >> part) {
                if (part.rfind("l=", 0) == 0) {
                    lvl.jump = std::stoll(part.substr(2));
                } else if (part.rfind("a=", 0) == 0) {
                    std::string rest = part.substr(2);
                    std::stringstream as(rest);
                    std::string item;
                    while (std::getline(as, item, ','))
                        if (!item.empty()) lvl.correction.emplace_back(item);
                }
            }
            spec.levels.push_back(std::move(lvl));
            continue;
        }
        throw parse_error("unrecognized subgroup line: " + line);
    }
    (void)saw_header;
    if (hnf_mode) {
        const index_t d = static_cast<index_t>(hnf_rows.size());
        IntMatrix m(d, d);
        for (index_t r = 0; r < d; ++r) {
            if (static_cast<index_t>(hnf_rows[static_cast<std::size_t>(r)].size()) != d)
                throw parse_error("hnf block must be square");
            for (index_t c = 0; c < d; ++c)
                m.set(r, c, hnf_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        }
        return subgroup_from_hnf(m);
    }
    return spec;
}

void write_subgroup(std::ostream& os, const SubgroupSpec& spec, const std::string& tower_name) {
    os << "tower " << tower_name << '\n';
    for (const auto& lvl : spec.levels) {
        os << "level l=" << lvl.jump << " a=";
        for (std::size_t i = 0; i < lvl.correction.size(); ++i) {
            if (i) os << ',';
            os << lvl.correction[i];
        }
        os << '\n';
    }
}

bool UnipotentTower::is_abelian() const {
    for (const auto& t : twists)
        if (t.rows() != 0 && !(t == identity_like(t.rows()))) return false;
    return true;
}

UnipotentTower UnipotentTower::free_abelian(index_t d) {
    UnipotentTower t;
    t.twists.assign(static_cast<std::size_t>(d), IntMatrix());
    return t;
}

UnipotentTower UnipotentTower::heisenberg() {
    IntMatrix shear(2, 2);
    shear.set(0, 0, 1);
    shear.set(0, 1, 1);
    shear.set(1, 1, 1);
    return twisted(3, std::move(shear));
}

UnipotentTower UnipotentTower::twisted(index_t hirsch, IntMatrix top) {
    UnipotentTower t;
    t.twists.assign(static_cast<std::size_t>(hirsch - 1), IntMatrix());
    t.twists.push_back(std::move(top));
    return t;
}

bool is_unipotent(const IntMatrix& u) {
    if (u.rows() != u.cols()) return false;
    const index_t n = u.rows();
    // e_k of the spectrum must equal C(n, k) for all k
    auto trace = [&](const IntMatrix& m) {
        Int t(0);
        for (index_t i = 0; i < n; ++i) t += m.get(i, i);
        return t;
    };
    IntMatrix m = u;
    Int ck = trace(m);
    Int binom(n);
    if (ck != binom) return false;
    for (index_t k = 2; k <= n; ++k) {
        IntMatrix inner = m;
        for (index_t i = 0; i < n; ++i) inner.add_at(i, i, -ck);
        m = u * inner;
        ck = trace(m) / k;
        binom = binom * (n - k + 1) / k;
        // e_k of the spectrum is (-1)^(k+1) ck in this recursion
        Int expected = (k % 2 == 1) ? binom : Int(-binom);
        if (ck != expected) return false;
    }
    return true;
}

namespace {

bool is_upper_unitriangular(const IntMatrix& u) {
    for (index_t r = 0; r < u.rows(); ++r) {
        if (u.get(r, r) != 1) return false;
        for (const auto& [c, v] : u.row(r))
            if (c < r && v != 0) return false;
    }
    return true;
}

IntMatrix matrix_power(const IntMatrix& u, index_t e) {
    IntMatrix out = identity_like(u.rows());
    IntMatrix base = u;
    while (e > 0) {
        if (e & 1) out = out * base;
        base = base * base;
        e >>= 1;
    }
    return out;
}

// Solve upper-triangular L x = b over the integers; false if non-integral.
bool solve_upper_integer(const IntMatrix& l, const std::vector<Int>& b, std::vector<Int>& x) {
    const index_t n = l.rows();
    x.assign(static_cast<std::size_t>(n), Int(0));
    for (index_t i = n - 1; i >= 0; --i) {
        Int acc = b[static_cast<std::size_t>(i)];
        for (index_t j = i + 1; j < n; ++j) acc -= l.get(i, j) * x[static_cast<std::size_t>(j)];
        Int diag = l.get(i, i);
        if (acc % diag != 0) return false;
        x[static_cast<std::size_t>(i)] = acc / diag;
    }
    return true;
}

bool lattice_contains(const IntMatrix& l, const IntMatrix& vectors) {
    for (index_t c = 0; c < vectors.cols(); ++c) {
        std::vector<Int> b(static_cast<std::size_t>(vectors.rows()), Int(0));
        for (index_t r = 0; r < vectors.rows(); ++r) b[static_cast<std::size_t>(r)] = vectors.get(r, c);
        std::vector<Int> x;
        if (!solve_upper_integer(l, b, x)) return false;
    }
    return true;
}

} // namespace

void validate(const UnipotentTower& tower, const SubgroupSpec& sub) {
    const index_t d = tower.hirsch_length();
    if (d < 1) throw shape_error("tower must have at least one level");
    if (static_cast<index_t>(sub.levels.size()) != d)
        throw shape_error("subgroup spec level count differs from the tower");
    for (index_t j = 0; j < d; ++j) {
        const IntMatrix& t = tower.twists[static_cast<std::size_t>(j)];
        bool identity = t.rows() == 0 || t == identity_like(t.rows());
        if (!identity) {
            if (j != d - 1)
                throw shape_error("non-identity twists are supported at the top level only");
            if (t.rows() != d - 1) throw shape_error("top twist must act on the lower coordinates");
            if (!is_upper_unitriangular(t))
                throw shape_error("twist matrix must be upper-triangular unipotent");
            if (!is_unipotent(t)) throw shape_error("twist matrix fails the unipotence check");
        } else if (t.rows() != 0 && t.rows() != j) {
            throw shape_error("twist matrix size must match the lower tower");
        }
    }
    (void)sub.lattice_matrix(); // validates jumps and correction lengths
    // twisted-automorphism invariance of the lower lattice
    const IntMatrix& top = tower.twists[static_cast<std::size_t>(d - 1)];
    if (d >= 2 && top.rows() != 0 && !(top == identity_like(d - 1))) {
        SubgroupSpec lower{std::vector<SubgroupLevel>(sub.levels.begin(), sub.levels.end() - 1)};
        IntMatrix lprime = column_hnf(lower.lattice_matrix());
        IntMatrix moved = matrix_power(top, sub.levels.back().jump) * lprime;
        if (!lattice_contains(lprime, moved))
            throw shape_error("subgroup is not invariant under the twisted automorphism");
    }
}

// ---------------------------------------------------------------------------
// TowerCover

TowerCover::TowerCover() : k_(0), h_(0, 0) { build_complex(); }

TowerCover::TowerCover(IntMatrix hnf_upper) : k_(hnf_upper.rows()), h_(std::move(hnf_upper)) {
    if (h_.rows() != h_.cols()) throw shape_error("lattice matrix must be square");
    for (index_t j = 0; j < k_; ++j) {
        Int diag = h_.get(j, j);
        if (diag < 1) throw shape_error("lattice matrix must have positive diagonal");
        for (index_t i = j + 1; i < k_; ++i)
            if (h_.get(i, j) != 0) throw shape_error("lattice matrix must be upper triangular");
        radices_.push_back(static_cast<index_t>(diag));
    }
    build_complex();
}

index_t TowerCover::radix(index_t level) const { return radices_[static_cast<std::size_t>(level)]; }

index_t TowerCover::position_count() const {
    index_t p = 1;
    for (index_t r : radices_) p *= r;
    return p;
}

std::vector<Int> TowerCover::reduce(std::vector<Int> pos) const {
    if (static_cast<index_t>(pos.size()) != k_) throw shape_error("position length mismatch");
    for (index_t j = k_ - 1; j >= 0; --j) {
        Int q = floor_div(pos[static_cast<std::size_t>(j)], h_.get(j, j));
        if (q != 0)
            for (index_t i = 0; i <= j; ++i) pos[static_cast<std::size_t>(i)] -= q * h_.get(i, j);
    }
    return pos;
}

namespace {

index_t count_at(const std::vector<std::vector<index_t>>& counts, index_t j, index_t n) {
    if (n < 0 || n > j) return 0;
    return counts[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)];
}

} // namespace

index_t TowerCover::cell_index(const std::vector<Int>& digits, unsigned mask) const {
    index_t idx = 0;
    index_t n = static_cast<index_t>(__builtin_popcount(mask));
    for (index_t j = k_ - 1; j >= 0; --j) {
        const index_t t = (mask >> j) & 1u;
        const index_t s = count_at(counts_, j, n) + count_at(counts_, j, n - 1);
        idx += static_cast<index_t>(digits[static_cast<std::size_t>(j)]) * s;
        if (t) idx += count_at(counts_, j, n);
        n -= t;
    }
    return idx;
}

void TowerCover::decode_position(index_t code, std::vector<Int>& digits) const {
    digits.assign(static_cast<std::size_t>(k_), Int(0));
    for (index_t j = 0; j < k_; ++j) {
        digits[static_cast<std::size_t>(j)] = code % radices_[static_cast<std::size_t>(j)];
        code /= radices_[static_cast<std::size_t>(j)];
    }
}

void TowerCover::build_complex() {
    counts_.assign(static_cast<std::size_t>(k_) + 1, {});
    counts_[0] = {1};
    for (index_t j = 1; j <= k_; ++j) {
        counts_[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(j) + 1, 0);
        for (index_t n = 0; n <= j; ++n)
            counts_[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)] =
                radices_[static_cast<std::size_t>(j - 1)] *
                (count_at(counts_, j - 1, n) + count_at(counts_, j - 1, n - 1));
    }
    std::vector<index_t> dims;
    for (index_t n = 0; n <= k_; ++n) dims.push_back(count_at(counts_, k_, n));
    std::vector<IntMatrix> bnd;
    for (index_t n = 1; n <= k_; ++n)
        bnd.emplace_back(dims[static_cast<std::size_t>(n - 1)], dims[static_cast<std::size_t>(n)]);
    const index_t positions = position_count();
    std::vector<Int> digits, moved;
    for (index_t p = 0; p < positions; ++p) {
        decode_position(p, digits);
        for (unsigned mask = 1; mask < (1u << k_); ++mask) {
            const index_t n = static_cast<index_t>(__builtin_popcount(mask));
            const index_t col = cell_index(digits, mask);
            Int sign(1);
            for (index_t j = 0; j < k_; ++j) {
                if (!((mask >> j) & 1u)) continue;
                const unsigned sub = mask & ~(1u << j);
                moved = digits;
                moved[static_cast<std::size_t>(j)] += 1;
                moved = reduce(std::move(moved));
                bnd[static_cast<std::size_t>(n - 1)].add_at(cell_index(moved, sub), col, sign);
                bnd[static_cast<std::size_t>(n - 1)].add_at(cell_index(digits, sub), col, -sign);
                sign = -sign;
            }
        }
    }
    complex_ = ChainComplex(std::move(dims), std::move(bnd));
}

GradedMap TowerCover::deck_to(const TowerCover& target, const std::vector<Int>& b) const {
    if (target.k_ != k_ || target.radices_ != radices_)
        throw shape_error("deck translation needs matching digit shapes");
    std::vector<IntMatrix> comps;
    for (index_t n = 0; n <= k_; ++n)
        comps.emplace_back(target.complex_.dim(n), complex_.dim(n));
    const index_t positions = position_count();
    std::vector<Int> digits;
    for (index_t p = 0; p < positions; ++p) {
        decode_position(p, digits);
        std::vector<Int> moved = digits;
        for (index_t j = 0; j < k_; ++j) moved[static_cast<std::size_t>(j)] += b[static_cast<std::size_t>(j)];
        moved = target.reduce(std::move(moved));
        for (unsigned mask = 0; mask < (1u << k_); ++mask) {
            const index_t n = static_cast<index_t>(__builtin_popcount(mask));
            comps[static_cast<std::size_t>(n)].add_at(target.cell_index(moved, mask),
                                                      cell_index(digits, mask), Int(1));
        }
    }
    return GradedMap(0, std::move(comps));
}

GradedMap TowerCover::translation_homotopy(const std::vector<Int>& b) const {
    // the straight-line path from 0 to b; the chosen representative matters,
    // it records how the translation winds around the torus
    const std::vector<Int>& bb = b;
    std::vector<IntMatrix> comps;
    for (index_t n = 0; n <= k_; ++n)
        comps.emplace_back(complex_.dim(n + 1), complex_.dim(n));
    const index_t positions = position_count();
    std::vector<Int> digits;
    for (index_t p = 0; p < positions; ++p) {
        decode_position(p, digits);
        for (unsigned mask = 0; mask < (1u << k_); ++mask) {
            const index_t n = static_cast<index_t>(__builtin_popcount(mask));
            const index_t col = cell_index(digits, mask);
            Int sign(1);
            for (index_t j = 0; j < k_; ++j) {
                const bool occupied = (mask >> j) & 1u;
                const Int& bj = bb[static_cast<std::size_t>(j)];
                if (!occupied && bj != 0) {
                    // walk the level-j coordinate, lower levels already moved
                    std::vector<Int> base = digits;
                    for (index_t i = 0; i < j; ++i)
                        base[static_cast<std::size_t>(i)] += bb[static_cast<std::size_t>(i)];
                    const bool forward = bj > 0;
                    Int steps = forward ? bj : Int(-bj);
                    for (Int t(0); t < steps; ++t) {
                        std::vector<Int> cellpos = base;
                        cellpos[static_cast<std::size_t>(j)] += forward ? t : Int(-t - 1);
                        cellpos = reduce(std::move(cellpos));
                        comps[static_cast<std::size_t>(n)].add_at(
                            cell_index(cellpos, mask | (1u << j)), col, forward ? sign : Int(-sign));
                    }
                }
                if (occupied) sign = -sign;
            }
        }
    }
    return GradedMap(1, std::move(comps));
}

GradedMap TowerCover::twist_to(const TowerCover& target, const IntMatrix& u) const {
    if (u.rows() != k_ || u.cols() != k_) throw shape_error("twist matrix size mismatch");
    if (!is_upper_unitriangular(u)) throw shape_error("twist matrix must be upper-triangular unipotent");
    if (target.radices_ != radices_) throw shape_error("twist target has different digit shapes");
    {
        IntMatrix expect = column_hnf(u * h_);
        if (!(expect == target.h_)) throw shape_error("twist target lattice must be the sheared lattice");
    }
    // stage-by-stage assembly over the leading blocks
    std::vector<TowerCover> src_sub, tgt_sub;
    for (index_t j = 0; j <= k_; ++j) {
        IntMatrix sb(j, j), tb(j, j);
        for (index_t r = 0; r < j; ++r)
            for (index_t c = 0; c < j; ++c) {
                if (h_.get(r, c) != 0) sb.set(r, c, h_.get(r, c));
                if (target.h_.get(r, c) != 0) tb.set(r, c, target.h_.get(r, c));
            }
        src_sub.emplace_back(std::move(sb));
        tgt_sub.emplace_back(std::move(tb));
    }
    GradedMap t_map(0, {IntMatrix::identity(1)});
    for (index_t j = 1; j <= k_; ++j) {
        const TowerCover& s_low = src_sub[static_cast<std::size_t>(j - 1)];
        const TowerCover& t_low = tgt_sub[static_cast<std::size_t>(j - 1)];
        const TowerCover& s_cur = src_sub[static_cast<std::size_t>(j)];
        const TowerCover& t_cur = tgt_sub[static_cast<std::size_t>(j)];
        std::vector<Int> shear(static_cast<std::size_t>(j - 1), Int(0));
        for (index_t i = 0; i < j - 1; ++i) shear[static_cast<std::size_t>(i)] = u.get(i, j - 1);
        GradedMap walk = t_low.translation_homotopy(shear);
        std::vector<Int> wrap_b(static_cast<std::size_t>(j - 1), Int(0));
        for (index_t i = 0; i < j - 1; ++i) wrap_b[static_cast<std::size_t>(i)] = -t_cur.h_.get(i, j - 1);
        GradedMap wrap = t_low.deck(wrap_b);
        const index_t rad = radices_[static_cast<std::size_t>(j - 1)];
        std::vector<IntMatrix> comps;
        for (index_t n = 0; n <= j; ++n)
            comps.emplace_back(t_cur.complex().dim(n), s_cur.complex().dim(n));
        for (index_t slot = 0; slot < rad; ++slot) {
            std::vector<Int> shift(static_cast<std::size_t>(j - 1), Int(0));
            for (index_t i = 0; i < j - 1; ++i) shift[static_cast<std::size_t>(i)] = Int(slot) * shear[static_cast<std::size_t>(i)];
            GradedMap a = t_low.deck(shift).compose_after(t_map);
            GradedMap b = walk.compose_after(a);
            if (slot + 1 == rad) b = wrap.compose_after(b);
            for (index_t n = 0; n <= j; ++n) {
                const index_t cnt_n = count_at(s_low.counts_, j - 1, n);
                const index_t cnt_nm1 = count_at(s_low.counts_, j - 1, n - 1);
                const index_t s_block = cnt_n + cnt_nm1;
                const index_t src_base = slot * s_block;
                const index_t tgt_base = slot * s_block;
                const index_t tgt_next_base = ((slot + 1) % rad) * s_block;
                // tag-0 cells carry the sheared lower map in place
                add_block(comps[static_cast<std::size_t>(n)], a.component(n), tgt_base, src_base);
                if (n >= 1 && cnt_nm1 > 0) {
                    // tag-I cells: sheared lower map plus the walk correction
                    add_block(comps[static_cast<std::size_t>(n)], a.component(n - 1),
                              tgt_base + cnt_n, src_base + cnt_n);
                    const Int sign = ((n - 1) % 2 == 0) ? Int(1) : Int(-1);
                    add_block(comps[static_cast<std::size_t>(n)], b.component(n - 1), tgt_next_base,
                              src_base + cnt_n, sign);
                }
            }
        }
        t_map = GradedMap(0, std::move(comps));
    }
    return t_map;
}

// ---------------------------------------------------------------------------
// mapping tori and views

ChainComplex two_block_complex(const ChainComplex& fiber, const GradedMap& horizontal) {
    const index_t d = fiber.top_degree();
    if (!horizontal.is_chain_map(fiber, fiber, d))
        throw shape_error("two-block horizontal data must be a chain self-map");
    std::vector<index_t> dims;
    for (index_t n = 0; n <= d + 1; ++n) dims.push_back(fiber.dim(n) + fiber.dim(n - 1));
    std::vector<IntMatrix> bnd;
    for (index_t n = 1; n <= d + 1; ++n) {
        IntMatrix m(dims[static_cast<std::size_t>(n - 1)], dims[static_cast<std::size_t>(n)]);
        add_block(m, fiber.boundary(n), 0, 0);
        if (fiber.dim(n - 1) > 0) {
            add_block(m, fiber.boundary(n - 1), fiber.dim(n - 1), fiber.dim(n));
            const Int sign = ((n - 1) % 2 == 0) ? Int(1) : Int(-1);
            add_block(m, horizontal.component(n - 1), 0, fiber.dim(n), sign);
        }
        bnd.push_back(std::move(m));
    }
    return ChainComplex(std::move(dims), std::move(bnd));
}

namespace {

GradedMap map_minus_identity(const GradedMap& theta, const ChainComplex& fiber) {
    std::vector<IntMatrix> comps;
    for (index_t n = 0; n <= fiber.top_degree(); ++n)
        comps.push_back(theta.component(n) - IntMatrix::identity(fiber.dim(n)));
    return GradedMap(0, std::move(comps));
}

} // namespace

ChainComplex build_mapping_torus(const MappingTorusSpec& spec) {
    if (!spec.monodromy.is_chain_map(spec.fiber, spec.fiber, spec.fiber.top_degree()))
        throw shape_error("monodromy must be a chain self-map of the fiber");
    return two_block_complex(spec.fiber, map_minus_identity(spec.monodromy, spec.fiber));
}

namespace {

ChainComplex chained_cylinders(const std::vector<ChainComplex>& fibers,
                               const std::vector<GradedMap>& seams) {
    const index_t slots = static_cast<index_t>(fibers.size());
    const ChainComplex& f0 = fibers[0];
    const index_t d = f0.top_degree();
    for (const auto& f : fibers)
        for (index_t n = 0; n <= d; ++n)
            if (f.dim(n) != f0.dim(n)) throw shape_error("cylinder fibers must have equal cell counts");
    for (index_t i = 0; i < slots; ++i)
        if (!seams[static_cast<std::size_t>(i)].is_chain_map(fibers[static_cast<std::size_t>(i)],
                                                             fibers[static_cast<std::size_t>((i + 1) % slots)], d))
            throw shape_error("cylinder seam is not a chain map");
    std::vector<index_t> dims;
    for (index_t n = 0; n <= d + 1; ++n) dims.push_back(slots * (f0.dim(n) + f0.dim(n - 1)));
    auto block = [&](index_t n) { return f0.dim(n) + f0.dim(n - 1); };
    std::vector<IntMatrix> bnd;
    for (index_t n = 1; n <= d + 1; ++n) {
        IntMatrix m(dims[static_cast<std::size_t>(n - 1)], dims[static_cast<std::size_t>(n)]);
        for (index_t i = 0; i < slots; ++i) {
            const ChainComplex& fi = fibers[static_cast<std::size_t>(i)];
            const index_t cb = i * block(n), rb = i * block(n - 1);
            add_block(m, fi.boundary(n), rb, cb);
            if (f0.dim(n - 1) > 0) {
                add_block(m, fi.boundary(n - 1), rb + f0.dim(n - 1), cb + f0.dim(n));
                const Int sign = ((n - 1) % 2 == 0) ? Int(1) : Int(-1);
                add_block(m, seams[static_cast<std::size_t>(i)].component(n - 1),
                          ((i + 1) % slots) * block(n - 1), cb + f0.dim(n), sign);
                add_block(m, IntMatrix::identity(f0.dim(n - 1)), rb, cb + f0.dim(n), -sign);
            }
        }
        bnd.push_back(std::move(m));
    }
    return ChainComplex(std::move(dims), std::move(bnd));
}

} // namespace

LevelView build_level_view(const UnipotentTower& tower, const SubgroupSpec& sub, index_t level) {
    validate(tower, sub);
    if (level < 1 || level > tower.hirsch_length()) throw shape_error("level out of range");
    LevelView view;
    const SubgroupLevel& top = sub.levels[static_cast<std::size_t>(level - 1)];
    view.slots = top.jump;
    SubgroupSpec lower{std::vector<SubgroupLevel>(sub.levels.begin(),
                                                  sub.levels.begin() + (level - 1))};
    IntMatrix lower_lattice = column_hnf(lower.lattice_matrix());
    std::vector<Int> minus_a;
    for (const Int& v : top.correction) minus_a.push_back(-v);
    const IntMatrix& twist = tower.twists[static_cast<std::size_t>(level - 1)];
    const bool has_twist = twist.rows() != 0 && !(twist == identity_like(twist.rows()));
    if (!has_twist) {
        TowerCover fiber(lower_lattice);
        for (index_t i = 0; i < view.slots; ++i) {
            view.fibers.push_back(fiber.complex());
            if (i + 1 < view.slots)
                view.seams.push_back(GradedMap::identity(fiber.complex()));
            else
                view.seams.push_back(fiber.deck(minus_a));
        }
        view.theta1 = fiber.deck(minus_a);
    } else {
        std::vector<TowerCover> covers;
        covers.emplace_back(lower_lattice);
        for (index_t i = 1; i <= view.slots; ++i)
            covers.emplace_back(column_hnf(twist * covers.back().lattice()));
        if (!(covers.back().lattice() == covers.front().lattice()))
            throw shape_error("lattice must return to itself around the twisted level");
        for (index_t i = 0; i < view.slots; ++i) {
            view.fibers.push_back(covers[static_cast<std::size_t>(i)].complex());
            GradedMap seam = covers[static_cast<std::size_t>(i)].twist_to(
                covers[static_cast<std::size_t>(i + 1)], twist);
            if (i + 1 == view.slots)
                seam = covers.front().deck(minus_a).compose_after(seam);
            view.seams.push_back(std::move(seam));
        }
        GradedMap theta1 = view.seams[0];
        for (index_t i = 1; i < view.slots; ++i)
            theta1 = view.seams[static_cast<std::size_t>(i)].compose_after(theta1);
        view.theta1 = std::move(theta1);
    }
    view.total = chained_cylinders(view.fibers, view.seams);
    return view;
}

CoverBuild build_cover(const UnipotentTower& tower, const SubgroupSpec& sub) {
    CoverBuild out;
    for (index_t level = 1; level <= tower.hirsch_length(); ++level) {
        LevelView view = build_level_view(tower, sub, level);
        LevelHandle handle;
        handle.slots = view.slots;
        handle.fiber = view.fibers[0];
        handle.theta1 = view.theta1;
        out.levels.push_back(std::move(handle));
        if (level == tower.hirsch_length()) out.complex = view.total;
    }
    return out;
}

Rebuilding unwind_rebuilding(const LevelView& view) {
    const index_t slots = view.slots;
    const ChainComplex& f0 = view.fibers[0];
    const index_t d = f0.top_degree();
    Rebuilding r;
    r.alpha = view.total.top_degree();
    r.source = view.total;
    r.target = two_block_complex(f0, map_minus_identity(view.theta1, f0));
    // forward transports fibers[i] -> fibers[j] through the seams
    std::vector<std::vector<GradedMap>> transport(static_cast<std::size_t>(slots));
    for (index_t i = 0; i < slots; ++i) {
        transport[static_cast<std::size_t>(i)].push_back(
            GradedMap::identity(view.fibers[static_cast<std::size_t>(i)]));
        for (index_t j = i; j < slots; ++j)
            transport[static_cast<std::size_t>(i)].push_back(
                view.seams[static_cast<std::size_t>(j)].compose_after(
                    transport[static_cast<std::size_t>(i)].back()));
    }
    auto into_slot0 = [&](index_t i) { // fibers[i] -> fibers[0], all the way around
        return transport[static_cast<std::size_t>(i)][static_cast<std::size_t>(slots - i)];
    };
    auto forward = [&](index_t i, index_t j) { // fibers[i] -> fibers[j], i <= j < slots
        return transport[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i)];
    };
    auto block = [&](index_t n) { return f0.dim(n) + f0.dim(n - 1); };
    std::vector<IntMatrix> g, h, rho;
    for (index_t n = 0; n <= d + 1; ++n) {
        IntMatrix gm(r.target.dim(n), r.source.dim(n));
        IntMatrix hm(r.source.dim(n), r.target.dim(n));
        add_block(gm, IntMatrix::identity(block(n)), 0, 0); // slot 0 passes through
        add_block(hm, IntMatrix::identity(f0.dim(n)), 0, 0);
        for (index_t i = 1; i < slots; ++i)
            add_block(gm, into_slot0(i).component(n), 0, i * block(n));
        for (index_t i = 0; i < slots; ++i)
            if (f0.dim(n - 1) > 0)
                add_block(hm, forward(0, i).component(n - 1), i * block(n) + f0.dim(n), f0.dim(n));
        g.push_back(std::move(gm));
        h.push_back(std::move(hm));
    }
    for (index_t n = 0; n <= d; ++n) {
        IntMatrix rm(r.source.dim(n + 1), r.source.dim(n));
        const Int sign = (n % 2 == 0) ? Int(1) : Int(-1);
        for (index_t i = 1; i < slots; ++i)
            for (index_t j = i; j < slots; ++j)
                add_block(rm, forward(i, j).component(n), j * block(n + 1) + f0.dim(n + 1),
                          i * block(n), sign);
        rho.push_back(std::move(rm));
    }
    r.g = GradedMap(0, std::move(g));
    r.h = GradedMap(0, std::move(h));
    r.rho = GradedMap(1, std::move(rho));
    if (!verify(r).empty()) throw shape_error("unwinding failed its chain identities");
    return r;
}

Rebuilding glue_rebuilding(const MappingTorusSpec& torus, const Rebuilding& fiber_reb) {
    if (!(fiber_reb.source == torus.fiber))
        throw shape_error("fiber rebuilding must start at the torus fiber");
    const ChainComplex& f = torus.fiber;
    const ChainComplex& fp = fiber_reb.target;
    const index_t d = f.top_degree();
    GradedMap shifted = map_minus_identity(torus.monodromy, f); // theta - 1
    // missing top components of the fiber data act as zeros of the right shape
    auto fill = [](const GradedMap& m, index_t j, index_t rows, index_t cols) {
        IntMatrix c = m.component(j);
        if (c.rows() == 0 && c.cols() == 0) return IntMatrix(rows, cols);
        if (c.rows() != rows || c.cols() != cols) throw shape_error("fiber map component shape mismatch");
        return c;
    };
    auto kk = [&](index_t n) { return fill(fiber_reb.g, n, fp.dim(n), f.dim(n)); };
    auto ll = [&](index_t n) { return fill(fiber_reb.h, n, f.dim(n), fp.dim(n)); };
    auto sig = [&](index_t n) { return fill(fiber_reb.rho, n, f.dim(n + 1), f.dim(n)); };
    auto sh = [&](index_t n) { return fill(shifted, n, f.dim(n), f.dim(n)); };
    // horizontal on the rebuilt fiber: k (theta - 1) l
    std::vector<IntMatrix> hor;
    for (index_t n = 0; n <= fp.top_degree(); ++n) hor.push_back(kk(n) * sh(n) * ll(n));
    GradedMap horizontal(0, std::move(hor));
    Rebuilding r;
    r.alpha = d + 1;
    r.source = build_mapping_torus(torus);
    r.target = two_block_complex(fp, horizontal);
    std::vector<IntMatrix> g, h, rho;
    for (index_t n = 0; n <= d + 1; ++n) {
        IntMatrix gm(r.target.dim(n), r.source.dim(n));
        IntMatrix hm(r.source.dim(n), r.target.dim(n));
        add_block(gm, kk(n), 0, 0);
        add_block(hm, ll(n), 0, 0);
        if (f.dim(n - 1) > 0) {
            add_block(gm, kk(n - 1), fp.dim(n), f.dim(n));
            add_block(hm, ll(n - 1), f.dim(n), fp.dim(n));
            const Int sign_n = (n % 2 == 0) ? Int(1) : Int(-1);
            add_block(gm, kk(n) * sh(n) * sig(n - 1), 0, f.dim(n), sign_n);
            add_block(hm, sig(n - 1) * sh(n - 1) * ll(n - 1), 0, fp.dim(n), -sign_n);
        }
        g.push_back(std::move(gm));
        h.push_back(std::move(hm));
    }
    for (index_t n = 0; n <= d; ++n) {
        IntMatrix rm(r.source.dim(n + 1), r.source.dim(n));
        add_block(rm, sig(n), 0, 0);
        if (f.dim(n - 1) > 0) {
            add_block(rm, sig(n - 1), f.dim(n + 1), f.dim(n));
            const Int sign_n = (n % 2 == 0) ? Int(1) : Int(-1);
            add_block(rm, sig(n) * sh(n) * sig(n - 1), 0, f.dim(n), sign_n);
        }
        rho.push_back(std::move(rm));
    }
    r.g = GradedMap(0, std::move(g));
    r.h = GradedMap(0, std::move(h));
    r.rho = GradedMap(1, std::move(rho));
    if (!verify(r).empty()) throw shape_error("glued rebuilding failed its chain identities");
    return r;
}

namespace {

Rebuilding rebuild_layer(const UnipotentTower& tower, const SubgroupSpec& sub, index_t level) {
    if (level == 0) return identity_rebuilding(ChainComplex({1}, {}));
    LevelView view = build_level_view(tower, sub, level);
    Rebuilding unwound = unwind_rebuilding(view);
    Rebuilding fiber_reb = rebuild_layer(tower, sub, level - 1);
    MappingTorusSpec torus{view.fibers[0], view.theta1};
    Rebuilding glued = glue_rebuilding(torus, fiber_reb);
    return compose(unwound, glued);
}

} // namespace

Rebuilding rebuild_unipotent(const UnipotentTower& tower, const SubgroupSpec& sub) {
    validate(tower, sub);
    Rebuilding r = rebuild_layer(tower, sub, tower.hirsch_length());
    if (!verify(r).empty()) throw shape_error("composed rebuilding failed its chain identities");
    return r;
}

// ---------------------------------------------------------------------------
// self maps and norm scans

CellularSelfMap unipotent_twist_map(const IntMatrix& u) {
    if (!is_upper_unitriangular(u) || !is_unipotent(u))
        throw shape_error("twist map needs an upper-triangular unipotent matrix");
    TowerCover base(IntMatrix::identity(u.rows()));
    CellularSelfMap out;
    out.complex = base.complex();
    out.theta = base.twist_to(base, u);
    if (!out.theta.is_chain_map(out.complex, out.complex, out.complex.top_degree()))
        throw shape_error("twist self-map is not a chain map");
    return out;
}

CellularSelfMap dehn_twist_torus() {
    IntMatrix shear(2, 2);
    shear.set(0, 0, 1);
    shear.set(0, 1, 1);
    shear.set(1, 1, 1);
    CellularSelfMap out = unipotent_twist_map(shear);
    // homotopy data of the inductive construction: r(v) = e, zero elsewhere
    std::vector<IntMatrix> comps;
    IntMatrix r0(out.complex.dim(1), out.complex.dim(0));
    r0.set(0, 0, 1);
    comps.push_back(std::move(r0));
    comps.emplace_back(out.complex.dim(2), out.complex.dim(1));
    comps.emplace_back(0, out.complex.dim(2));
    out.twist_homotopy = GradedMap(1, std::move(comps));
    return out;
}

NormScan theta_power_norm_scan(const CellularSelfMap& map, index_t m_max) {
    if (m_max < 1) throw shape_error("norm scan needs m_max >= 1");
    if (!map.theta.is_chain_map(map.complex, map.complex, map.complex.top_degree()))
        throw shape_error("norm scan needs a chain self-map");
    NormScan scan;
    GradedMap power = map.theta;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    index_t samples = 0;
    for (index_t m = 1; m <= m_max; ++m) {
        if (m > 1) power = map.theta.compose_after(power);
        // coarse certified upper bound per degree, cheap enough for every m
        double upper = 0.0;
        for (index_t n = 0; n <= map.complex.top_degree(); ++n) {
            const IntMatrix comp = power.component(n);
            if (comp.is_zero()) continue;
            upper = std::max(upper, sqrt_upper(Rat(comp.max_abs_col_sum() * comp.max_abs_row_sum())));
        }
        if (upper == 0.0) upper = 1.0;
        scan.rows.push_back({m, upper});
        if (m >= 2) {
            double x = std::log(static_cast<double>(m));
            double y = std::log(upper);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++samples;
        }
    }
    if (samples >= 2) {
        double denom = samples * sxx - sx * sx;
        if (denom > 1e-12) scan.slope = (samples * sxy - sx * sy) / denom;
    }
    return scan;
}

} // namespace chainreb
