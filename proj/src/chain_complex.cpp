#include "chainreb/chain_complex.hpp"

#include "chainreb/pseudodet.hpp"
#include "chainreb/smith.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace chainreb {

ChainComplex::ChainComplex(std::vector<index_t> dims, std::vector<IntMatrix> boundaries,
                           std::vector<std::vector<std::string>> cell_labels)
    : dims_(std::move(dims)), boundaries_(std::move(boundaries)), labels_(std::move(cell_labels)) {
    if (dims_.empty()) throw shape_error("a complex needs at least degree 0");
    const index_t d = top_degree();
    if (static_cast<index_t>(boundaries_.size()) != d)
        throw shape_error("expected one boundary matrix per degree 1..top");
    for (index_t j = 1; j <= d; ++j) {
        const IntMatrix& b = boundaries_[static_cast<std::size_t>(j - 1)];
        if (b.rows() != dim(j - 1) || b.cols() != dim(j))
            throw shape_error("boundary shape mismatch in degree " + std::to_string(j));
    }
    for (index_t j = 1; j + 1 <= d; ++j) {
        IntMatrix sq = boundaries_[static_cast<std::size_t>(j - 1)] * boundaries_[static_cast<std::size_t>(j)];
        if (!sq.is_zero())
            throw shape_error("boundary square is nonzero between degrees " + std::to_string(j + 1) +
                              " and " + std::to_string(j - 1));
    }
    if (!labels_.empty() && static_cast<index_t>(labels_.size()) != d + 1)
        throw shape_error("cell label table has the wrong number of degrees");
}

index_t ChainComplex::dim(index_t j) const {
    if (j < 0 || j > top_degree()) return 0;
    return dims_[static_cast<std::size_t>(j)];
}

IntMatrix ChainComplex::boundary(index_t j) const {
    if (j >= 1 && j <= top_degree()) return boundaries_[static_cast<std::size_t>(j - 1)];
    return IntMatrix(dim(j - 1), dim(j));
}

const std::string& ChainComplex::cell_label(index_t j, index_t i) const {
    static const std::string empty;
    if (labels_.empty() || j < 0 || j > top_degree()) return empty;
    const auto& per_degree = labels_[static_cast<std::size_t>(j)];
    if (i < 0 || i >= static_cast<index_t>(per_degree.size())) return empty;
    return per_degree[static_cast<std::size_t>(i)];
}

bool ChainComplex::operator==(const ChainComplex& other) const {
    return dims_ == other.dims_ && boundaries_ == other.boundaries_;
}

void ChainComplex::write(std::ostream& os) const {
    os << "# chain complex\n" << top_degree() << '\n';
    for (index_t j = 0; j <= top_degree(); ++j) os << dim(j) << '\n';
    for (index_t j = 1; j <= top_degree(); ++j) boundary(j).write_triplets(os);
}

namespace {

// Skips blank lines and '#' comments, returns the next payload line.
bool next_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos) continue;
        if (line[i] == '#') continue;
        return true;
    }
    return false;
}

} // namespace

ChainComplex ChainComplex::read(std::istream& is) {
    std::string line;
    if (!next_line(is, line)) throw parse_error("missing top degree");
    index_t d = std::stoll(line);
    if (d < 0) throw parse_error("negative top degree");
    std::vector<index_t> dims;
    for (index_t j = 0; j <= d; ++j) {
        if (!next_line(is, line)) throw parse_error("missing dimension line");
        dims.push_back(std::stoll(line));
    }
    std::vector<IntMatrix> boundaries;
    for (index_t j = 1; j <= d; ++j) {
        // triplet blocks may be interleaved with comments
        std::stringstream clean;
        if (!next_line(is, line)) throw parse_error("missing triplet header");
        clean << line << '\n';
        index_t rows, cols, nnz;
        {
            std::stringstream hs(line);
            if (!(hs >> rows >> cols >> nnz)) throw parse_error("bad triplet header");
        }
        for (index_t i = 0; i < nnz; ++i) {
            if (!next_line(is, line)) throw parse_error("truncated triplet block");
            clean << line << '\n';
        }
        boundaries.push_back(IntMatrix::read_triplets(clean));
    }
    return ChainComplex(std::move(dims), std::move(boundaries));
}

GradedMap::GradedMap(int degree_shift, std::vector<IntMatrix> components)
    : shift_(degree_shift), components_(std::move(components)) {}

GradedMap GradedMap::identity(const ChainComplex& c) {
    std::vector<IntMatrix> comps;
    for (index_t j = 0; j <= c.top_degree(); ++j) comps.push_back(IntMatrix::identity(c.dim(j)));
    return GradedMap(0, std::move(comps));
}

GradedMap GradedMap::zero_homotopy(const ChainComplex& source, const ChainComplex& target) {
    std::vector<IntMatrix> comps;
    for (index_t j = 0; j <= source.top_degree(); ++j)
        comps.emplace_back(target.dim(j + 1), source.dim(j));
    return GradedMap(1, std::move(comps));
}

IntMatrix GradedMap::component(index_t j) const {
    if (j < 0 || j >= static_cast<index_t>(components_.size())) return IntMatrix(0, 0);
    return components_[static_cast<std::size_t>(j)];
}

void GradedMap::set_component(index_t j, IntMatrix m) {
    if (j < 0) throw shape_error("negative degree");
    if (j >= static_cast<index_t>(components_.size()))
        components_.resize(static_cast<std::size_t>(j) + 1);
    components_[static_cast<std::size_t>(j)] = std::move(m);
}

bool GradedMap::shapes_match(const ChainComplex& source, const ChainComplex& target, index_t upto) const {
    for (index_t j = 0; j <= upto; ++j) {
        IntMatrix m = component(j);
        if (m.rows() == 0 && m.cols() == 0) continue; // treated as zero
        if (m.cols() != source.dim(j) || m.rows() != target.dim(j + shift_)) return false;
    }
    return true;
}

bool GradedMap::is_chain_map(const ChainComplex& source, const ChainComplex& target, index_t upto) const {
    if (shift_ != 0) return false;
    if (!shapes_match(source, target, upto)) return false;
    for (index_t j = 1; j <= upto; ++j) {
        if (target.boundary(j) * component(j) != component(j - 1) * source.boundary(j)) return false;
    }
    return true;
}

GradedMap GradedMap::compose_after(const GradedMap& first) const {
    std::vector<IntMatrix> comps;
    const index_t upto = first.max_degree();
    for (index_t j = 0; j <= upto; ++j)
        comps.push_back(component(j + first.shift_) * first.component(j));
    return GradedMap(shift_ + first.shift_, std::move(comps));
}

GradedMap GradedMap::operator+(const GradedMap& other) const {
    if (shift_ != other.shift_) throw shape_error("graded map sum with mismatched shifts");
    std::vector<IntMatrix> comps;
    const index_t upto = std::max(max_degree(), other.max_degree());
    for (index_t j = 0; j <= upto; ++j) {
        IntMatrix a = component(j), b = other.component(j);
        if (a.rows() == 0 && a.cols() == 0)
            comps.push_back(b);
        else if (b.rows() == 0 && b.cols() == 0)
            comps.push_back(a);
        else
            comps.push_back(a + b);
    }
    return GradedMap(shift_, std::move(comps));
}

HomologyResult homology(const ChainComplex& c, index_t degree, const std::vector<std::int64_t>& primes,
                        const ResourceCaps& caps) {
    if (degree < 0 || degree > c.top_degree())
        throw shape_error("homology degree out of range");
    HomologyResult out;
    out.degree = degree;
    out.truncated = (degree == c.top_degree());
    IntMatrix below = c.boundary(degree);      // d_j
    IntMatrix above = c.boundary(degree + 1);  // d_{j+1}
    index_t rank_below = below.is_zero() ? 0 : rank_over_q(below, caps);
    std::vector<Int> above_factors = above.is_zero() ? std::vector<Int>{} : invariant_factors(above, caps);
    out.betti_rational = c.dim(degree) - rank_below - static_cast<index_t>(above_factors.size());
    for (const Int& f : above_factors)
        if (f > 1) {
            out.torsion_factors.push_back(f);
            out.torsion_order *= f;
            out.log_torsion += std::log(static_cast<double>(f));
        }
    for (std::int64_t p : primes) {
        index_t rb = below.is_zero() ? 0 : rank_mod_p(below, p);
        index_t ra = above.is_zero() ? 0 : rank_mod_p(above, p);
        out.betti_mod_p.emplace_back(p, c.dim(degree) - rb - ra);
    }
    return out;
}

double gabber_bound(const ChainComplex& c, index_t degree, const ResourceCaps& caps) {
    if (degree < 0 || degree >= c.top_degree())
        throw shape_error("gabber_bound degree out of range");
    IntMatrix above = c.boundary(degree + 1);
    if (above.is_zero()) return 0.0;
    NormEstimate est = operator_norm(above, 1e-2, caps);
    double log_norm = est.upper > 0 ? std::log(est.upper) : 0.0;
    return static_cast<double>(c.dim(degree)) * std::max(log_norm, 0.0);
}

GabberReport check_gabber(const ChainComplex& c, index_t degree, const ResourceCaps& caps) {
    GabberReport rep;
    rep.bound = gabber_bound(c, degree, caps);
    rep.log_torsion = homology(c, degree, {}, caps).log_torsion;
    // the bound is computed from a certified upper norm, so a genuine
    // violation can only come from homology itself
    rep.holds = rep.log_torsion <= rep.bound + 1e-9;
    return rep;
}

CokernelBoundReport check_cokernel_bound(const IntMatrix& f, const ResourceCaps& caps) {
    CokernelBoundReport rep;
    for (const Int& d : invariant_factors(f, caps)) rep.torsion_order *= d;
    rep.pseudo_det_squared = pseudo_determinant_squared(f, caps);
    rep.holds = rep.torsion_order * rep.torsion_order <= rep.pseudo_det_squared;
    return rep;
}

ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b) {
    const index_t d = std::max(a.top_degree(), b.top_degree());
    std::vector<index_t> dims;
    std::vector<IntMatrix> bnd;
    for (index_t j = 0; j <= d; ++j) dims.push_back(a.dim(j) + b.dim(j));
    for (index_t j = 1; j <= d; ++j) {
        IntMatrix m(dims[static_cast<std::size_t>(j - 1)], dims[static_cast<std::size_t>(j)]);
        IntMatrix ma = a.boundary(j), mb = b.boundary(j);
        for (index_t r = 0; r < ma.rows(); ++r)
            for (const auto& [cc, v] : ma.row(r)) m.set(r, cc, v);
        for (index_t r = 0; r < mb.rows(); ++r)
            for (const auto& [cc, v] : mb.row(r)) m.set(a.dim(j - 1) + r, a.dim(j) + cc, v);
        bnd.push_back(std::move(m));
    }
    return ChainComplex(std::move(dims), std::move(bnd));
}

ChainComplex shift(const ChainComplex& c, index_t by) {
    if (by < 0) throw shape_error("negative shift");
    std::vector<index_t> dims(static_cast<std::size_t>(by), 0);
    for (index_t j = 0; j <= c.top_degree(); ++j) dims.push_back(c.dim(j));
    std::vector<IntMatrix> bnd;
    for (index_t j = 1; j <= c.top_degree() + by; ++j) bnd.emplace_back(0, 0);
    for (index_t j = 1; j <= c.top_degree() + by; ++j) {
        index_t src = j - by;
        if (src >= 1)
            bnd[static_cast<std::size_t>(j - 1)] = c.boundary(src);
        else
            bnd[static_cast<std::size_t>(j - 1)] =
                IntMatrix(dims[static_cast<std::size_t>(j - 1)], dims[static_cast<std::size_t>(j)]);
    }
    return ChainComplex(std::move(dims), std::move(bnd));
}

ChainComplex tensor_with_interval(const ChainComplex& c) {
    const index_t d = c.top_degree();
    // degree j cells: c_j x {0}, c_j x {1}, c_{j-1} x I  (in that order)
    std::vector<index_t> dims;
    for (index_t j = 0; j <= d + 1; ++j) dims.push_back(2 * c.dim(j) + c.dim(j - 1));
    std::vector<IntMatrix> bnd;
    for (index_t j = 1; j <= d + 1; ++j) {
        IntMatrix m(dims[static_cast<std::size_t>(j - 1)], dims[static_cast<std::size_t>(j)]);
        IntMatrix cb = c.boundary(j);
        const index_t n0 = c.dim(j), n0_prev = c.dim(j - 1);
        // the two endpoint copies
        for (index_t r = 0; r < cb.rows(); ++r)
            for (const auto& [cc, v] : cb.row(r)) {
                m.set(r, cc, v);
                m.set(n0_prev + r, n0 + cc, v);
            }
        // cylinder cells: d(c x I) = dc x I + (-1)^{deg c} (c x {1} - c x {0})
        IntMatrix cb_prev = c.boundary(j - 1);
        const Int sign = ((j - 1) % 2 == 0) ? Int(1) : Int(-1);
        for (index_t i = 0; i < c.dim(j - 1); ++i) {
            m.add_at(i, 2 * n0 + i, -sign);
            m.add_at(n0_prev + i, 2 * n0 + i, sign);
        }
        for (index_t r = 0; r < cb_prev.rows(); ++r)
            for (const auto& [cc, v] : cb_prev.row(r)) m.add_at(2 * n0_prev + r, 2 * n0 + cc, v);
        bnd.push_back(std::move(m));
    }
    return ChainComplex(std::move(dims), std::move(bnd));
}

} // namespace chainreb
