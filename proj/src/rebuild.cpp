#include "chainreb/rebuild.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace chainreb {

namespace {

// Missing components act as zero matrices of the contextual shape.
IntMatrix comp_of(const GradedMap& m, index_t j, index_t rows, index_t cols) {
    IntMatrix c = m.component(j);
    if (c.rows() == 0 && c.cols() == 0) return IntMatrix(rows, cols);
    if (c.rows() != rows || c.cols() != cols) throw shape_error("graded map component shape mismatch");
    return c;
}

} // namespace

std::vector<Violation> verify(const Rebuilding& r) {
    std::vector<Violation> out;
    const index_t alpha = r.alpha;
    const ChainComplex& s = r.source;
    const ChainComplex& t = r.target;
    auto gj = [&](index_t j) { return comp_of(r.g, j, t.dim(j), s.dim(j)); };
    auto hj = [&](index_t j) { return comp_of(r.h, j, s.dim(j), t.dim(j)); };
    auto rhoj = [&](index_t j) { return comp_of(r.rho, j, s.dim(j + 1), s.dim(j)); };
    for (index_t j = 1; j <= alpha; ++j) {
        if (t.boundary(j) * gj(j) != gj(j - 1) * s.boundary(j)) out.push_back({j, "g chain map"});
        if (s.boundary(j) * hj(j) != hj(j - 1) * t.boundary(j)) out.push_back({j, "h chain map"});
    }
    for (index_t j = 0; j <= alpha - 1; ++j) {
        IntMatrix lhs = hj(j) * gj(j) - IntMatrix::identity(s.dim(j));
        IntMatrix rhs = s.boundary(j + 1) * rhoj(j);
        if (j >= 1) rhs = rhs + rhoj(j - 1) * s.boundary(j);
        if (lhs != rhs) out.push_back({j, "homotopy h g - 1 = d rho + rho d"});
    }
    return out;
}

Rebuilding identity_rebuilding(const ChainComplex& c) {
    Rebuilding r;
    r.alpha = c.top_degree();
    r.source = c;
    r.target = c;
    r.g = GradedMap::identity(c);
    r.h = GradedMap::identity(c);
    r.rho = GradedMap::zero_homotopy(c, c);
    return r;
}

namespace {

double log_upper_norm(const IntMatrix& m, const ResourceCaps& caps) {
    if (m.is_zero()) return 0.0;
    NormEstimate est = operator_norm(m, 1e-2, caps);
    return est.upper > 0 ? std::log(est.upper) : 0.0;
}

} // namespace

QualityReport quality(const Rebuilding& r, double T, const ResourceCaps& caps) {
    if (T < 1.0) throw shape_error("quality scale T must be >= 1");
    QualityReport rep;
    rep.T = T;
    const index_t alpha = r.alpha;
    const double denom = 1.0 + std::log(T);
    double worst = 0.0;
    for (index_t j = 0; j <= alpha; ++j) {
        double ratio = r.source.dim(j) > 0
                           ? static_cast<double>(r.target.dim(j)) * T / static_cast<double>(r.source.dim(j))
                           : 0.0;
        rep.per_degree_cell_ratio.push_back(ratio);
        double lg = log_upper_norm(comp_of(r.g, j, r.target.dim(j), r.source.dim(j)), caps);
        double lh = log_upper_norm(comp_of(r.h, j, r.source.dim(j), r.target.dim(j)), caps);
        double lb = log_upper_norm(r.target.boundary(j), caps);
        double lr = (j <= alpha - 1)
                        ? log_upper_norm(comp_of(r.rho, j, r.source.dim(j + 1), r.source.dim(j)), caps)
                        : 0.0;
        rep.log_norm_g.push_back(lg);
        rep.log_norm_h.push_back(lh);
        rep.log_norm_boundary.push_back(lb);
        if (j <= alpha - 1) rep.log_norm_rho.push_back(lr);
        worst = std::max({worst, ratio, lg / denom, lh / denom, lb / denom, lr / denom});
    }
    rep.kappa_min_raw = worst;
    rep.kappa_min = std::max(worst, 1.0);
    return rep;
}

Rebuilding compose(const Rebuilding& r1, const Rebuilding& r2) {
    if (!(r1.target == r2.source)) throw shape_error("compose: r1.target differs from r2.source");
    Rebuilding r;
    r.alpha = std::min(r1.alpha, r2.alpha);
    r.source = r1.source;
    r.target = r2.target;
    std::vector<IntMatrix> g, h, rho;
    auto g1 = [&](index_t j) { return comp_of(r1.g, j, r1.target.dim(j), r1.source.dim(j)); };
    auto h1 = [&](index_t j) { return comp_of(r1.h, j, r1.source.dim(j), r1.target.dim(j)); };
    auto g2 = [&](index_t j) { return comp_of(r2.g, j, r2.target.dim(j), r2.source.dim(j)); };
    auto h2 = [&](index_t j) { return comp_of(r2.h, j, r2.source.dim(j), r2.target.dim(j)); };
    for (index_t j = 0; j <= r.alpha; ++j) {
        g.push_back(g2(j) * g1(j));
        h.push_back(h1(j) * h2(j));
    }
    for (index_t j = 0; j <= r.alpha - 1; ++j) {
        IntMatrix rho2j = comp_of(r2.rho, j, r2.source.dim(j + 1), r2.source.dim(j));
        IntMatrix rho1j = comp_of(r1.rho, j, r1.source.dim(j + 1), r1.source.dim(j));
        rho.push_back(rho1j + h1(j + 1) * rho2j * g1(j));
    }
    r.g = GradedMap(0, std::move(g));
    r.h = GradedMap(0, std::move(h));
    r.rho = GradedMap(1, std::move(rho));
    return r;
}

InducedRebuilding induce_to_cover(const Rebuilding& base, const CoverLiftData& lift) {
    if (lift.sheets < 1) throw shape_error("cover must have at least one sheet");
    for (index_t j = 0; j <= base.alpha; ++j) {
        if (lift.source_cover.dim(j) != lift.sheets * base.source.dim(j) ||
            lift.target_cover.dim(j) != lift.sheets * base.target.dim(j))
            throw shape_error("cover cell counts do not match the sheet number");
    }
    InducedRebuilding out;
    out.rebuilding.alpha = base.alpha;
    out.rebuilding.source = lift.source_cover;
    out.rebuilding.target = lift.target_cover;
    out.rebuilding.g = lift.g;
    out.rebuilding.h = lift.h;
    out.rebuilding.rho = lift.rho;
    // max attaching multiplicity of the base source: largest column l1 mass
    Int delta(1);
    for (index_t j = 1; j <= base.source.top_degree(); ++j)
        delta = std::max(delta, base.source.boundary(j).max_abs_col_sum());
    out.delta = static_cast<double>(delta);
    return out;
}

namespace {

void write_graded(std::ostream& os, const char* name, const GradedMap& m) {
    os << "map " << name << ' ' << m.degree_shift() << ' ' << (m.max_degree() + 1) << '\n';
    for (index_t j = 0; j <= m.max_degree(); ++j) {
        os << "degree " << j << '\n';
        m.component(j).write_triplets(os);
    }
}

GradedMap read_graded(std::istream& is, const std::string& expect_name) {
    std::string kw, name;
    int shift = 0;
    index_t count = 0;
    if (!(is >> kw >> name >> shift >> count) || kw != "map" || name != expect_name)
        throw parse_error("bad graded map header");
    std::vector<IntMatrix> comps;
    for (index_t j = 0; j < count; ++j) {
        index_t deg = 0;
        if (!(is >> kw >> deg) || kw != "degree" || deg != j) throw parse_error("bad degree tag");
        comps.push_back(IntMatrix::read_triplets(is));
    }
    return GradedMap(shift, std::move(comps));
}

} // namespace

void write_rebuilding(std::ostream& os, const Rebuilding& r) {
    os << "# rebuilding\nalpha " << r.alpha << '\n';
    r.source.write(os);
    r.target.write(os);
    write_graded(os, "g", r.g);
    write_graded(os, "h", r.h);
    write_graded(os, "rho", r.rho);
}

Rebuilding read_rebuilding(std::istream& is) {
    Rebuilding r;
    std::string line;
    // skip comments up to the alpha line
    while (std::getline(is, line)) {
        auto i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        std::stringstream ss(line);
        std::string kw;
        if (!(ss >> kw >> r.alpha) || kw != "alpha") throw parse_error("missing alpha header");
        break;
    }
    r.source = ChainComplex::read(is);
    r.target = ChainComplex::read(is);
    r.g = read_graded(is, "g");
    r.h = read_graded(is, "h");
    r.rho = read_graded(is, "rho");
    return r;
}

} // namespace chainreb
