#pragma once

#include "chainreb/caps.hpp"
#include "chainreb/int_matrix.hpp"
#include "chainreb/norm.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chainreb {

/// A finite cellular chain complex over the integers: ranks per degree and
/// boundary matrices d_j : C_j -> C_{j-1} for j = 1..top_degree, with
/// d_j d_{j+1} = 0 validated at construction.
class ChainComplex {
public:
    ChainComplex() = default;
    /// dims has top_degree+1 entries; boundaries[j-1] is d_j.
    ChainComplex(std::vector<index_t> dims, std::vector<IntMatrix> boundaries,
                 std::vector<std::vector<std::string>> cell_labels = {});

    index_t top_degree() const { return static_cast<index_t>(dims_.size()) - 1; }
    index_t dim(index_t j) const;
    const std::vector<index_t>& dims() const { return dims_; }
    /// d_j for 1 <= j <= top_degree; callers outside that range get a zero
    /// matrix of the right shape.
    IntMatrix boundary(index_t j) const;
    const std::vector<std::vector<std::string>>& cell_labels() const { return labels_; }
    const std::string& cell_label(index_t j, index_t i) const;

    bool operator==(const ChainComplex& other) const;

    void write(std::ostream& os) const;
    static ChainComplex read(std::istream& is);

private:
    std::vector<index_t> dims_;
    std::vector<IntMatrix> boundaries_;
    std::vector<std::vector<std::string>> labels_;
};

/// Degree-indexed family of matrices between two complexes; degree_shift 0
/// for chain maps and +1 for chain homotopies. component(j) maps C_j(source)
/// to C_{j+shift}(target). Components outside the stored range are zero.
class GradedMap {
public:
    GradedMap() = default;
    GradedMap(int degree_shift, std::vector<IntMatrix> components);

    static GradedMap identity(const ChainComplex& c);
    static GradedMap zero_homotopy(const ChainComplex& source, const ChainComplex& target);

    int degree_shift() const { return shift_; }
    index_t max_degree() const { return static_cast<index_t>(components_.size()) - 1; }
    IntMatrix component(index_t j) const;
    void set_component(index_t j, IntMatrix m);

    /// Checks shapes against the two complexes through degree `upto`.
    bool shapes_match(const ChainComplex& source, const ChainComplex& target, index_t upto) const;
    /// Chain-map identity d^tgt_j f_j = f_{j-1} d^src_j for 1 <= j <= upto.
    bool is_chain_map(const ChainComplex& source, const ChainComplex& target, index_t upto) const;

    GradedMap compose_after(const GradedMap& first) const; // this o first
    GradedMap operator+(const GradedMap& other) const;

private:
    int shift_ = 0;
    std::vector<IntMatrix> components_;
};

/// Homology of one degree. `truncated` marks the top degree, where the answer
/// is the homology of the truncated complex (no cells above contribute).
struct HomologyResult {
    index_t degree = 0;
    index_t betti_rational = 0;
    std::vector<std::pair<std::int64_t, index_t>> betti_mod_p;
    std::vector<Int> torsion_factors; // divisibility chain, each > 1
    double log_torsion = 0.0;
    Int torsion_order = 1;
    bool truncated = false;
};

HomologyResult homology(const ChainComplex& c, index_t degree,
                        const std::vector<std::int64_t>& primes = {},
                        const ResourceCaps& caps = {});

/// All degrees at once; each boundary matrix is diagonalized a single time.
std::vector<HomologyResult> homology_all(const ChainComplex& c,
                                         const std::vector<std::int64_t>& primes = {},
                                         const ResourceCaps& caps = {});

/// dims[j] * max(log upper bound of |d_{j+1}|, 0); a sound upper bound for
/// the log of the torsion order of H_j.
double gabber_bound(const ChainComplex& c, index_t degree, const ResourceCaps& caps = {});

struct GabberReport {
    double log_torsion = 0.0;
    double bound = 0.0;
    bool holds = false;
};

GabberReport check_gabber(const ChainComplex& c, index_t degree, const ResourceCaps& caps = {});

struct CokernelBoundReport {
    Int torsion_order = 1;
    Int pseudo_det_squared = 1;
    bool holds = false;
};

/// Verifies |coker(f)_tors|^2 <= det'(f)^2 exactly.
CokernelBoundReport check_cokernel_bound(const IntMatrix& f, const ResourceCaps& caps = {});

ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b);
ChainComplex shift(const ChainComplex& c, index_t by);
/// C x [0,1] on the three-block basis (c x {0}, c x {1}, c x I), the
/// interval factor carrying the boundary sign.
ChainComplex tensor_with_interval(const ChainComplex& c);

} // namespace chainreb
