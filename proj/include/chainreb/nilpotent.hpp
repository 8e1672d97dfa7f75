#pragma once

#include "chainreb/rebuild.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chainreb {

/// Column-style Hermite normal form of a nonsingular integer matrix: upper
/// triangular, positive diagonal, entries right of the diagonal reduced into
/// [0, diagonal) row-wise. The column lattice is unchanged.
IntMatrix column_hnf(const IntMatrix& m);

/// One Z-extension step of a finite-index subgroup: the jump along the new
/// generator and a correction element in the coordinates of the lower levels.
struct SubgroupLevel {
    index_t jump = 1;
    std::vector<Int> correction; // length = level index (0-based)
};

struct SubgroupSpec {
    std::vector<SubgroupLevel> levels; // innermost first
    Int index() const;
    /// Generator matrix: column j is (correction_j, jump_j, 0...), upper
    /// triangular by construction.
    IntMatrix lattice_matrix() const;
};

/// Canonical level decomposition of the column lattice of a d x d integer
/// matrix, via Hermite normal form.
SubgroupSpec subgroup_from_hnf(const IntMatrix& generators);

/// Parses the textual format: a "tower <name>" line, then one
/// "level l=<int> a=<ints>" line per level, or "hnf" followed by d rows of d
/// integers.
SubgroupSpec parse_subgroup(std::istream& is);
void write_subgroup(std::ostream& os, const SubgroupSpec& spec, const std::string& tower_name);

/// Iterated Z-extension tower. twists[j] is the automorphism matrix of level
/// j+1 acting on the coordinates of levels 1..j; an empty matrix means the
/// identity. Construction requires every non-identity twist to sit at the top
/// level over an abelian lower tower, upper-triangular unipotent.
struct UnipotentTower {
    std::vector<IntMatrix> twists;

    index_t hirsch_length() const { return static_cast<index_t>(twists.size()); }
    bool is_abelian() const;

    static UnipotentTower free_abelian(index_t d);
    static UnipotentTower heisenberg();
    static UnipotentTower twisted(index_t hirsch, IntMatrix top);
};

/// True iff the characteristic polynomial is (x-1)^k, checked exactly.
bool is_unipotent(const IntMatrix& u);

/// Throws unless the tower is supported and the subgroup data is compatible
/// with it (per-level twisted-automorphism invariance).
void validate(const UnipotentTower& tower, const SubgroupSpec& sub);

/// Cubical cover complex of a free abelian tower with respect to a sublattice
/// in column Hermite form. Cells are (position digits, direction set); the
/// basis order is level-major from the outermost level down: digit, then
/// interval tag, then the lower cell.
class TowerCover {
public:
    TowerCover(); // the point (zero levels)
    explicit TowerCover(IntMatrix hnf_upper);

    index_t levels() const { return k_; }
    const IntMatrix& lattice() const { return h_; }
    const ChainComplex& complex() const { return complex_; }
    index_t radix(index_t level) const;
    index_t position_count() const;

    std::vector<Int> reduce(std::vector<Int> pos) const;
    index_t cell_index(const std::vector<Int>& digits, unsigned mask) const;

    /// Deck translation by b as a chain map onto `target` (same radices).
    GradedMap deck_to(const TowerCover& target, const std::vector<Int>& b) const;
    GradedMap deck(const std::vector<Int>& b) const { return deck_to(*this, b); }
    /// Chain homotopy from the identity to deck(b).
    GradedMap translation_homotopy(const std::vector<Int>& b) const;
    /// Cellular chain map covering the upper-triangular unipotent map u;
    /// target must carry the lattice hnf(u * lattice).
    GradedMap twist_to(const TowerCover& target, const IntMatrix& u) const;

private:
    index_t k_ = 0;
    IntMatrix h_;
    std::vector<index_t> radices_;
    std::vector<std::vector<index_t>> counts_; // counts_[j][n] = degree-n cells of the level-j subcover
    ChainComplex complex_;

    void decode_position(index_t code, std::vector<Int>& digits) const;
    void build_complex();
};

/// A chain self-map of a complex; `twist_homotopy` carries the degree +1 data
/// used when the map feeds the iterated mapping-torus construction.
struct CellularSelfMap {
    ChainComplex complex;
    GradedMap theta;
    std::optional<GradedMap> twist_homotopy;
};

/// The one-vertex torus with the shear self-map: theta(v) = v, theta(e) = e,
/// theta(f) = f + e, theta(q) = q; the homotopy data is r(v) = e, r on the
/// other cells zero.
CellularSelfMap dehn_twist_torus();

/// Shear self-map of the one-position torus of rank k covering the
/// upper-triangular unipotent matrix u.
CellularSelfMap unipotent_twist_map(const IntMatrix& u);

struct MappingTorusSpec {
    ChainComplex fiber;
    GradedMap monodromy;
};

/// Two copies of the fiber per degree with d(c x I) = dc x I +
/// (-1)^deg(c) (horizontal(c)) x {0}; requires `horizontal` to be a chain map.
ChainComplex two_block_complex(const ChainComplex& fiber, const GradedMap& horizontal);

/// Mapping torus of a chain self-map: two_block with horizontal theta - 1.
ChainComplex build_mapping_torus(const MappingTorusSpec& spec);

/// The chained-cylinder structure of a cover at its outermost level.
struct LevelView {
    index_t slots = 1;
    std::vector<ChainComplex> fibers; // per slot
    std::vector<GradedMap> seams;     // seams[i]: fibers[i] -> fibers[(i+1) % slots]
    GradedMap theta1;                 // composite around the circle, fibers[0] -> fibers[0]
    ChainComplex total;
};

/// View of the cover of the first `level` levels at its top; level defaults
/// to the full tower.
LevelView build_level_view(const UnipotentTower& tower, const SubgroupSpec& sub, index_t level);

struct LevelHandle {
    index_t slots = 1;
    ChainComplex fiber;
    GradedMap theta1;
};

struct CoverBuild {
    ChainComplex complex;
    std::vector<LevelHandle> levels; // innermost first
};

CoverBuild build_cover(const UnipotentTower& tower, const SubgroupSpec& sub);

/// Collapses the chained cylinders onto the mapping torus of the composite
/// seam map. Always returns a rebuilding that passes verify().
Rebuilding unwind_rebuilding(const LevelView& view);

/// Replaces the fiber of a mapping torus by a rebuilt fiber, yielding the
/// twisted double cylinder over the small fiber.
Rebuilding glue_rebuilding(const MappingTorusSpec& torus, const Rebuilding& fiber_reb);

/// Full recursive compression of the cover: unwind the top level, rebuild the
/// fiber recursively, glue, compose.
Rebuilding rebuild_unipotent(const UnipotentTower& tower, const SubgroupSpec& sub);

struct NormScanRow {
    index_t power = 1;
    double upper = 1.0;
};

struct NormScan {
    std::vector<NormScanRow> rows;
    double slope = 0.0; // least squares of log(upper) against log(power)
};

NormScan theta_power_norm_scan(const CellularSelfMap& map, index_t m_max);

} // namespace chainreb
