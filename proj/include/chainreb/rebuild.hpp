#pragma once

#include "chainreb/chain_complex.hpp"

#include <string>
#include <vector>

namespace chainreb {

/// A compression of `source` onto the smaller `target`: chain maps g (down)
/// and h (up) valid through degree alpha, and a chain homotopy rho with
/// h g - id = d rho + rho d in degrees 0..alpha-1 as an exact integer
/// identity.
struct Rebuilding {
    index_t alpha = 0;
    ChainComplex source;
    ChainComplex target;
    GradedMap g;   // degree 0, C(source) -> C(target)
    GradedMap h;   // degree 0, C(target) -> C(source)
    GradedMap rho; // degree +1 on C(source)
};

struct Violation {
    index_t degree = 0;
    std::string identity;
};

/// Empty iff every defining identity holds exactly; each violation names the
/// degree and the identity that failed.
std::vector<Violation> verify(const Rebuilding& r);

Rebuilding identity_rebuilding(const ChainComplex& c);

/// Measured quality data at scale T. Cell terms are exact rationals evaluated
/// to double; norm terms use certified upper bounds. kappa_min is the largest
/// constraint value, reported raw and clamped to >= 1.
struct QualityReport {
    double T = 1.0;
    std::vector<double> per_degree_cell_ratio;         // |target_j| * T / |source_j|
    std::vector<double> log_norm_g, log_norm_h, log_norm_rho, log_norm_boundary;
    double kappa_min_raw = 0.0;
    double kappa_min = 1.0; // max(raw, 1)
};

QualityReport quality(const Rebuilding& r, double T, const ResourceCaps& caps = {});

/// g3 = g2 g1, h3 = h1 h2, rho3 = rho1 + h1 rho2 g1 on the overlapping degree
/// range; alpha is the smaller of the two.
Rebuilding compose(const Rebuilding& r1, const Rebuilding& r2);

/// Lifted matrices for carrying a rebuilding to a finite cover. Only the
/// structured families can produce this data; a chain-level rebuilding alone
/// does not determine its lift.
struct CoverLiftData {
    index_t sheets = 1;
    ChainComplex source_cover;
    ChainComplex target_cover;
    GradedMap g, h, rho;
};

struct InducedRebuilding {
    Rebuilding rebuilding;
    double delta = 1.0; // max attaching multiplicity of the base source complex
};

InducedRebuilding induce_to_cover(const Rebuilding& base, const CoverLiftData& lift);

/// Serialization: both complexes in the chain format, then each graded map as
/// degree-tagged triplet blocks.
void write_rebuilding(std::ostream& os, const Rebuilding& r);
Rebuilding read_rebuilding(std::istream& is);

} // namespace chainreb
