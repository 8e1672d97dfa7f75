#pragma once

#include "chainreb/rebuild.hpp"

#include <string>
#include <vector>

namespace chainreb {

struct BaseCell {
    std::string id;
    index_t dim = 0;
};

/// A complex fibered over a finite base: one chain complex per base cell and
/// horizontal blocks between fibers of strictly decreasing base dimension.
/// The block from e to e' (dim e' < dim e) lowers total degree by one, so its
/// fiber-degree components map C_j(F_e) to C_{j + dim e - dim e' - 1}(F_e').
struct StackComplex {
    std::vector<BaseCell> base;
    std::vector<ChainComplex> fibers; // parallel to base
    struct HorizontalBlock {
        index_t src = 0; // index into base
        index_t tgt = 0;
        GradedMap map; // components indexed by source fiber degree
    };
    std::vector<HorizontalBlock> horizontal;

    index_t base_index(const std::string& id) const;
};

/// Basis layout of the assembled total complex: base-cell major (in listed
/// order), fiber cell minor.
struct TotalLayout {
    std::vector<index_t> dims;                  // per total degree
    std::vector<std::vector<index_t>> offsets;  // offsets[n][cell] = block start
};

TotalLayout total_layout(const StackComplex& s);

/// Assembles vertical + horizontal boundary; throws naming the offending
/// degree if the square of the boundary fails to vanish.
ChainComplex total_complex(const StackComplex& s);

/// Base = one vertex and one edge, both fibers C, horizontal block
/// (-1)^j (theta - 1).
StackComplex mapping_torus_as_stack(const ChainComplex& c, const GradedMap& theta);

struct StackRebuildResult {
    StackComplex stack;
    Rebuilding rebuilding;
};

/// Replaces every fiber through its given rebuilding; the transfer series is
/// truncated at the base filtration depth. The returned rebuilding relates
/// the two total complexes and is verified by the caller, not assumed.
StackRebuildResult rebuild_stack(const StackComplex& s, const std::vector<Rebuilding>& fiber_rebuildings);

/// Stack file format: a "cell <id> <dim> <fiber-file>" line per base cell
/// (fiber files in the chain complex format, relative to dir), then
/// "horizontal <src> <tgt> <fiber-degree>" headers each followed by a triplet
/// block.
void write_stack(const std::string& dir, const std::string& name, const StackComplex& s);
StackComplex read_stack(const std::string& path);

} // namespace chainreb
