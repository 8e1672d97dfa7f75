#pragma once

#include "chainreb/caps.hpp"
#include "chainreb/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace chainreb {

/// A word in named generators; a trailing apostrophe marks an inverse, so
/// "x y' x" means x y^-1 x.
struct Word {
    struct Letter {
        std::string name;
        bool inverse = false;
    };
    std::vector<Letter> letters;

    static Word parse(const std::string& text);
    std::string str() const;
};

/// A transitive permutation action of named generators on {0..n-1}, the
/// finite model of a group acting on the cosets of a finite-index subgroup.
class PermutationAction {
public:
    PermutationAction(index_t degree, std::vector<std::pair<std::string, std::vector<index_t>>> gens);

    index_t degree() const { return degree_; }
    const std::vector<std::string>& generator_names() const { return names_; }

    /// Image of a point under a word.
    index_t act(const Word& w, index_t point) const;
    std::vector<index_t> permutation_of(const Word& w) const;

    /// Orbit partition under a subset of the generators.
    std::vector<index_t> orbit_labels(const std::vector<std::string>& sub_generators) const;

    void write(std::ostream& os) const;
    static PermutationAction read(std::istream& is);

private:
    index_t degree_ = 0;
    std::vector<std::string> names_;
    std::vector<std::vector<index_t>> images_;
    std::vector<std::vector<index_t>> inverses_;

    index_t gen_index(const std::string& name) const;
};

/// Exact proportion of fixed points of the word's permutation.
Rat fixed_point_ratio(const PermutationAction& a, const Word& w);

/// True iff every word of S has fixed-point ratio strictly below delta.
bool in_neighborhood(const PermutationAction& a, const std::vector<Word>& s, const Rat& delta);

/// Fraction of points whose induced subgroup (the point stabilizer of the
/// subgroup generated by `sub_generators`, acting on the point's orbit) has
/// all S-ratios strictly below delta.
Rat intersection_statistic(const PermutationAction& a, const std::vector<std::string>& sub_generators,
                           const std::vector<Word>& s, const Rat& delta);

/// Finite Heisenberg group H(Z/n) = {(a, b, c)} with
/// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a b'), generators x = (1,0,0),
/// y = (0,1,0), z = (0,0,1).
PermutationAction heisenberg_mod_regular(index_t n);
/// The same group acting on the cosets of the non-normal subgroup <x>.
PermutationAction heisenberg_mod_cosets(index_t n);
/// Z^2 acting on (Z/n)^2 by translations; generators x, y.
PermutationAction z2_mod_action(index_t n);

} // namespace chainreb
