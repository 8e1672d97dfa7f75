#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chainreb/farber.hpp"
#include "chainreb/rng.hpp"

#include <sstream>

using namespace chainreb;

namespace {

PermutationAction cyclic_action(index_t n) {
    std::vector<index_t> image(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) image[static_cast<std::size_t>(i)] = (i + 1) % n;
    return PermutationAction(n, {{"t", std::move(image)}});
}

Word random_word(Rng& rng, const std::vector<std::string>& names, index_t len) {
    Word w;
    for (index_t i = 0; i < len; ++i) {
        Word::Letter l;
        l.name = names[rng.below(names.size())];
        l.inverse = rng.unit() < 0.5;
        w.letters.push_back(std::move(l));
    }
    return w;
}

} // namespace

TEST_CASE("fixed point ratios on pinned actions") {
    SUBCASE("identity word fixes everything") {
        PermutationAction a = cyclic_action(7);
        Word w = Word::parse("t t'");
        CHECK(fixed_point_ratio(a, w) == Rat(1));
    }
    SUBCASE("the n-cycle fixes nothing") {
        PermutationAction a = cyclic_action(9);
        CHECK(fixed_point_ratio(a, Word::parse("t")) == Rat(0));
    }
    SUBCASE("heisenberg mod 2 coset action by exhaustive enumeration") {
        PermutationAction a = heisenberg_mod_cosets(2);
        CHECK(a.degree() == 4); // 8 elements over <x> of order 2
        // brute-force each generator's fixed points via the permutation
        for (const std::string& g : a.generator_names()) {
            Word w = Word::parse(g);
            auto perm = a.permutation_of(w);
            index_t fixed = 0;
            for (index_t i = 0; i < a.degree(); ++i)
                if (perm[static_cast<std::size_t>(i)] == i) ++fixed;
            CHECK(fixed_point_ratio(a, w) == Rat(fixed) / Rat(a.degree()));
        }
        // x fixes the cosets of its normalizer <x, z>; z lies in no conjugate of <x>
        CHECK(fixed_point_ratio(a, Word::parse("x")) == Rat(1, 2));
        CHECK(fixed_point_ratio(a, Word::parse("y")) == Rat(0));
        CHECK(fixed_point_ratio(a, Word::parse("z")) == Rat(0));
    }
}

TEST_CASE("conjugation invariance of fx") {
    Rng rng(77);
    for (index_t n : {2, 3, 4, 5}) {
        PermutationAction a = heisenberg_mod_cosets(n);
        std::vector<std::string> names = a.generator_names();
        for (int trial = 0; trial < 20; ++trial) {
            Word w = random_word(rng, names, 1 + static_cast<index_t>(rng.below(3)));
            if (w.letters.empty()) continue;
            Word conj = random_word(rng, names, 1 + static_cast<index_t>(rng.below(3)));
            Word conjugated;
            conjugated.letters = conj.letters;
            for (const auto& l : w.letters) conjugated.letters.push_back(l);
            for (auto it = conj.letters.rbegin(); it != conj.letters.rend(); ++it) {
                Word::Letter inv = *it;
                inv.inverse = !inv.inverse;
                conjugated.letters.push_back(inv);
            }
            CHECK(fixed_point_ratio(a, w) == fixed_point_ratio(a, conjugated));
        }
    }
}

TEST_CASE("regular actions have zero-one ratios") {
    for (index_t n : {2, 3, 4}) {
        PermutationAction a = heisenberg_mod_regular(n);
        Rng rng(n);
        std::vector<std::string> names = a.generator_names();
        for (int trial = 0; trial < 15; ++trial) {
            Word w = random_word(rng, names, 1 + static_cast<index_t>(rng.below(4)));
            if (w.letters.empty()) continue;
            Rat r = fixed_point_ratio(a, w);
            CHECK((r == Rat(0) || r == Rat(1)));
        }
    }
}

TEST_CASE("neighborhood membership") {
    PermutationAction a = z2_mod_action(5);
    std::vector<Word> s{Word::parse("x"), Word::parse("y")};
    CHECK(in_neighborhood(a, s, Rat(1, 2)));
    CHECK(in_neighborhood(a, s, Rat(1, 25 * 2))); // ratios are exactly 0
    std::vector<Word> with_identity{Word::parse("x x'")};
    CHECK_FALSE(in_neighborhood(a, with_identity, Rat(1)));
}

TEST_CASE("intersection statistic") {
    SUBCASE("whole group with nothing to check gives one") {
        PermutationAction a = z2_mod_action(4);
        Rat frac = intersection_statistic(a, {"x", "y"}, {}, Rat(1));
        CHECK(frac == Rat(1));
    }
    SUBCASE("Z^2 mod N, first-factor subgroup") {
        for (index_t n : {3, 4, 5, 6}) {
            PermutationAction a = z2_mod_action(n);
            Rat frac = intersection_statistic(a, {"x"}, {Word::parse("x")}, Rat(1, 2));
            CHECK(frac == Rat(1)); // each orbit has size n >= 3, ratio 0 < 1/2
        }
    }
    SUBCASE("double counting identity") {
        // fx_{G,w}(H) = (1/[G:H]) sum over points of fx on the orbit of the point
        for (index_t n : {2, 3, 4}) {
            PermutationAction a = heisenberg_mod_cosets(n);
            std::vector<std::string> lambda{"x", "z"};
            for (const char* wtext : {"x", "z", "x z"}) {
                Word w = Word::parse(wtext);
                auto labels = a.orbit_labels(lambda);
                index_t orbit_count = 0;
                for (index_t l : labels) orbit_count = std::max(orbit_count, l + 1);
                std::vector<index_t> size(static_cast<std::size_t>(orbit_count), 0),
                    fixed(static_cast<std::size_t>(orbit_count), 0);
                for (index_t i = 0; i < a.degree(); ++i) {
                    ++size[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
                    if (a.act(w, i) == i) ++fixed[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
                }
                Rat rhs(0);
                for (index_t i = 0; i < a.degree(); ++i) {
                    index_t o = labels[static_cast<std::size_t>(i)];
                    rhs += Rat(fixed[static_cast<std::size_t>(o)]) / Rat(size[static_cast<std::size_t>(o)]);
                }
                rhs /= Rat(a.degree());
                CHECK(fixed_point_ratio(a, w) == rhs);
            }
        }
    }
    SUBCASE("the neighborhood transfer inequality on heisenberg actions") {
        // if the ambient action lies in U_{S, delta^2/|S|} then at least a
        // (1 - delta) fraction of points induce subgroups inside U_{S, delta}
        std::vector<Word> s{Word::parse("x")};
        std::vector<std::string> lambda{"x", "z"};
        for (index_t n = 2; n <= 8; ++n) {
            for (const auto& a : {heisenberg_mod_regular(n), heisenberg_mod_cosets(n)}) {
                for (index_t num = 1; num <= 4; ++num) {
                    Rat delta(num, 4);
                    Rat threshold = delta * delta / Rat(static_cast<index_t>(s.size()));
                    if (in_neighborhood(a, s, threshold)) {
                        Rat frac = intersection_statistic(a, lambda, s, delta);
                        CHECK(frac >= Rat(1) - delta);
                    }
                }
            }
        }
    }
}

TEST_CASE("action file round trip and word syntax") {
    PermutationAction a = heisenberg_mod_cosets(3);
    std::stringstream ss;
    a.write(ss);
    PermutationAction back = PermutationAction::read(ss);
    CHECK(back.degree() == a.degree());
    Word w = Word::parse("x y' z");
    CHECK(w.str() == "x y' z");
    CHECK(fixed_point_ratio(back, w) == fixed_point_ratio(a, w));
}
