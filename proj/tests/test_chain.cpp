#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chainreb/chain_complex.hpp"
#include "chainreb/circle.hpp"
#include "chainreb/rng.hpp"
#include "chainreb/smith.hpp"
#include "oracles.hpp"

#include <cmath>
#include <sstream>

using namespace chainreb;

namespace {

// Random two-step complex built from a graph and short closed walks, so all
// entries stay small and d1 d2 = 0 by construction.
ChainComplex random_two_step(Rng& rng, index_t n0, index_t n1, index_t n2) {
    IntMatrix d1(n0, n1);
    std::vector<std::pair<index_t, index_t>> ends(static_cast<std::size_t>(n1));
    for (index_t e = 0; e < n1; ++e) {
        index_t a = static_cast<index_t>(rng.below(static_cast<std::uint64_t>(n0)));
        index_t b = static_cast<index_t>(rng.below(static_cast<std::uint64_t>(n0)));
        ends[static_cast<std::size_t>(e)] = {a, b};
        d1.add_at(b, e, Int(1));
        d1.add_at(a, e, Int(-1));
    }
    // columns of d2: random closed edge-walks of length <= 5
    IntMatrix d2(n1, n2);
    for (index_t f = 0; f < n2; ++f) {
        index_t len = 2 + static_cast<index_t>(rng.below(4));
        index_t start = static_cast<index_t>(rng.below(static_cast<std::uint64_t>(n0)));
        index_t at = start;
        std::vector<std::pair<index_t, int>> walk;
        for (index_t s = 0; s < len; ++s) {
            // pick any edge incident to `at`, walk across it
            index_t tries = 0;
            while (tries++ < 50) {
                index_t e = static_cast<index_t>(rng.below(static_cast<std::uint64_t>(n1)));
                auto [a, b] = ends[static_cast<std::size_t>(e)];
                if (a == at) {
                    walk.emplace_back(e, 1);
                    at = b;
                    break;
                }
                if (b == at) {
                    walk.emplace_back(e, -1);
                    at = a;
                    break;
                }
            }
        }
        // close up with the reverse of the outbound walk if we did not return
        if (at != start) {
            auto forward = walk;
            for (auto it = forward.rbegin(); it != forward.rend(); ++it)
                walk.emplace_back(it->first, -it->second);
        }
        for (const auto& [e, s] : walk) d2.add_at(e, f, Int(s));
    }
    return ChainComplex({n0, n1, n2}, {std::move(d1), std::move(d2)});
}

double oracle_log_torsion(const ChainComplex& c, index_t j) {
    double out = 0.0;
    for (const Int& d : oracles::snf_diagonal(c.boundary(j + 1)))
        if (d > 1) out += std::log(static_cast<double>(d));
    return out;
}

} // namespace

TEST_CASE("homology of pinned small complexes") {
    SUBCASE("circle") {
        ChainComplex c = circle_complex(1);
        auto h0 = homology(c, 0);
        auto h1 = homology(c, 1);
        CHECK(h0.betti_rational == 1);
        CHECK(h0.torsion_factors.empty());
        CHECK(h1.betti_rational == 1);
        CHECK(h1.truncated);
        CHECK_FALSE(h0.truncated);
    }
    SUBCASE("mod 2 attaching") {
        // dims [1,2,1], the 2-cell attaches twice over the first edge
        IntMatrix d1(1, 2);
        IntMatrix d2(2, 1);
        d2.set(0, 0, 2);
        ChainComplex c({1, 2, 1}, {d1, d2});
        auto h1 = homology(c, 1, {2, 3});
        CHECK(h1.betti_rational == 1);
        REQUIRE(h1.torsion_factors.size() == 1);
        CHECK(h1.torsion_factors[0] == 2);
        CHECK(h1.betti_mod_p[0].second == 2); // p = 2 sees the torsion
        CHECK(h1.betti_mod_p[1].second == 1); // p = 3 does not
    }
    SUBCASE("point with empty degree 1") {
        ChainComplex c({1, 0}, {IntMatrix(1, 0)});
        CHECK(homology(c, 0).betti_rational == 1);
        CHECK(homology(c, 1).betti_rational == 0);
    }
    SUBCASE("degree out of range") { CHECK_THROWS_AS(homology(circle_complex(3), 5), shape_error); }
}

TEST_CASE("universal coefficients cross-check") {
    Rng rng(91);
    for (int trial = 0; trial < 25; ++trial) {
        ChainComplex c = random_two_step(rng, 6 + static_cast<index_t>(rng.below(6)),
                                         8 + static_cast<index_t>(rng.below(8)),
                                         4 + static_cast<index_t>(rng.below(6)));
        for (std::int64_t p : {2, 3, 5}) {
            for (index_t j = 0; j <= 2; ++j) {
                auto h = homology(c, j, {p});
                auto count_div = [&](index_t deg) {
                    index_t k = 0;
                    if (deg < 0 || deg > c.top_degree()) return k;
                    for (const Int& f : homology(c, deg).torsion_factors)
                        if (f % p == 0) ++k;
                    return k;
                };
                index_t expected = h.betti_rational + count_div(j) + count_div(j - 1);
                CHECK(h.betti_mod_p[0].second == expected);
            }
        }
    }
}

TEST_CASE("euler characteristic from betti numbers") {
    Rng rng(17);
    for (int trial = 0; trial < 15; ++trial) {
        ChainComplex c = random_two_step(rng, 7, 9, 5);
        index_t chi_cells = 0, chi_betti = 0;
        for (index_t j = 0; j <= 2; ++j) {
            index_t sign = (j % 2 == 0) ? 1 : -1;
            chi_cells += sign * c.dim(j);
            chi_betti += sign * homology(c, j).betti_rational;
        }
        CHECK(chi_cells == chi_betti);
    }
}

TEST_CASE("gabber bound") {
    SUBCASE("zero boundary gives zero bound") {
        ChainComplex c({2, 3}, {IntMatrix(2, 3)});
        CHECK(gabber_bound(c, 0) == 0.0);
        auto rep = check_gabber(c, 0);
        CHECK(rep.holds);
        CHECK(rep.log_torsion == 0.0);
    }
    SUBCASE("single doubled cell is tight") {
        IntMatrix d2(1, 1);
        d2.set(0, 0, 2);
        ChainComplex c({1, 1, 1}, {IntMatrix(1, 1), d2});
        auto rep = check_gabber(c, 1);
        CHECK(rep.holds);
        CHECK(rep.log_torsion == doctest::Approx(std::log(2.0)));
        CHECK(rep.bound >= std::log(2.0) - 1e-12);
        CHECK(rep.bound <= std::log(2.0) * 1.05); // dims[1] = 1 and |d2| = 2: tight
    }
    SUBCASE("random two-step complexes always satisfy the bound") {
        Rng rng(123);
        for (int trial = 0; trial < 60; ++trial) {
            ChainComplex c = random_two_step(rng, 10, 20, 20);
            auto rep = check_gabber(c, 1);
            CHECK(rep.holds);
            CHECK(rep.log_torsion == doctest::Approx(oracle_log_torsion(c, 1)));
        }
    }
}

TEST_CASE("cokernel torsion bound") {
    SUBCASE("diag(2,3)") {
        auto rep = check_cokernel_bound(IntMatrix::diagonal({Int(2), Int(3)}));
        CHECK(rep.torsion_order == 6);
        CHECK(rep.pseudo_det_squared == 36);
        CHECK(rep.holds);
    }
    SUBCASE("zero map") {
        auto rep = check_cokernel_bound(IntMatrix(3, 3));
        CHECK(rep.torsion_order == 1);
        CHECK(rep.pseudo_det_squared == 1);
        CHECK(rep.holds);
    }
    SUBCASE("random 8x6 matrices") {
        Rng rng(321);
        for (int trial = 0; trial < 100; ++trial) {
            IntMatrix f(8, 6);
            for (index_t r = 0; r < 8; ++r)
                for (index_t c = 0; c < 6; ++c) {
                    std::int64_t v = rng.range(-3, 3);
                    if (v != 0) f.set(r, c, Int(v));
                }
            CHECK(check_cokernel_bound(f).holds);
        }
    }
}

TEST_CASE("interval tensor") {
    SUBCASE("point becomes an interval") {
        ChainComplex pt({1}, {});
        ChainComplex c = tensor_with_interval(pt);
        REQUIRE(c.top_degree() == 1);
        CHECK(c.dim(0) == 2);
        CHECK(c.dim(1) == 1);
        CHECK(c.boundary(1).get(0, 0) == -1);
        CHECK(c.boundary(1).get(1, 0) == 1);
    }
    SUBCASE("circle becomes a cylinder") {
        ChainComplex c = tensor_with_interval(circle_complex(5));
        CHECK(homology(c, 0).betti_rational == 1);
        CHECK(homology(c, 1).betti_rational == 1);
        CHECK(homology(c, 1).torsion_factors.empty());
        CHECK(homology(c, 2).betti_rational == 0);
    }
    SUBCASE("boundary squares to zero on random complexes") {
        Rng rng(55);
        for (int trial = 0; trial < 50; ++trial) {
            ChainComplex c = random_two_step(rng, 5, 8, 4);
            ChainComplex t = tensor_with_interval(c); // constructor validates d^2 = 0
            CHECK(t.top_degree() == 3);
        }
    }
}

TEST_CASE("direct sum and shift") {
    ChainComplex a = circle_complex(3);
    ChainComplex b = circle_complex(4);
    ChainComplex s = direct_sum(a, b);
    CHECK(s.dim(0) == 7);
    CHECK(homology(s, 0).betti_rational == 2);
    CHECK(homology(s, 1).betti_rational == 2);
    ChainComplex sh = shift(a, 1);
    CHECK(sh.dim(0) == 0);
    CHECK(sh.dim(1) == 3);
    CHECK(sh.dim(2) == 3);
    CHECK(homology(sh, 1).betti_rational == 1);
}

TEST_CASE("complex file format round trip") {
    Rng rng(77);
    ChainComplex c = random_two_step(rng, 6, 9, 5);
    std::stringstream ss;
    c.write(ss);
    ChainComplex back = ChainComplex::read(ss);
    CHECK(back == c);
}
