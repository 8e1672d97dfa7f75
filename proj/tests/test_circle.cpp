#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chainreb/circle.hpp"
#include "chainreb/norm.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace chainreb;

TEST_CASE("circle complex basics") {
    SUBCASE("N = 1 is the one-cell circle") {
        ChainComplex c = circle_complex(1);
        CHECK(c.dim(0) == 1);
        CHECK(c.dim(1) == 1);
        CHECK(c.boundary(1).is_zero());
        CHECK(homology(c, 0).betti_rational == 1);
        CHECK(homology(c, 1).betti_rational == 1);
    }
    SUBCASE("N = 5 keeps circle homology, no torsion") {
        ChainComplex c = circle_complex(5);
        auto h0 = homology(c, 0);
        auto h1 = homology(c, 1);
        CHECK(h0.betti_rational == 1);
        CHECK(h1.betti_rational == 1);
        CHECK(h0.torsion_factors.empty());
        CHECK(h1.torsion_factors.empty());
        CHECK(oracles::snf_diagonal(c.boundary(1)).size() == 4);
    }
}

TEST_CASE("partition choice") {
    SUBCASE("exact division") {
        auto p = choose_partition(1000, 10.0);
        CHECK(p.segments() == 100);
        for (index_t i = 0; i < 100; ++i)
            CHECK(p.breakpoints[static_cast<std::size_t>(i + 1)] -
                      p.breakpoints[static_cast<std::size_t>(i)] ==
                  10);
    }
    SUBCASE("N=13 T=3 gives gaps 3,3,3,2,2") {
        auto p = choose_partition(13, 3.0);
        REQUIRE(p.segments() == 5);
        std::vector<index_t> gaps;
        for (index_t i = 0; i < 5; ++i)
            gaps.push_back(p.breakpoints[static_cast<std::size_t>(i + 1)] -
                           p.breakpoints[static_cast<std::size_t>(i)]);
        CHECK(gaps == std::vector<index_t>{3, 3, 3, 2, 2});
    }
    SUBCASE("N=8 T=2 divides evenly") {
        auto p = choose_partition(8, 2.0);
        REQUIRE(p.segments() == 4);
        for (index_t i = 0; i < 4; ++i)
            CHECK(p.breakpoints[static_cast<std::size_t>(i + 1)] -
                      p.breakpoints[static_cast<std::size_t>(i)] ==
                  2);
    }
    SUBCASE("N below 4T is rejected") { CHECK_THROWS_AS(choose_partition(7, 2.0), shape_error); }
}

TEST_CASE("circle rebuilding verifies and has the advertised shape") {
    SUBCASE("N=8 T=2 exact identity by hand-sized check") {
        Rebuilding r = circle_rebuilding(8, 2.0);
        CHECK(verify(r).empty());
        CHECK(r.target.dim(0) == 4);
        // h g - 1 = d rho + rho d on degree 0, checked entrywise
        IntMatrix lhs = r.h.component(0) * r.g.component(0) - IntMatrix::identity(8);
        IntMatrix rhs = r.source.boundary(1) * r.rho.component(0);
        CHECK(lhs == rhs);
    }
    SUBCASE("N=1000 T=10 cell counts") {
        Rebuilding r = circle_rebuilding(1000, 10.0);
        CHECK(verify(r).empty());
        CHECK(r.source.dim(0) == 1000);
        CHECK(r.target.dim(0) == 100);
        CHECK(r.target.dim(1) == 100);
    }
    SUBCASE("corrupting rho is caught with the degree named") {
        Rebuilding r = circle_rebuilding(16, 2.0);
        IntMatrix rho0 = r.rho.component(0);
        rho0.add_at(3, 5, Int(1));
        r.rho.set_component(0, rho0);
        auto v = verify(r);
        REQUIRE(v.size() == 1);
        CHECK(v[0].degree == 0);
        CHECK(v[0].identity.find("homotopy") != std::string::npos);
    }
}

TEST_CASE("norm bounds across the sweep") {
    for (index_t n : {8, 32, 128, 512, 2048}) {
        for (double T : {2.0, 4.0, 16.0, 32.0}) {
            if (static_cast<double>(n) < 4.0 * T) continue;
            Rebuilding r = circle_rebuilding(n, T);
            CHECK(verify(r).empty());
            // both sides keep circle homology
            for (index_t j = 0; j <= 1; ++j) {
                CHECK(homology(r.source, j).betti_rational == 1);
                CHECK(homology(r.target, j).betti_rational == 1);
                CHECK(homology(r.source, j).torsion_factors.empty());
                CHECK(homology(r.target, j).torsion_factors.empty());
            }
            // cell bound m <= 2N/T exactly
            CHECK(static_cast<double>(r.target.dim(0)) <= 2.0 * static_cast<double>(n) / T);
            // boundary norms stay <= 2, and rho stays <= T
            CHECK(operator_norm(r.target.boundary(1)).upper <= 2.0 + 1e-9);
            CHECK(operator_norm(r.source.boundary(1)).upper <= 2.0 + 1e-9);
            CHECK(operator_norm(r.rho.component(0)).upper <= T + 1e-9);
        }
    }
}

TEST_CASE("quality report for the identity rebuilding") {
    ChainComplex c = circle_complex(6);
    Rebuilding r = identity_rebuilding(c);
    QualityReport q = quality(r, 1.0);
    CHECK(q.per_degree_cell_ratio[0] == doctest::Approx(1.0));
    CHECK(q.per_degree_cell_ratio[1] == doctest::Approx(1.0));
    CHECK(q.kappa_min >= 1.0);
    // norm terms are log|d|/(1+log 1) = log 2
    CHECK(q.log_norm_boundary[1] == doctest::Approx(std::log(2.0)).epsilon(0.02));
}

TEST_CASE("lifting to covers") {
    SUBCASE("one sheet reproduces the base") {
        auto p = choose_partition(24, 3.0);
        Rebuilding base = circle_rebuilding(p);
        CoverLiftData lift = lift_circle_rebuilding(p, 1);
        auto induced = induce_to_cover(base, lift);
        CHECK(verify(induced.rebuilding).empty());
        CHECK(induced.rebuilding.source == base.source);
        CHECK(induced.rebuilding.target == base.target);
        CHECK(induced.rebuilding.g.component(0) == base.g.component(0));
    }
    SUBCASE("two sheets double all cell counts and verify") {
        auto p = choose_partition(30, 3.0);
        Rebuilding base = circle_rebuilding(p);
        CoverLiftData lift = lift_circle_rebuilding(p, 2);
        auto induced = induce_to_cover(base, lift);
        CHECK(verify(induced.rebuilding).empty());
        CHECK(induced.rebuilding.source.dim(0) == 60);
        CHECK(induced.rebuilding.target.dim(0) == 2 * base.target.dim(0));
        CHECK(induced.delta == 2.0); // circle attaching multiplicity
        // cell-ratio terms unchanged by the cover
        QualityReport qb = quality(base, p.T);
        QualityReport qi = quality(induced.rebuilding, p.T);
        for (std::size_t j = 0; j < qb.per_degree_cell_ratio.size(); ++j)
            CHECK(qi.per_degree_cell_ratio[j] == doctest::Approx(qb.per_degree_cell_ratio[j]));
    }
}
