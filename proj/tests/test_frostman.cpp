#include <doctest.h>

#include <cmath>

#include "hardylab/error.hpp"
#include "hardylab/fixtures.hpp"
#include "hardylab/frostman.hpp"
#include "oracles.hpp"

using namespace hardylab;

namespace {

// Uniform triadic cover at level k: the 2^k level-k intervals as balls
// centred at their left endpoints with radius 3^-k.
std::vector<Ball> triadic_cover(int k) {
    std::vector<Ball> out;
    for (double x : oracle::cantor_points(k)) out.push_back({{x}, std::pow(3.0, -k)});
    return out;
}

}  // namespace

TEST_SUITE("frostman") {
    TEST_CASE("singleton gives a chain with unit masses") {
        PointSet E(1, {0.0}, 1e-9);
        PackingTree t = build_packing_tree(E, {0.0}, 1.0, 0.25, 5);
        CHECK(t.nodes.size() == 6);
        for (const auto& lvl : t.levels) CHECK(lvl.size() == 1);
        MeasureDistribution nu = distribute_measure(t);
        for (std::size_t i = 0; i < t.nodes.size(); ++i) CHECK(nu[i] == 1.0);
    }

    TEST_CASE("equispaced points, delta = 1/4, root (1/2, 1/2): two children") {
        PointSet E = build_set("interval_points", {});
        PackingTree t = build_packing_tree(E, {0.5}, 0.5, 0.25, 1);
        REQUIRE(t.levels[1].size() == 2);
        std::vector<std::size_t> half;
        for (std::size_t i : E.in_ball({{0.5}, 0.25})) half.push_back(i);
        CHECK(t.levels[1].size() == maximal_packing(E, 0.125, half).size());
        for (std::size_t id : t.levels[1]) {
            CHECK(std::abs(t.nodes[id].center[0] - 0.5) <= 0.25);
            CHECK(t.nodes[id].radius == 0.125);
        }
    }

    TEST_CASE("Cantor with delta = 1/3 and root (0, 1) is a chain") {
        // Half of each ball meets only one sub-interval, and that piece has
        // diameter below 2 delta^k R, so every packing is a single point.
        PointSet E = build_set("cantor", {{"depth", 8}});
        PackingTree t = build_packing_tree(E, {0.0}, 1.0, 1.0 / 3, 3);
        for (const auto& lvl : t.levels) CHECK(lvl.size() == 1);
    }

    TEST_CASE("Cantor with delta = 1/9 and root (0, 2) is binary with equal leaf masses") {
        PointSet E = build_set("cantor", {{"depth", 8}});
        PackingTree t = build_packing_tree(E, {0.0}, 2.0, 1.0 / 9, 3);
        REQUIRE(t.leaves().size() == 8);
        MeasureDistribution nu = distribute_measure(t);
        for (std::size_t id : t.leaves()) CHECK(nu[id] == doctest::Approx(1.0 / 8).epsilon(1e-15));
        PackingTree t2 = build_packing_tree(E, {0.0}, 2.0, 1.0 / 9, 2);
        MeasureDistribution nu2 = distribute_measure(t2);
        for (std::size_t id : t2.leaves()) CHECK(nu2[id] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(nu.conservation_error(t) <= 1e-12L);
    }

    TEST_CASE("tree invariants: children in the half parent, separated siblings, exact radii") {
        PointSet E = build_set("cantor", {{"depth", 8}});
        PackingTree t = build_packing_tree(E, {0.0}, 2.0, 1.0 / 9, 3);
        for (const auto& nd : t.nodes) {
            CHECK(nd.radius == doctest::Approx(2.0 * std::pow(1.0 / 9, nd.level)).epsilon(1e-15));
            if (nd.parent < 0) continue;
            const auto& par = t.nodes[nd.parent];
            CHECK(std::abs(nd.center[0] - par.center[0]) <= par.radius / 2 * (1 + 1e-12));
            for (std::size_t s : par.children)
                if (&t.nodes[s] != &nd) CHECK(std::abs(t.nodes[s].center[0] - nd.center[0]) > 2 * nd.radius);
        }
    }

    TEST_CASE("sub-resolution depth is rejected") {
        PointSet E = build_set("cantor", {{"depth", 4}});
        CHECK_THROWS_AS(build_packing_tree(E, {0.0}, 1.0, 1.0 / 3, 9), Error);
    }

    TEST_CASE("growth on a chain: (r/R)^(q-n) for a single leaf") {
        PointSet E(1, {0.0}, 1e-9);
        PackingTree t = build_packing_tree(E, {0.0}, 1.0, 0.25, 6);
        MeasureDistribution nu = distribute_measure(t);
        // q below n: blows up like 4^(k(1-q)); q above n: stays at the root value.
        CHECK(growth_check(t, nu, 0.5).max_constant == doctest::Approx(std::pow(4.0, 6 * 0.5)));
        CHECK(growth_check(t, nu, 1.5).max_constant == doctest::Approx(1.0));
    }

    TEST_CASE("Cantor chain at delta = 1/3: constants grow like 3^(k(1-q))") {
        PointSet E = build_set("cantor", {{"depth", 8}});
        for (double q : {0.2, 0.5}) {
            double prev = 0.0;
            for (int D = 4; D <= 6; ++D) {
                PackingTree t = build_packing_tree(E, {0.0}, 1.0, 1.0 / 3, D);
                double c = growth_check(t, distribute_measure(t), q).max_constant;
                CHECK(c == doctest::Approx(std::pow(3.0, D * (1 - q))).epsilon(1e-12));
                if (prev > 0) CHECK(c / prev >= 1.5);
                prev = c;
            }
        }
    }

    TEST_CASE("Cantor binary tree at delta = 1/9: growth depends on q against codim 1 - log 2 / log 9") {
        // Each level halves the mass and shrinks radii by 9, so the constant
        // changes by 9^(1-q) / 2 per level: 1.5 at q = 0.5, below 1 at q = 0.8.
        PointSet E = build_set("cantor", {{"depth", 8}});
        double prev5 = 0.0, prev8 = 0.0;
        for (int D = 1; D <= 3; ++D) {
            PackingTree t = build_packing_tree(E, {0.0}, 2.0, 1.0 / 9, D);
            MeasureDistribution nu = distribute_measure(t);
            double c5 = growth_check(t, nu, 0.5).max_constant;
            double c8 = growth_check(t, nu, 0.8).max_constant;
            if (prev5 > 0) CHECK(c5 / prev5 == doctest::Approx(1.5).epsilon(1e-12));
            if (prev8 > 0) CHECK(c8 / prev8 <= 1.0 + 1e-12);
            prev5 = c5;
            prev8 = c8;
        }
    }

    TEST_CASE("content lower bound: trivial cover, triadic covers, missed leaves") {
        PointSet E = build_set("cantor", {{"depth", 8}});
        PackingTree t = build_packing_tree(E, {0.0}, 1.0, 1.0 / 3, 6);
        MeasureDistribution nu = distribute_measure(t);
        GrowthResult g = growth_check(t, nu, 0.5);

        ContentBound trivial = content_lower_bound(t, nu, 0.5, {{{{0.0}, 1.0}}}, 1.0);
        CHECK(trivial.min_sum == doctest::Approx(ball_volume(1, 1.0)));
        CHECK(trivial.holds);

        std::vector<std::vector<Ball>> covers;
        for (int k = 1; k <= 5; ++k) covers.push_back(triadic_cover(k));
        ContentBound cb = content_lower_bound(t, nu, 0.5, covers, g.max_constant);
        CHECK(cb.holds);
        for (int k = 1; k <= 5; ++k) {
            // 2^k balls of radius 3^-k: sum 2 (2 / sqrt 3)^k.
            CHECK(cb.sums[k - 1] == doctest::Approx(2 * std::pow(2 / std::sqrt(3.0), k)));
            CHECK(cb.sums[k - 1] >= 0.02 * ball_volume(1, 1.0));
        }

        PackingTree bin = build_packing_tree(E, {0.0}, 2.0, 1.0 / 9, 2);
        MeasureDistribution nb = distribute_measure(bin);
        try {
            content_lower_bound(bin, nb, 0.5, {{{{0.0}, 0.5}}}, 1.0);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotACover);
        }
    }
}
