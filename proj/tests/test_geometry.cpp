#include <doctest.h>

#include <cmath>

#include "hardylab/error.hpp"
#include "hardylab/fixtures.hpp"
#include "hardylab/geometry.hpp"
#include "oracles.hpp"

using namespace hardylab;

TEST_SUITE("geometry") {
    TEST_CASE("middle-thirds prefractal: depth 0, 1 and 3") {
        IFSSpec ifs = IFSSpec::middle_thirds();
        PointSet seed(1, {0.0}, 1.0);
        CHECK(generate_prefractal(ifs, 0, seed).size() == 1);

        PointSet d1 = generate_prefractal(ifs, 1, seed);
        REQUIRE(d1.size() == 2);
        CHECK(d1[0][0] == 0.0);
        CHECK(d1[1][0] == doctest::Approx(2.0 / 3));

        PointSet d3 = generate_prefractal(ifs, 3, seed);
        const double expect[] = {0, 2.0 / 27, 2.0 / 9, 8.0 / 27, 2.0 / 3, 20.0 / 27, 8.0 / 9, 26.0 / 27};
        REQUIRE(d3.size() == 8);
        for (int i = 0; i < 8; ++i) CHECK(d3[i][0] == doctest::Approx(expect[i]).epsilon(1e-14));
    }

    TEST_CASE("prefractal point budget is enforced") {
        PointSet seed(1, {0.0}, 1.0);
        CHECK_THROWS_AS(generate_prefractal(IFSSpec::middle_thirds(), 21, seed, 1'000'000), Error);
        try {
            generate_prefractal(IFSSpec::middle_thirds(), 21, seed, 1'000'000);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::BudgetExceeded);
        }
    }

    TEST_CASE("invalid IFS is rejected") {
        IFSSpec bad{1, {{1.0, {}, {0.0}}}};
        CHECK_THROWS_AS(bad.validate(), Error);
        IFSSpec none{1, {}};
        CHECK_THROWS_AS(none.validate(), Error);
    }

    TEST_CASE("point set deduplicates at half resolution and keeps lexicographic order") {
        PointSet E(1, {0.5, 0.0, 0.5 + 1e-4, 0.25}, 1e-3);
        REQUIRE(E.size() == 3);
        CHECK(E[0][0] == 0.0);
        CHECK(E[1][0] == 0.25);
        CHECK(E[2][0] == doctest::Approx(0.5).epsilon(1e-3));
    }

    TEST_CASE("1D distance transform") {
        GridDomain g = make_grid({0.0}, {1.0}, 0.25);
        g.complement[0] = 1;
        DistanceField d = distance_transform(g);
        const double expect[] = {0, 0.25, 0.5, 0.75, 1.0};
        for (int i = 0; i < 5; ++i) CHECK(d.d[i] == doctest::Approx(expect[i]));
    }

    TEST_CASE("unit square with boundary mask: centre distance 0.5") {
        GridDomain g = make_grid({0.0, 0.0}, {1.0, 1.0}, 0.25);
        std::int64_t idx[2];
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            g.unravel(i, idx);
            g.complement[i] = idx[0] == 0 || idx[1] == 0 || idx[0] == 4 || idx[1] == 4;
        }
        DistanceField d = distance_transform(g);
        Point c = {0.5, 0.5};
        CHECK(d.d[*g.nearest_node(c.data())] == doctest::Approx(0.5));
    }

    TEST_CASE("perforated disk mask at h = 2^-7 matches brute force at (0.75, 0)") {
        GridDomain g = build_domain("perforated_disk", {}, std::ldexp(1.0, -7));
        DistanceField d = distance_transform(g);
        Point q = {0.75, 0.0};
        std::size_t node = *g.nearest_node(q.data());
        CHECK(d.d[node] == doctest::Approx(oracle::brute_distance(g, node)).epsilon(1e-12));
    }

    TEST_CASE("packing: singleton, equispaced points and Cantor endpoints") {
        PointSet one(2, {0.3, 0.4}, 1e-6);
        CHECK(maximal_packing(one, 0.7, Ball{{0.3, 0.4}, 1.0}).size() == 1);

        std::vector<double> xs;
        for (int i = 0; i <= 10; ++i) xs.push_back(i / 10.0);
        PointSet line(1, xs, 1e-6);
        auto c = maximal_packing(line, 0.15, Ball{{0.5}, 1.0});
        REQUIRE(c.size() == 3);
        CHECK(line[c[0]][0] == doctest::Approx(0.0));
        CHECK(line[c[1]][0] == doctest::Approx(0.4));
        CHECK(line[c[2]][0] == doctest::Approx(0.8));
        CHECK(c == oracle::greedy_packing(line, 0.15, Ball{{0.5}, 1.0}));

        PointSet cantor = build_set("cantor", {{"depth", 3}});
        auto k = maximal_packing(cantor, 0.2, Ball{{0.0}, 2.0});
        REQUIRE(k.size() == 2);
        CHECK(cantor[k[0]][0] == doctest::Approx(0.0));
        CHECK(cantor[k[1]][0] == doctest::Approx(2.0 / 3));
    }

    TEST_CASE("packing of an empty window signals empty window") {
        PointSet E(1, {0.0}, 1e-6);
        try {
            maximal_packing(E, 0.1, Ball{{5.0}, 1.0});
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::EmptyWindow);
        }
    }

    TEST_CASE("grid budget and box checks") {
        CHECK_THROWS_AS(make_grid({0.0, 0.0}, {1.0, 1.0}, 1.0 / 8192, 1 << 20), Error);
        CHECK_THROWS_AS(make_grid({0.0}, {1.0}, 0.3), Error);
        GridDomain g = make_grid({0.0}, {1.0}, 0.5);
        CHECK_THROWS_AS(g.validate(), Error);  // no complement yet
    }
}
