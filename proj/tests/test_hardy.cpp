#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hardylab/error.hpp"
#include "hardylab/fixtures.hpp"
#include "hardylab/hardy.hpp"
#include "oracles.hpp"

using namespace hardylab;

namespace {

std::vector<RefinementRun> runs_with(std::vector<double> lambdas, std::string tag = "t") {
    std::vector<RefinementRun> out;
    double h = 1.0 / 16;
    for (double l : lambdas) {
        out.push_back({tag, h, l, true, 1});
        h /= 2;
    }
    return out;
}

Estimate est(double v, double tol = 0.05) { return {v, tol}; }

// Exact codimensions of the punctured disk: the exterior of the disk is thick
// (codimension 0) and the removed origin is thin (codimension 2).
PredictionInputs punctured_disk_inputs(double tol) {
    PredictionInputs in;
    in.whole = {est(0.0, tol), est(2.0, tol), {}};
    in.thick = CodimSummary{est(0.0, tol), est(0.0, tol), {}};
    in.thin = CodimSummary{est(2.0, tol), est(2.0, tol), {}};
    return in;
}

}  // namespace

TEST_SUITE("hardy") {
    TEST_CASE("hat function on the interval grid h = 1/4 has quotient 8") {
        GridDomain g = build_domain("interval", {}, 0.25);
        DistanceField d = distance_transform(g);
        std::vector<double> u = {0, 0, 1, 0, 0};
        QuotientValue q = grid_quotient(g, d, 2.0, 0.0, u);
        CHECK(q.numerator == doctest::Approx(8.0).epsilon(1e-14));
        CHECK(q.denominator == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(q.value == doctest::Approx(8.0).epsilon(1e-14));

        HardyProblem pr = make_problem(grid_geometry(g, d), 2.0, 0.0);
        REQUIRE(pr.wden.size() == 3);
        CHECK(quotient(pr, {0, 1, 0}).value == doctest::Approx(8.0).epsilon(1e-14));
    }

    TEST_CASE("quotient is homogeneous of degree 0") {
        GridDomain g = build_domain("punctured_square", {}, 1.0 / 16);
        HardyProblem pr = make_problem(grid_geometry(g, distance_transform(g)), 1.5, 0.25);
        std::vector<double> u = default_init(pr);
        double base = quotient(pr, u).value;
        for (double c : {0.125, 4.0, -2.0}) {
            std::vector<double> v = u;
            for (double& x : v) x *= c;
            CHECK(quotient(pr, v).value == doctest::Approx(base).epsilon(1e-14));
        }
    }

    TEST_CASE("vanishing test function is rejected") {
        GridDomain g = build_domain("interval", {}, 0.25);
        HardyProblem pr = make_problem(grid_geometry(g, distance_transform(g)), 2.0, 0.0);
        try {
            quotient(pr, {0, 0, 0});
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ZeroTestFunction);
        }
        CHECK_THROWS_AS(minimize_quotient(pr, {0, 0, 0}), Error);
    }

    TEST_CASE("u = d on the punctured square matches the cell-loop quadrature") {
        GridDomain g = build_domain("punctured_square", {}, 1.0 / 32);
        DistanceField d = distance_transform(g);
        for (double p : {2.0, 1.5}) {
            QuotientValue q = grid_quotient(g, d, p, 0.0, d.d);
            CHECK(q.value == doctest::Approx(oracle::quotient_2d(g, d.d, d.d, p, 0.0)).epsilon(1e-12));
            HardyProblem pr = make_problem(grid_geometry(g, d), p, 0.0);
            std::vector<double> u;
            for (std::size_t node : pr.geom->unknown_node) u.push_back(d.d[node]);
            CHECK(quotient(pr, u).value == doctest::Approx(q.value).epsilon(1e-12));
        }
    }

    TEST_CASE("interval, p = 2: lambda near 1/4 on the log line") {
        HardyProblem pr = make_problem(build_line("interval", {}), 2.0, 0.0);
        RayleighResult r = minimize_quotient(pr, default_init(pr));
        REQUIRE(r.converged);
        // Truncation at 1e-20 leaves 1/4 + (pi / ln 1e20)^2.
        double expect = 0.25 + std::pow(std::numbers::pi / std::log(1e20), 2);
        CHECK(r.lambda == doctest::Approx(expect).epsilon(2e-3));
        CHECK(std::abs(r.hardy_constant - 4.0) / 4.0 <= 0.03);
    }

    TEST_CASE("minimizer does not depend on the initial function") {
        HardyProblem pr = make_problem(build_line("interval", {{"count", 512}}), 2.0, 0.0);
        RayleighResult a = minimize_quotient(pr, default_init(pr));
        std::vector<double> init;
        for (double t : pr.geom->abscissa) init.push_back(std::sqrt(t) * (1.0 - t) + t * t * (1.0 - t));
        RayleighResult b = minimize_quotient(pr, init);
        CHECK(std::abs(a.lambda - b.lambda) <= 1e-6);
    }

    TEST_CASE("descent and inverse iteration agree at p = 2") {
        HardyProblem pr = make_problem(build_line("interval", {{"count", 256}}), 2.0, 0.0);
        RayleighResult inv = minimize_quotient(pr, default_init(pr));
        SolverOptions o;
        o.force_descent = true;
        RayleighResult des = minimize_quotient(pr, default_init(pr), o);
        REQUIRE(des.converged);
        CHECK(std::abs(inv.lambda - des.lambda) <= 1e-6);
    }

    TEST_CASE("descent trace is non-increasing for p != 2") {
        HardyProblem pr = make_problem(build_line("interval", {{"count", 256}}), 1.5, 0.0);
        RayleighResult r = minimize_quotient(pr, default_init(pr));
        REQUIRE(r.trace.size() >= 2);
        for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] * (1 + 1e-12));
        CHECK(r.lambda == doctest::Approx(std::pow(0.5 / 1.5, 1.5)).epsilon(0.05));
    }

    TEST_CASE("radial line for n = 3: lambda near 1/4") {
        HardyProblem pr = make_problem(build_line("radial", {{"n", 3}}), 2.0, 0.0);
        RayleighResult r = minimize_quotient(pr, default_init(pr));
        CHECK(std::abs(r.hardy_constant - 4.0) / 4.0 <= 0.1);
    }

    TEST_CASE("radial reduction: grid and line refine at the same rate") {
        // The grid's effective inner cutoff is not a fixed multiple of h, so
        // compare the scale-free ratio lambda(h) / lambda(2h) with eps = h / 2.
        auto grid_lambda = [](double h) {
            GridDomain g = build_domain("radial", {{"n", 3}}, h);
            HardyProblem pr = make_problem(grid_geometry(g, distance_transform(g)), 2.0, 0.0);
            return minimize_quotient(pr, default_init(pr)).lambda;
        };
        auto line_lambda = [](double eps) {
            HardyProblem pr = make_problem(build_line("radial", {{"n", 3}, {"eps", eps}}), 2.0, 0.0);
            return minimize_quotient(pr, default_init(pr)).lambda;
        };
        double grid = grid_lambda(1.0 / 16) / grid_lambda(1.0 / 8);
        double line = line_lambda(1.0 / 32) / line_lambda(1.0 / 16);
        CHECK(std::abs(grid - line) / line <= 0.1);
    }

    TEST_CASE("punctured square, p = 2: lambda decays under refinement") {
        RefinementOutcome o =
            refinement_study(domain_builder("punctured_square", {}), {1.0 / 32, 1.0 / 64, 1.0 / 128}, 2.0, 0.0);
        REQUIRE(o.runs.size() == 3);
        CHECK(o.runs[2].lambda / o.runs[0].lambda <= 0.9);
        CHECK(o.slope > 0.0);
    }

    TEST_CASE("shell witness on the punctured square stays under 3 / (j ln 2)") {
        WitnessPlan plan;
        plan.params.family = WitnessFamily::Shell;
        plan.params.center = {0.0, 0.0};
        plan.j_lo = 4;
        plan.j_hi = 8;
        plan.h = 1.0 / 1024;
        auto v = witness_series(domain_builder("punctured_square", {}), plan, 2.0, 0.0);
        REQUIRE(v.size() == 5);
        for (int j = 4; j <= 8; ++j) CHECK(v[j - 4] <= 3.0 / (j * std::log(2.0)));
        for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);
        CHECK(witness_certifies_decay(v));
    }

    TEST_CASE("plateau witness quotient matches the cell-loop quadrature") {
        GridDomain g = build_domain("punctured_square", {}, 1.0 / 64);
        DistanceField d = distance_transform(g);
        WitnessParams w;
        w.family = WitnessFamily::Plateau;
        w.center = {0.0, 0.0};
        w.radius = 0.5;
        auto u = witness_function(g, d, w);
        CHECK(witness_quotient(g, d, w, 2.0, 0.0) ==
              doctest::Approx(oracle::quotient_2d(g, d.d, u, 2.0, 0.0)).epsilon(1e-12));
    }

    TEST_CASE("log witness on the punctured disk at p = 1.5 stays bounded below") {
        WitnessPlan plan;
        plan.params.family = WitnessFamily::Log;
        plan.params.center = {0.0, 0.0};
        plan.params.radius = 0.5;
        plan.j_lo = 3;
        plan.j_hi = 7;
        plan.h = 1.0 / 512;
        auto v = witness_series(domain_builder("punctured_disk", {}), plan, 1.5, 0.0);
        for (double x : v) CHECK(x >= 0.5 * v.front());
        CHECK_FALSE(witness_certifies_decay(v));
    }

    TEST_CASE("witness below the grid scale is rejected") {
        GridDomain g = build_domain("punctured_square", {}, 1.0 / 16);
        DistanceField d = distance_transform(g);
        WitnessParams w;
        w.center = {0.0, 0.0};
        w.j = 6;
        try {
            witness_quotient(g, d, w, 2.0, 0.0);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SubResolutionWitness);
        }
    }

    TEST_CASE("witness certification separates 1/j decay from convergence") {
        std::vector<double> decay, settle;
        for (int j = 4; j <= 8; ++j) {
            decay.push_back(1.0 / (j * std::log(2.0)));
            settle.push_back(1.0 / (2.0 - std::ldexp(1.0, -j)));
        }
        CHECK(witness_certifies_decay(decay));
        CHECK_FALSE(witness_certifies_decay(settle));
        CHECK_FALSE(witness_certifies_decay({1.0, 0.5}));
        CHECK_FALSE(witness_certifies_decay({1.0, 0.5, 0.6}));
    }

    TEST_CASE("refinement classification") {
        CHECK(classify_refinement(runs_with({0.25, 0.249, 0.2485})).label == NumericLabel::HoldsEvidence);
        double r = std::pow(2.0, -0.5);
        CHECK(classify_refinement(runs_with({0.25, 0.25 * r, 0.25 * r * r})).label == NumericLabel::FailsEvidence);
        CHECK(classify_refinement(runs_with({0.25, 0.25 * 0.85, 0.25 * 0.85 * 0.85})).label ==
              NumericLabel::Inconclusive);

        auto unconverged = runs_with({0.25, 0.249, 0.2485});
        unconverged[1].converged = false;
        CHECK(classify_refinement(unconverged).label == NumericLabel::Inconclusive);

        std::vector<double> w;
        for (int j = 4; j <= 8; ++j) w.push_back(1.0 / (j * std::log(2.0)));
        auto o = classify_refinement(runs_with({0.25, 0.249, 0.2485}), w, {4, 5, 6, 7, 8});
        CHECK(o.witness_certified);
        CHECK(o.label == NumericLabel::FailsEvidence);

        auto mixed = runs_with({0.25, 0.249, 0.2485});
        mixed[2].tag = "other";
        try {
            classify_refinement(mixed);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MixedDomain);
        }
        CHECK_THROWS_AS(classify_refinement(runs_with({0.25, 0.2})), Error);
    }

    TEST_CASE("prediction on the punctured disk") {
        PredictionInputs in = punctured_disk_inputs(0.05);
        CHECK(predict_admissibility(in, 1.0, 0.0, 0.25) == Predicted::OutOfTheory);
        CHECK(predict_admissibility(in, 1.2, 0.0, 0.25) == Predicted::Boundary);
        for (double p : {1.3, 1.5, 1.7}) CHECK(predict_admissibility(in, p, 0.0, 0.05) == Predicted::Admits);
        // s = 2 sits on the codimension of the removed point.
        CHECK(predict_admissibility(punctured_disk_inputs(0.0), 2.0, 0.0, 0.05) == Predicted::Fails);
        CHECK(predict_admissibility(in, 2.0, 0.0, 0.05) == Predicted::Boundary);
        // Above the dimension the upper codimension condition applies once
        // p - beta clears 2 by the tolerance plus the margin.
        CHECK(predict_admissibility(in, 2.3, 0.0, 0.05) == Predicted::Admits);
        CHECK(predict_admissibility(in, 2.3, 0.0, 0.25) == Predicted::Boundary);
        // A huge margin makes everything boundary.
        CHECK(predict_admissibility(in, 1.5, 0.0, 10.0) == Predicted::Boundary);
    }

    TEST_CASE("prediction needs its estimates") {
        PredictionInputs in;
        in.whole.codim_lower = est(0.0);
        try {
            predict_admissibility(in, 1.5, 0.0, 0.25);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MissingEstimate);
        }
        CHECK_THROWS_AS(predict_admissibility(punctured_disk_inputs(0.05), 1.5, 0.0, 0.0), Error);
    }

    TEST_CASE("scan results do not depend on the thread count") {
        ScanOptions o;
        o.hs = {1.0 / 8, 1.0 / 16, 1.0 / 32};
        auto build = domain_builder("punctured_disk", {});
        PredictionInputs in = punctured_disk_inputs(0.05);
        o.threads = 1;
        AdmissibilityMap a = admissibility_scan(build, in, {1.5, 2.25}, {0.0, 0.5}, 0.25, o);
        o.threads = 2;
        AdmissibilityMap b = admissibility_scan(build, in, {1.5, 2.25}, {0.0, 0.5}, 0.25, o);
        REQUIRE(a.points.size() == 4);
        REQUIRE(b.points.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(a.points[i].p == b.points[i].p);
            CHECK(a.points[i].beta == b.points[i].beta);
            CHECK(a.points[i].predicted == b.points[i].predicted);
            for (std::size_t k = 0; k < 3; ++k) CHECK(a.points[i].numeric.runs[k].lambda == b.points[i].numeric.runs[k].lambda);
        }
        CHECK(a.points[0].predicted == Predicted::Admits);
    }
}
