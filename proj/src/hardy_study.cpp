#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "hardylab/error.hpp"
#include "hardylab/hardy.hpp"
#include "witness.hpp"

namespace hardylab {

const char* to_string(NumericLabel l) {
    switch (l) {
        case NumericLabel::HoldsEvidence: return "holds-evidence";
        case NumericLabel::FailsEvidence: return "fails-evidence";
        case NumericLabel::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

const char* to_string(Predicted l) {
    switch (l) {
        case Predicted::Admits: return "admits";
        case Predicted::Fails: return "fails";
        case Predicted::Boundary: return "boundary";
        case Predicted::OutOfTheory: return "out-of-theory";
    }
    return "unknown";
}

bool witness_certifies_decay(const std::vector<double>& v) {
    if (v.size() < 3) return false;
    std::vector<double> inc;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1]) || !(v[i] > 0.0)) return false;
        inc.push_back(1.0 / v[i] - 1.0 / v[i - 1]);
    }
    // Reciprocals that converge have increments shrinking geometrically, by
    // 2^-(gap) per step for a codimension gap; accept only gaps <= 0.15.
    double rate = std::pow(inc.back() / inc.front(), 1.0 / static_cast<double>(inc.size() - 1));
    return rate >= kWitnessRateFloor;
}

RefinementOutcome classify_refinement(const std::vector<RefinementRun>& runs, const std::vector<double>& witness_values,
                                      const std::vector<int>& witness_j) {
    require(runs.size() >= 3, ErrorKind::InvalidArgument, "refinement needs at least 3 resolutions");
    for (std::size_t i = 0; i < runs.size(); ++i) {
        require(runs[i].tag == runs[0].tag, ErrorKind::MixedDomain, "runs come from different domains");
        require(runs[i].lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
        if (i) require(runs[i].h < runs[i - 1].h, ErrorKind::InvalidArgument, "h must decrease strictly");
    }
    RefinementOutcome out;
    out.runs = runs;
    out.witness_values = witness_values;
    out.witness_j = witness_j;

    double mx = 0.0, my = 0.0;
    for (const auto& r : runs) {
        mx += std::log(r.h);
        my += std::log(r.lambda);
    }
    mx /= runs.size();
    my /= runs.size();
    double sxy = 0.0, sxx = 0.0;
    for (const auto& r : runs) {
        sxy += (std::log(r.h) - mx) * (std::log(r.lambda) - my);
        sxx += (std::log(r.h) - mx) * (std::log(r.h) - mx);
    }
    out.slope = sxy / sxx;
    for (std::size_t i = 1; i < runs.size(); ++i) out.ratios.push_back(runs[i].lambda / runs[i - 1].lambda);

    out.witness_certified = witness_certifies_decay(witness_values);
    bool all_converged = std::all_of(runs.begin(), runs.end(), [](const RefinementRun& r) { return r.converged; });
    bool stable = std::all_of(out.ratios.begin(), out.ratios.end(), [](double q) { return q >= 0.8; });
    if (out.witness_certified) out.label = NumericLabel::FailsEvidence;
    else if (!all_converged) out.label = NumericLabel::Inconclusive;
    else if (std::abs(out.slope) <= 0.15 && stable) out.label = NumericLabel::HoldsEvidence;
    else if (out.slope >= 0.3) out.label = NumericLabel::FailsEvidence;
    else out.label = NumericLabel::Inconclusive;
    return out;
}

std::vector<double> witness_series(const GridDomain& domain, const DistanceField& dist, const WitnessPlan& plan,
                                   double p, double beta) {
    require(plan.j_lo <= plan.j_hi, ErrorKind::InvalidArgument, "empty witness range");
    std::vector<double> rest;
    if (plan.params.family == WitnessFamily::Shell) rest = detail::distance_to_rest(domain, plan.params.center);
    std::vector<double> out;
    for (int j = plan.j_lo; j <= plan.j_hi; ++j) {
        WitnessParams w = plan.params;
        w.j = j;
        auto u = detail::witness_nodal(domain, w, rest.empty() ? nullptr : &rest);
        out.push_back(grid_quotient(domain, dist, p, beta, u).value);
    }
    return out;
}

std::vector<double> witness_series(const GridBuilder& build, const WitnessPlan& plan, double p, double beta) {
    require(plan.h > 0.0, ErrorKind::InvalidArgument, "witness grid spacing must be positive");
    GridDomain domain = build(plan.h, plan.grid_budget);
    DistanceField dist = distance_transform(domain);
    return witness_series(domain, dist, plan, p, beta);
}

namespace {

std::vector<int> witness_js(const WitnessPlan& plan) {
    std::vector<int> js;
    for (int j = plan.j_lo; j <= plan.j_hi; ++j) js.push_back(j);
    return js;
}

RefinementRun solve_run(const GeometryPtr& geom, double p, double beta, const SolverOptions& opts) {
    HardyProblem pr = make_problem(geom, p, beta);
    RayleighResult r = minimize_quotient(pr, default_init(pr), opts);
    return {geom->tag, geom->h, r.lambda, r.converged, r.iterations};
}

WitnessPlan resolve_plan(WitnessPlan plan, const std::vector<double>& hs) {
    if (plan.h <= 0.0) plan.h = *std::min_element(hs.begin(), hs.end()) / 4;
    return plan;
}

}  // namespace

RefinementOutcome refinement_study(const GridBuilder& build, const std::vector<double>& hs, double p, double beta,
                                   const SolverOptions& opts, const std::optional<WitnessPlan>& witness) {
    require(hs.size() >= 3, ErrorKind::InvalidArgument, "refinement needs at least 3 resolutions");
    std::vector<RefinementRun> runs;
    for (double h : hs) {
        GridDomain domain = build(h, kDefaultGridBudget);
        DistanceField dist = distance_transform(domain);
        runs.push_back(solve_run(grid_geometry(domain, dist), p, beta, opts));
    }
    if (!witness) return classify_refinement(runs);
    WitnessPlan plan = resolve_plan(*witness, hs);
    return classify_refinement(runs, witness_series(build, plan, p, beta), witness_js(plan));
}

RefinementOutcome refinement_study(const std::function<GeometryPtr(double h)>& build, const std::vector<double>& hs,
                                   double p, double beta, const SolverOptions& opts) {
    require(hs.size() >= 3, ErrorKind::InvalidArgument, "refinement needs at least 3 resolutions");
    std::vector<RefinementRun> runs;
    for (double h : hs) runs.push_back(solve_run(build(h), p, beta, opts));
    return classify_refinement(runs);
}

namespace {

const Estimate& need(const std::optional<Estimate>& e, const char* what) {
    require(e.has_value(), ErrorKind::MissingEstimate, std::string("missing estimate: ") + what);
    return *e;
}

// Local dichotomy: p - beta trapped in [codim_lower, codim_H] rules out both
// branches of the necessary condition.
bool trapped(const CodimSummary& c, double s) {
    const Estimate& lo = need(c.codim_lower, "codim_lower");
    const Estimate& hl = c.codim_h_lower ? *c.codim_h_lower : lo;
    return hl.value - hl.tol >= s && lo.value + lo.tol <= s;
}

}  // namespace

Predicted predict_admissibility(const PredictionInputs& in, double p, double beta, double margin) {
    require(margin > 0.0, ErrorKind::InvalidArgument, "margin must be positive");
    const Estimate& lo = need(in.whole.codim_lower, "codim_lower of the complement");
    const Estimate& up = need(in.whole.codim_upper, "codim_upper of the complement");
    require(in.thick.has_value() == in.thin.has_value(), ErrorKind::MissingEstimate,
            "a split needs both thick and thin estimates");
    const double s = p - beta;
    if (s <= 1.0) return Predicted::OutOfTheory;
    if (s <= 1.0 + margin) return Predicted::Boundary;

    if (lo.value - lo.tol > s + margin) return Predicted::Admits;
    if (up.value + up.tol < s - margin && (in.omega_bounded || in.complement_unbounded)) return Predicted::Admits;
    if (in.thick) {
        const Estimate& tu = need(in.thick->codim_upper, "codim_upper of the thick part");
        const Estimate& fl = need(in.thin->codim_lower, "codim_lower of the thin part");
        if (tu.value + tu.tol < s - margin && fl.value - fl.tol > s + margin) return Predicted::Admits;
    }
    if (trapped(in.whole, s) || (in.thin && trapped(*in.thin, s))) return Predicted::Fails;
    return Predicted::Boundary;
}

int AdmissibilityMap::disagreements() const {
    return static_cast<int>(std::count_if(points.begin(), points.end(), [](const ScanPoint& p) { return p.disagreement; }));
}

AdmissibilityMap admissibility_scan(const GridBuilder& build, const PredictionInputs& inputs,
                                    const std::vector<double>& p_grid, const std::vector<double>& beta_grid,
                                    double margin, const ScanOptions& opts) {
    require(!p_grid.empty() && !beta_grid.empty(), ErrorKind::InvalidArgument, "empty (p, beta) grid");
    require(opts.hs.size() >= 3, ErrorKind::InvalidArgument, "refinement needs at least 3 resolutions");
    AdmissibilityMap map;
    map.p_grid = p_grid;
    map.beta_grid = beta_grid;
    map.margin = margin;
    map.inputs = inputs;

    std::vector<GeometryPtr> geoms;
    for (double h : opts.hs) {
        GridDomain domain = build(h, kDefaultGridBudget);
        geoms.push_back(grid_geometry(domain, distance_transform(domain)));
    }
    std::optional<WitnessPlan> plan;
    GridDomain wdomain;
    DistanceField wdist;
    std::vector<double> rest;
    if (opts.witness) {
        plan = resolve_plan(*opts.witness, opts.hs);
        wdomain = build(plan->h, plan->grid_budget);
        wdist = distance_transform(wdomain);
        if (plan->params.family == WitnessFamily::Shell) rest = detail::distance_to_rest(wdomain, plan->params.center);
    }

    for (double p : p_grid)
        for (double b : beta_grid) {
            ScanPoint pt;
            pt.p = p;
            pt.beta = b;
            pt.predicted = predict_admissibility(inputs, p, b, margin);
            map.points.push_back(pt);
        }

    auto evaluate = [&](ScanPoint& pt) {
        if (pt.predicted == Predicted::OutOfTheory && !opts.run_out_of_theory) return;
        std::vector<RefinementRun> runs;
        for (const auto& g : geoms) runs.push_back(solve_run(g, pt.p, pt.beta, opts.solver));
        std::vector<double> wv;
        std::vector<int> js;
        if (plan) {
            for (int j = plan->j_lo; j <= plan->j_hi; ++j) {
                WitnessParams w = plan->params;
                w.j = j;
                auto u = detail::witness_nodal(wdomain, w, rest.empty() ? nullptr : &rest);
                wv.push_back(grid_quotient(wdomain, wdist, pt.p, pt.beta, u).value);
            }
            js = witness_js(*plan);
        }
        pt.numeric = classify_refinement(runs, wv, js);
        pt.disagreement = (pt.predicted == Predicted::Admits && pt.numeric.label == NumericLabel::FailsEvidence) ||
                          (pt.predicted == Predicted::Fails && pt.numeric.label == NumericLabel::HoldsEvidence);
    };

    const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(map.points.size())));
    if (threads == 1) {
        for (auto& pt : map.points) evaluate(pt);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < map.points.size() && !failed;) {
                    try {
                        evaluate(map.points[i]);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }
    return map;
}

}  // namespace hardylab
