#include "hardylab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "hardylab/error.hpp"
#include "hardylab/fixtures.hpp"

#ifndef HARDYLAB_VERSION
#define HARDYLAB_VERSION "0.0.0"
#endif

namespace hardylab {

using nlohmann::json;

const char* version() { return HARDYLAB_VERSION; }

namespace {

[[noreturn]] void config_fail(const std::string& what) { throw ConfigError(what); }

// Option defaults per command; null means "derived from the fixture".
json command_defaults(const std::string& command) {
    if (command == "dim")
        return {{"R", nullptr}, {"r", nullptr}, {"scale_ratio_min", nullptr}, {"centers", 256}, {"h", nullptr}};
    if (command == "aikawa")
        return {{"h", nullptr},     {"radii", nullptr}, {"q_lo", 0.0},      {"q_hi", nullptr},
                {"threshold", nullptr}, {"pad", 1.0},   {"centers", 32}};
    if (command == "frostman")
        return {{"delta", nullptr}, {"depth", 6}, {"depth_lo", nullptr}, {"q", 0.5}, {"root", nullptr}, {"R", nullptr}};
    if (command == "hardy")
        return {{"p", 2.0},  {"beta", 0.0},        {"form", "auto"},  {"h", nullptr},
                {"hs", nullptr}, {"tol", 1e-8},    {"max_iter", 10000}, {"witness", nullptr}};
    if (command == "scan")
        return {{"p_grid", {1.25, 1.5, 1.75, 2.0, 2.25}},
                {"beta_grid", {0.0, 0.25, 0.5, 0.75, 1.0}},
                {"margin", 0.25},
                {"hs", {1.0 / 64, 1.0 / 128, 1.0 / 256}},
                {"witness", nullptr},
                {"estimate_h", nullptr},
                {"estimate_tol", 0.1},
                {"tol", 1e-8},
                {"max_iter", 10000},
                {"run_out_of_theory", true}};
    if (command == "example") return {{"p", 2.0}, {"beta", 0.0}};
    config_fail("unknown command '" + command + "' (expected dim, aikawa, frostman, hardy, scan or example)");
}

const std::set<std::string> kExamples = {"perforated_disk", "punctured_square", "punctured_disk", "exterior_ball"};

const char* required_kind(const std::string& command) {
    if (command == "dim" || command == "frostman") return "set";
    if (command == "scan") return "domain";
    return nullptr;
}

double get_num(const json& o, const char* key) {
    const json& v = o.at(key);
    if (!v.is_number()) config_fail(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

std::optional<double> opt_num(const json& o, const char* key) {
    if (o.at(key).is_null()) return std::nullopt;
    return get_num(o, key);
}

int get_int(const json& o, const char* key) {
    const json& v = o.at(key);
    if (!v.is_number_integer()) config_fail(std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

std::vector<double> get_list(const json& o, const char* key) {
    const json& v = o.at(key);
    if (!v.is_array()) config_fail(std::string("'") + key + "' must be a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) config_fail(std::string("'") + key + "' must be a list of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

WitnessPlan parse_witness(const json& w, int dim) {
    if (!w.is_object()) config_fail("'witness' must be an object");
    static const std::set<std::string> keys = {"family", "center", "j_lo", "j_hi", "h", "grid_budget", "radius", "cutoff_width"};
    for (auto it = w.begin(); it != w.end(); ++it)
        if (!keys.count(it.key())) config_fail("unknown witness key '" + it.key() + "'");
    WitnessPlan plan;
    std::string family = w.value("family", "shell");
    if (family == "shell") plan.params.family = WitnessFamily::Shell;
    else if (family == "plateau") plan.params.family = WitnessFamily::Plateau;
    else if (family == "log") plan.params.family = WitnessFamily::Log;
    else config_fail("unknown witness family '" + family + "'");
    plan.params.center = w.contains("center") ? w.at("center").get<Point>() : Point(dim, 0.0);
    if (static_cast<int>(plan.params.center.size()) != dim) config_fail("witness center has the wrong dimension");
    plan.j_lo = w.value("j_lo", plan.j_lo);
    plan.j_hi = w.value("j_hi", plan.j_hi);
    plan.h = w.value("h", 0.0);
    plan.grid_budget = w.value("grid_budget", plan.grid_budget);
    plan.params.radius = w.value("radius", plan.params.radius);
    plan.params.cutoff_width = w.value("cutoff_width", plan.params.cutoff_width);
    return plan;
}

json witness_json(const WitnessPlan& w) {
    return {{"family", to_string(w.params.family)}, {"center", w.params.center}, {"j_lo", w.j_lo}, {"j_hi", w.j_hi},
            {"h", w.h}, {"grid_budget", w.grid_budget}, {"radius", w.params.radius},
            {"cutoff_width", w.params.cutoff_width}};
}

std::string kinds_of(const std::string& name) {
    std::string s;
    for (const auto& k : fixture_info(name).kinds) s += (s.empty() ? "" : ", ") + k;
    return s;
}

// ---------------------------------------------------------------- dim

bool is_cantor(const std::string& builder) { return builder == "cantor"; }

// Windows centred at the left endpoints of level-a triadic intervals with R = 3^-a.
std::vector<Ball> triadic_windows(const PointSet& E, int a_max) {
    std::vector<Ball> w;
    for (int a = 0; a <= a_max; ++a) {
        double R = std::pow(3.0, -a);
        for (std::size_t i = 0; i < E.size(); ++i) {
            double k = E[i][0] / R;
            if (std::abs(k - std::round(k)) < 1e-9) w.push_back({E.point(i), R});
        }
    }
    return w;
}

struct WindowPlan {
    std::vector<Ball> windows;
    std::vector<double> r;
    double ratio_min = 8.0;
};

// Cantor: triadic radii r = 3^-b above the prefractal scale, scale ratio up to
// 3^5, windows at every level that still admits that ratio.
WindowPlan cantor_plan(const PointSet& E, int depth) {
    require(depth >= 2, ErrorKind::InvalidArgument, "Cantor windows need depth >= 2");
    WindowPlan wp;
    int b_max = depth - 1, gap = std::min(5, b_max);
    wp.ratio_min = std::pow(3.0, gap);
    for (int b = 1; b <= b_max; ++b) wp.r.push_back(std::pow(3.0, -b));
    wp.windows = triadic_windows(E, b_max - gap);
    return wp;
}

WindowPlan generic_plan(const PointSet& E, const json& o) {
    WindowPlan wp;
    double diam = E.diameter();
    require(diam > 0.0, ErrorKind::InvalidArgument, "set has a single point; give R and r explicitly");
    std::vector<double> Rs = o.at("R").is_null() ? geometric_grid(diam, 2.0, 4) : get_list(o, "R");
    if (o.at("r").is_null()) {
        for (double r = diam / 2; r >= E.resolution() && wp.r.size() < 14; r /= 2) wp.r.push_back(r);
    } else {
        wp.r = get_list(o, "r");
    }
    std::size_t limit = static_cast<std::size_t>(std::max(1, get_int(o, "centers")));
    std::size_t stride = std::max<std::size_t>(1, E.size() / limit);
    for (std::size_t i = 0; i < E.size(); i += stride)
        for (double R : Rs) wp.windows.push_back({E.point(i), R});
    return wp;
}

void add_estimate_row(CsvTable& t, const DimensionEstimate& e) {
    t.add({to_string(e.kind), format_number(e.value), format_number(e.scale_ratio_min),
           std::to_string(e.samples.size())});
}

ReportBundle run_dim(const ExperimentConfig& c) {
    const json& o = c.options;
    PointSet E = build_set(c.builder, c.params);
    const bool explicit_scales = !o.at("R").is_null() || !o.at("r").is_null();
    WindowPlan wp = is_cantor(c.builder) && !explicit_scales ? cantor_plan(E, c.params.at("depth").get<int>())
                                                             : generic_plan(E, o);
    if (auto rm = opt_num(o, "scale_ratio_min")) wp.ratio_min = *rm;

    auto samples = covering_counts(E, wp.windows, wp.r, wp.ratio_min);
    require(!samples.empty(), ErrorKind::InvalidArgument, "no (R, r) pair reaches the scale ratio");
    DimensionEstimate au = assouad_upper(samples, wp.ratio_min);
    DimensionEstimate al = assouad_lower(samples, wp.ratio_min);
    auto [ml, mu] = minkowski_estimates(samples, wp.ratio_min);

    ReportBundle b;
    CsvTable est{"estimates", {"kind", "value", "scale_ratio_min", "samples"}, {}};
    json results = json::object();
    std::vector<const DimensionEstimate*> all = {&au, &al};
    for (const auto* e : {&au, &al}) {
        add_estimate_row(est, *e);
        results[to_string(e->kind)] = e->value;
    }
    // Minkowski needs a window containing the whole set.
    bool has_global = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.global; });
    if (has_global) {
        for (const auto* e : {&ml, &mu}) {
            add_estimate_row(est, *e);
            results[to_string(e->kind)] = e->value;
            all.push_back(e);
        }
    }

    std::optional<CodimEstimates> codim;
    if (is_cantor(c.builder)) {
        // Same windows on the complement grid at the prefractal resolution.
        int depth = c.params.at("depth").get<int>();
        double h = o.at("h").is_null() ? std::pow(3.0, -depth) : get_num(o, "h");
        GridDomain g = build_domain("cantor_complement", {{"depth", depth}}, h);
        DistanceField d = distance_transform(g);
        std::vector<double> rr;
        for (double r : wp.r)
            if (r >= 2 * h * (1 - 1e-12)) rr.push_back(r);
        codim = codimension_estimates(g, d, wp.windows, rr, wp.ratio_min);
        for (const auto* e : {&codim->lower, &codim->upper}) {
            add_estimate_row(est, *e);
            results[to_string(e->kind)] = e->value;
            all.push_back(e);
        }
        double gap = au.value + codim->lower.value - 1.0;
        est.add({"duality_gap", format_number(gap), format_number(wp.ratio_min), ""});
        results["duality_gap"] = gap;
    }
    b.tables.push_back(est);
    b.tables.push_back(samples_table("samples", all));

    std::vector<PlotSeries> series;
    for (const auto* e : {&au, &al}) {
        PlotSeries s{to_string(e->kind), {}, {}};
        for (const auto& sm : e->samples) s.x.push_back(sm.R / sm.r), s.y.push_back(sm.slope);
        series.push_back(std::move(s));
    }
    b.plots.push_back(line_plot("slopes", "R/r", "slope", series, true, false));
    b.summary = {{"results", results}};
    return b;
}

// ---------------------------------------------------------------- aikawa

struct AikawaSetup {
    GridDomain grid;
    std::vector<AikawaWindow> windows;
};

AikawaSetup aikawa_setup(const ExperimentConfig& c) {
    const json& o = c.options;
    AikawaSetup s;
    if (is_cantor(c.builder)) {
        int depth = c.params.at("depth").get<int>();
        double h = o.at("h").is_null() ? std::pow(3.0, -depth) : get_num(o, "h");
        s.grid = build_domain("cantor_complement", {{"depth", depth}}, h);
        PointSet E = build_set(c.builder, c.params);
        for (const auto& w : cantor_plan(E, depth).windows) s.windows.push_back({w.center, w.radius});
    } else {
        if (o.at("h").is_null()) config_fail("aikawa needs 'h' for builder '" + c.builder + "'");
        const double h = get_num(o, "h");
        if (has_kind(c.builder, "domain")) {
            s.grid = build_domain(c.builder, c.params, h);
        } else {
            PointSet E = build_set(c.builder, c.params);
            const double pad = get_num(o, "pad");
            Point lo = E.bbox().lo, hi = E.bbox().hi;
            for (int k = 0; k < E.dim(); ++k) {
                lo[k] = std::floor((lo[k] - pad) / h) * h;
                hi[k] = std::ceil((hi[k] + pad) / h) * h;
            }
            s.grid = make_grid(lo, hi, h);
            rasterize(E, s.grid);
        }
        std::vector<double> radii;
        if (o.at("radii").is_null()) {
            double pad = get_num(o, "pad");
            for (double r = pad / 2; r >= 2 * h * (1 - 1e-12) && radii.size() < 9; r /= 2) radii.push_back(r);
        } else {
            radii = get_list(o, "radii");
        }
        auto centers = complement_window_centers(s.grid, static_cast<std::size_t>(std::max(1, get_int(o, "centers"))));
        for (std::size_t i : centers)
            for (double r : radii) s.windows.push_back({s.grid.coords(i), r});
    }
    return s;
}

ReportBundle run_aikawa(const ExperimentConfig& c) {
    const json& o = c.options;
    AikawaSetup s = aikawa_setup(c);
    DistanceField d = distance_transform(s.grid);
    double q_lo = get_num(o, "q_lo");
    double q_hi = o.at("q_hi").is_null() ? static_cast<double>(s.grid.dim()) : get_num(o, "q_hi");
    DimensionEstimate e = aikawa_critical_exponent(s.grid, d, s.windows, q_lo, q_hi, opt_num(o, "threshold"));

    ReportBundle b;
    CsvTable est{"estimates", {"kind", "value", "threshold", "windows"}, {}};
    est.add({to_string(e.kind), format_number(e.value), format_number(e.threshold), std::to_string(s.windows.size())});
    CsvTable prof{"profile", {"q", "A"}, {}};
    PlotSeries ps{"A(q)", {}, {}};
    for (auto [q, a] : e.profile) {
        prof.add({format_number(q), format_number(a)});
        ps.x.push_back(q);
        ps.y.push_back(a);
    }
    b.tables = {est, prof, samples_table("samples", {&e})};
    b.plots.push_back(line_plot("profile", "q", "A(q)", {ps}, false, true));
    b.summary = {{"results", {{"aikawa", e.value}, {"threshold", e.threshold}}}};
    return b;
}

// ---------------------------------------------------------------- frostman

// Uniform covers: 2r-balls around maximal r-packings, with 2r = delta^k R.
std::vector<std::vector<Ball>> uniform_covers(const PointSet& E, const PackingTree& tree) {
    std::vector<std::vector<Ball>> covers;
    std::vector<std::size_t> all(E.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (int k = 0; k <= tree.depth; ++k) {
        double rad = tree.R * std::pow(tree.delta, k);
        if (rad / 2 < E.resolution()) break;
        std::vector<Ball> cover;
        for (std::size_t i : maximal_packing(E, rad / 2, all)) cover.push_back({E.point(i), rad});
        covers.push_back(std::move(cover));
    }
    return covers;
}

ReportBundle run_frostman(const ExperimentConfig& c) {
    const json& o = c.options;
    PointSet E = build_set(c.builder, c.params);
    const bool cantor = is_cantor(c.builder);
    double delta = o.at("delta").is_null() ? (cantor ? 1.0 / 3 : 0.25) : get_num(o, "delta");
    double R = o.at("R").is_null() ? (cantor ? 1.0 : E.diameter()) : get_num(o, "R");
    Point w = o.at("root").is_null() ? E.point(0) : o.at("root").get<Point>();
    int depth = get_int(o, "depth");
    int depth_lo = o.at("depth_lo").is_null() ? std::max(1, depth - 2) : get_int(o, "depth_lo");
    double q = get_num(o, "q");
    if (depth_lo < 1 || depth_lo > depth) config_fail("need 1 <= depth_lo <= depth");

    ReportBundle b;
    CsvTable growth{"growth", {"depth", "max_constant", "ratio_to_previous", "conservation_error"}, {}};
    json constants = json::array(), ratios = json::array();
    double prev = 0.0, conservation = 0.0;
    PackingTree tree;
    MeasureDistribution nu;
    GrowthResult g;
    for (int D = depth_lo; D <= depth; ++D) {
        tree = build_packing_tree(E, w, R, delta, D);
        nu = distribute_measure(tree);
        g = growth_check(tree, nu, q);
        double err = static_cast<double>(nu.conservation_error(tree));
        conservation = std::max(conservation, err);
        std::string ratio;
        if (D > depth_lo) {
            ratios.push_back(g.max_constant / prev);
            ratio = format_number(g.max_constant / prev);
        }
        growth.add({std::to_string(D), format_number(g.max_constant), ratio, format_number(err)});
        constants.push_back(g.max_constant);
        prev = g.max_constant;
    }

    CsvTable levels{"levels", {"level", "radius", "nodes", "level_max"}, {}};
    for (int k = 0; k <= tree.depth; ++k)
        levels.add({std::to_string(k), format_number(R * std::pow(delta, k)), std::to_string(tree.levels[k].size()),
                    k < static_cast<int>(g.level_max.size()) ? format_number(g.level_max[k]) : ""});

    auto covers = uniform_covers(E, tree);
    ContentBound cb = content_lower_bound(tree, nu, q, covers, g.max_constant);
    CsvTable content{"content", {"cover_radius", "balls", "sum", "lower_bound", "holds"}, {}};
    for (std::size_t k = 0; k < covers.size(); ++k)
        content.add({format_number(covers[k].front().radius), std::to_string(covers[k].size()), format_number(cb.sums[k]),
                     format_number(cb.lower_bound), cb.sums[k] >= cb.lower_bound * (1 - 1e-12) ? "true" : "false"});
    content.add({"min", "", format_number(cb.min_sum), format_number(cb.lower_bound), cb.holds ? "true" : "false"});

    CsvTable nodes{"tree", {"id", "parent", "level", "center", "radius", "mass"}, {}};
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& nd = tree.nodes[i];
        std::string centre;
        for (std::size_t k = 0; k < nd.center.size(); ++k) centre += (k ? " " : "") + format_number(nd.center[k]);
        nodes.add({std::to_string(i), std::to_string(nd.parent), std::to_string(nd.level), centre,
                   format_number(nd.radius), format_number(nu[i])});
    }
    b.tables = {growth, levels, content, nodes};

    PlotSeries ps{"max constant", {}, {}};
    for (int D = depth_lo; D <= depth; ++D) ps.x.push_back(D), ps.y.push_back(constants[D - depth_lo].get<double>());
    b.plots.push_back(line_plot("growth", "depth", "max constant", {ps}, false, true));
    b.summary = {{"results",
                  {{"max_constants", constants},
                   {"ratios", ratios},
                   {"content_min_sum", cb.min_sum},
                   {"content_lower_bound", cb.lower_bound},
                   {"content_holds", cb.holds},
                   {"conservation_error", conservation}}}};
    return b;
}

// ---------------------------------------------------------------- hardy

SolverOptions solver_options(const json& o) {
    SolverOptions s;
    s.tol = get_num(o, "tol");
    s.max_iter = get_int(o, "max_iter");
    return s;
}

json refinement_results(const RefinementOutcome& r) {
    json lambdas = json::array();
    for (const auto& run : r.runs) lambdas.push_back(run.lambda);
    json out = {{"label", to_string(r.label)}, {"slope", r.slope}, {"lambda", lambdas}, {"ratios", r.ratios}};
    if (!r.witness_values.empty()) {
        out["witness"] = r.witness_values;
        out["witness_certified"] = r.witness_certified;
    }
    return out;
}

void add_refinement(ReportBundle& b, const RefinementOutcome& r) {
    b.tables.push_back(refinement_table(r));
    PlotSeries ps{"lambda_h", {}, {}};
    for (const auto& run : r.runs) ps.x.push_back(run.h), ps.y.push_back(run.lambda);
    b.plots.push_back(line_plot("refinement", "h", "lambda_h", {ps}, true, true));
    if (!r.witness_values.empty()) {
        b.tables.push_back(witness_table(r));
        PlotSeries wq{"witness", {}, {}}, bound{"3/(j ln 2)", {}, {}};
        for (std::size_t i = 0; i < r.witness_values.size(); ++i) {
            wq.x.push_back(r.witness_j[i]);
            wq.y.push_back(r.witness_values[i]);
            bound.x.push_back(r.witness_j[i]);
            bound.y.push_back(3.0 / (r.witness_j[i] * std::log(2.0)));
        }
        b.plots.push_back(line_plot("witness", "j", "quotient", {wq, bound}));
    }
}

ReportBundle run_hardy(const ExperimentConfig& c) {
    const json& o = c.options;
    const double p = get_num(o, "p"), beta = get_num(o, "beta");
    std::string form = o.at("form").get<std::string>();
    const bool has_h = !o.at("h").is_null(), has_hs = !o.at("hs").is_null();
    if (form == "auto") form = has_kind(c.builder, "line") && !has_h && !has_hs ? "line" : "grid";
    if (form != "line" && form != "grid") config_fail("'form' must be auto, line or grid");
    if (form == "line" && !has_kind(c.builder, "line")) config_fail("'" + c.builder + "' has no line form");
    if (form == "grid" && !has_kind(c.builder, "domain")) config_fail("'" + c.builder + "' has no domain form");
    if (has_h && has_hs) config_fail("give either 'h' or 'hs', not both");
    SolverOptions opts = solver_options(o);

    ReportBundle b;
    if (has_hs) {
        auto hs = get_list(o, "hs");
        RefinementOutcome r;
        if (form == "line") {
            if (!o.at("witness").is_null()) config_fail("witnesses need the grid form");
            r = refinement_study(line_builder(c.builder, c.params), hs, p, beta, opts);
        } else {
            std::optional<WitnessPlan> plan;
            GridBuilder build = domain_builder(c.builder, c.params);
            if (!o.at("witness").is_null()) plan = parse_witness(o.at("witness"), build(hs.front(), kDefaultGridBudget).dim());
            r = refinement_study(build, hs, p, beta, opts, plan);
        }
        add_refinement(b, r);
        b.summary = {{"results", refinement_results(r)}};
        return b;
    }

    GeometryPtr geom;
    if (form == "line") {
        geom = build_line(c.builder, c.params);
    } else {
        if (!has_h) config_fail("the grid form needs 'h' or 'hs'");
        GridDomain g = build_domain(c.builder, c.params, get_num(o, "h"));
        geom = grid_geometry(g, distance_transform(g));
    }
    HardyProblem pr = make_problem(geom, p, beta);
    RayleighResult r = minimize_quotient(pr, default_init(pr), opts);

    CsvTable res{"result", {"unknowns", "lambda", "hardy_constant", "iterations", "residual", "status"}, {}};
    res.add({std::to_string(pr.wden.size()), format_number(r.lambda), format_number(r.hardy_constant),
             std::to_string(r.iterations), format_number(r.residual), r.status});
    b.tables = {res, trace_table(r)};
    PlotSeries ps{"quotient", {}, {}};
    for (std::size_t i = 0; i < r.trace.size(); ++i) ps.x.push_back(static_cast<double>(i)), ps.y.push_back(r.trace[i]);
    b.plots.push_back(line_plot("trace", "iteration", "quotient", {ps}, false, true));
    b.summary = {{"results",
                  {{"lambda", r.lambda},
                   {"hardy_constant", r.hardy_constant},
                   {"iterations", r.iterations},
                   {"residual", r.residual},
                   {"status", r.status}}}};
    return b;
}

// ---------------------------------------------------------------- scan and examples

CsvTable inputs_table(const PredictionInputs& in) {
    CsvTable t{"prediction_inputs", {"part", "codim_lower", "codim_upper", "tol"}, {}};
    auto row = [&](const char* part, const CodimSummary& s) {
        t.add({part, format_number(s.codim_lower->value), format_number(s.codim_upper->value),
               format_number(s.codim_lower->tol)});
    };
    row("whole", in.whole);
    if (in.thick) row("thick", *in.thick);
    if (in.thin) row("thin", *in.thin);
    return t;
}

json inputs_json(const PredictionInputs& in) {
    auto one = [](const CodimSummary& s) {
        return json{{"codim_lower", s.codim_lower->value}, {"codim_upper", s.codim_upper->value}};
    };
    json j = {{"whole", one(in.whole)}};
    if (in.thick) j["thick"] = one(*in.thick);
    if (in.thin) j["thin"] = one(*in.thin);
    return j;
}

ReportBundle run_scan(const ExperimentConfig& c) {
    const json& o = c.options;
    ScanOptions so;
    so.hs = get_list(o, "hs");
    so.solver = solver_options(o);
    so.threads = c.threads;
    so.run_out_of_theory = o.at("run_out_of_theory").get<bool>();
    GridBuilder build = domain_builder(c.builder, c.params);
    if (!o.at("witness").is_null()) {
        so.witness = parse_witness(o.at("witness"), build(so.hs.front(), kDefaultGridBudget).dim());
    } else if (c.builder == "punctured_disk") {
        WitnessPlan w;
        w.params.center = Point(c.params.at("n").get<int>(), 0.0);
        w.j_lo = 3;
        w.j_hi = 7;
        w.h = std::pow(2.0, -9);
        so.witness = w;
    }
    double est_h = o.at("estimate_h").is_null() ? *std::min_element(so.hs.begin(), so.hs.end()) : get_num(o, "estimate_h");
    PredictionInputs in = estimate_prediction_inputs(c.builder, c.params, est_h, get_num(o, "estimate_tol"));
    AdmissibilityMap map = admissibility_scan(build, in, get_list(o, "p_grid"), get_list(o, "beta_grid"),
                                              get_num(o, "margin"), so);

    ReportBundle b;
    CsvTable totals{"totals", {"points", "disagreements"}, {}};
    totals.add({std::to_string(map.points.size()), std::to_string(map.disagreements())});
    b.tables = {scan_table(map), inputs_table(in), totals};
    b.plots.push_back(scan_heatmap(map));
    b.summary = {{"results",
                  {{"points", map.points.size()}, {"disagreements", map.disagreements()}, {"inputs", inputs_json(in)}}}};
    if (so.witness) b.summary["witness"] = witness_json(*so.witness);
    return b;
}

struct ExamplePreset {
    std::string builder;
    std::vector<double> hs;
    std::optional<WitnessPlan> witness;
};

ExamplePreset example_preset(const std::string& name) {
    auto shell = [](int j_lo, int j_hi, int level, std::size_t budget) {
        WitnessPlan w;
        w.params.center = {0.0, 0.0};
        w.j_lo = j_lo;
        w.j_hi = j_hi;
        w.h = std::pow(2.0, -level);
        w.grid_budget = budget;
        return w;
    };
    auto hs = [](int k) { return std::vector<double>{std::pow(2.0, -k), std::pow(2.0, -k - 1), std::pow(2.0, -k - 2)}; };
    if (name == "perforated_disk") return {"perforated_disk", hs(6), shell(4, 8, 10, std::size_t{1} << 25)};
    if (name == "punctured_square") return {"punctured_square", hs(5), shell(4, 8, 10, kDefaultGridBudget)};
    if (name == "punctured_disk") return {"punctured_disk", hs(6), shell(3, 7, 9, kDefaultGridBudget)};
    return {"exterior_ball", hs(4), std::nullopt};
}

ReportBundle run_example(const ExperimentConfig& c) {
    const json& o = c.options;
    const double p = get_num(o, "p"), beta = get_num(o, "beta");
    ExamplePreset ex = example_preset(c.builder);
    RefinementOutcome r = refinement_study(domain_builder(ex.builder, c.params), ex.hs, p, beta, {}, ex.witness);
    PredictionInputs in = estimate_prediction_inputs(ex.builder, c.params, ex.hs.back());
    Predicted pred = predict_admissibility(in, p, beta, 0.25);

    ReportBundle b;
    add_refinement(b, r);
    b.tables.push_back(inputs_table(in));
    CsvTable verdict{"verdict", {"p", "beta", "predicted", "numeric"}, {}};
    verdict.add({format_number(p), format_number(beta), to_string(pred), to_string(r.label)});
    b.tables.push_back(verdict);
    json results = refinement_results(r);
    results["predicted"] = to_string(pred);
    results["inputs"] = inputs_json(in);
    b.summary = {{"results", results}, {"fixture", ex.builder}};
    if (ex.witness) b.summary["witness"] = witness_json(*ex.witness);
    return b;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) config_fail("config must be a JSON object");
    ExperimentConfig c;
    c.raw = doc;
    if (!doc.contains("command") || !doc.at("command").is_string()) config_fail("missing 'command'");
    c.command = doc.at("command").get<std::string>();
    json opts = command_defaults(c.command);

    static const std::set<std::string> common = {"command", "builder", "name", "params", "threads", "out", "random_free"};
    if (c.command == "example") {
        if (!doc.contains("name") || !doc.at("name").is_string()) config_fail("'example' needs a 'name'");
        c.builder = doc.at("name").get<std::string>();
        if (!kExamples.count(c.builder)) {
            std::string known;
            for (const auto& k : kExamples) known += (known.empty() ? "" : ", ") + k;
            config_fail("unknown example '" + c.builder + "' (known: " + known + ")");
        }
    } else {
        if (!doc.contains("builder") || !doc.at("builder").is_string()) config_fail("missing 'builder'");
        c.builder = doc.at("builder").get<std::string>();
        try {
            fixture_info(c.builder);
        } catch (const Error& e) {
            config_fail(e.what());
        }
        if (const char* kind = required_kind(c.command); kind && !has_kind(c.builder, kind))
            config_fail("'" + c.command + "' needs a " + kind + " builder; '" + c.builder + "' is " + kinds_of(c.builder));
    }
    const std::string fixture = c.command == "example" ? example_preset(c.builder).builder : c.builder;

    json fparams = doc.contains("params") ? doc.at("params") : json::object();
    if (!fparams.is_object()) config_fail("'params' must be an object");
    std::set<std::string> fixture_keys;
    for (const auto& pd : fixture_info(fixture).params) fixture_keys.insert(pd.name);
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        std::string key = it.key() == "β" ? "beta" : it.key();
        if (common.count(key)) continue;
        if (opts.contains(key)) opts[key] = it.value();
        else if (fixture_keys.count(key)) fparams[key] = it.value();
        else config_fail("unknown key '" + it.key() + "' for command '" + c.command + "'");
    }
    if (doc.contains("random_free") && doc.at("random_free") != true)
        config_fail("every pipeline is deterministic; 'random_free' can only be true");
    try {
        c.params = resolve_params(fixture, fparams);
    } catch (const Error& e) {
        config_fail(e.what());
    }
    c.options = opts;
    if (doc.contains("threads")) {
        if (!doc.at("threads").is_number_integer() || doc.at("threads").get<int>() < 1)
            config_fail("'threads' must be a positive integer");
        c.threads = doc.at("threads").get<int>();
    }
    for (const char* k : {"p", "beta", "margin", "q", "q_lo", "tol"})
        if (c.options.contains(k) && !c.options.at(k).is_number())
            config_fail(std::string("'") + k + "' must be a number");
    return c;
}

ReportBundle run(const ExperimentConfig& c) {
    auto start = std::chrono::steady_clock::now();
    ReportBundle b;
    try {
        if (c.command == "dim") b = run_dim(c);
        else if (c.command == "aikawa") b = run_aikawa(c);
        else if (c.command == "frostman") b = run_frostman(c);
        else if (c.command == "hardy") b = run_hardy(c);
        else if (c.command == "scan") b = run_scan(c);
        else if (c.command == "example") b = run_example(c);
        else config_fail("unknown command '" + c.command + "'");
    } catch (const json::exception& e) {
        config_fail(std::string("bad option value: ") + e.what());
    }
    b.summary["command"] = c.command;
    b.summary[c.command == "example" ? "name" : "builder"] = c.builder;
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    b.provenance = {{"config", c.raw},
                    {"resolved", {{"params", c.params}, {"options", c.options}, {"threads", c.threads}}},
                    {"version", version()},
                    {"random_free", true},
                    {"wall_time_s", wall}};
    return b;
}

}  // namespace hardylab
