#include "hardylab/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hardylab/dimension.hpp"
#include "hardylab/error.hpp"

namespace hardylab {

using nlohmann::json;

namespace {

json default_maps() {
    return json::array({{{"ratio", 1.0 / 3}, {"translation", {0.0}}}, {{"ratio", 1.0 / 3}, {"translation", {2.0 / 3}}}});
}

const std::vector<FixtureInfo>& registry() {
    static const std::vector<FixtureInfo> r = {
        {"punctured_square",
         {"domain"},
         "Omega = X \\ {0} in the box X = [-L, L]^n; the outer boundary of X is free (not complement).",
         {{"n", 2, "ambient dimension"}, {"half_width", 1.0, "L"}}},
        {"perforated_disk",
         {"domain"},
         "Omega = B(0, radius) \\ (union of B(w_j, 4^-j) for j_min <= j <= j_max, and {0}), w_j = (2^-j, 0, ...).",
         {{"n", 2, "ambient dimension"},
          {"radius", 2.0, "outer radius"},
          {"j_min", 2, "first removed ball"},
          {"j_max", 4, "last removed ball (j_max < j_min gives the punctured disk)"},
          {"pad", 0.0, "extra complement margin around the disk"}}},
        {"punctured_disk",
         {"domain"},
         "Omega = B(0, radius) \\ {0}.",
         {{"n", 2, "ambient dimension"}, {"radius", 1.0, "outer radius"}, {"pad", 0.0, "extra complement margin"}}},
        {"exterior_ball",
         {"domain"},
         "Omega = R^n \\ B(0, radius), truncated to [-box, box]^n with vanishing values on the box boundary.",
         {{"n", 2, "ambient dimension"}, {"radius", 1.0, "ball radius"}, {"box", 4.0, "truncation half width"}}},
        {"interval",
         {"domain", "line"},
         "Omega = (0, L) with d(x) = x; grids clamp x = L. Line form: log grid on (eps, L) with count nodes.",
         {{"L", 1.0, "right end"}, {"eps", 1e-20, "line form: left truncation"}, {"count", 4096, "line form: nodes"}}},
        {"radial",
         {"domain", "line"},
         "Omega = R^n \\ {0} truncated at |x| = L. Line form: radial reduction with weight t^(n-1).",
         {{"n", 3, "ambient dimension"},
          {"L", 1.0, "truncation radius"},
          {"eps", 1e-20, "line form: inner truncation"},
          {"count", 4096, "line form: nodes"}}},
        {"cantor_complement",
         {"domain"},
         "Omega = (-pad, 1 + pad) \\ C with C the depth-k middle-thirds prefractal (left endpoints).",
         {{"depth", 8, "prefractal depth"}, {"pad", 1.0, "margin on both sides"}}},
        {"ifs",
         {"domain", "set"},
         "Prefractal of an IFS of similarities; as a domain its complement inside the padded bounding box.",
         {{"dim", 1, "ambient dimension"},
          {"maps", default_maps(), "list of {ratio, translation, rotation (row-major, optional)}"},
          {"depth", 8, "prefractal depth"},
          {"seed", json::array({json::array({0.0})}), "seed points"},
          {"pad", 1.0, "domain form: margin around the bounding box"}}},
        {"mask_csv",
         {"domain"},
         "Explicit complement: CSV of node indices on the grid [lo, hi] (axis 0 fastest).",
         {{"path", "", "CSV file"},
          {"lo", json::array({0.0}), "box lower corner"},
          {"hi", json::array({1.0}), "box upper corner"},
          {"truncate_box", false, "clamp values on the box boundary"}}},
        {"cantor", {"set"}, "Depth-k middle-thirds prefractal, seed {0}.", {{"depth", 8, "prefractal depth"}}},
        {"point",
         {"set"},
         "The origin of R^n.",
         {{"n", 1, "ambient dimension"}, {"resolution", 1e-9, "representation scale"}}},
        {"interval_points", {"set"}, "count equispaced points on [0, L].", {{"count", 1025, "points"}, {"L", 1.0, "length"}}},
        {"geometric_sequence",
         {"set"},
         "{2^-j : j_min <= j <= j_max} and 0 on the line.",
         {{"j_min", 2, "first exponent"}, {"j_max", 20, "last exponent"}}},
        {"segment",
         {"set"},
         "count equispaced points of [0, L] x {0} in R^2.",
         {{"count", 1025, "points"}, {"L", 1.0, "length"}}},
        {"perforated_disk_complement",
         {"set"},
         "Removed balls B(w_j, 4^-j) sampled on a lattice of spacing res, plus the origin (R^2).",
         {{"j_min", 2, "first ball"}, {"j_max", 8, "last ball"}, {"res", 1.0 / 1024, "lattice spacing"}}},
    };
    return r;
}

double num(const json& p, const char* key) {
    const auto& v = p.at(key);
    require(v.is_number(), ErrorKind::InvalidArgument, std::string("parameter '") + key + "' must be a number");
    return v.get<double>();
}

int integer(const json& p, const char* key) {
    const auto& v = p.at(key);
    require(v.is_number_integer(), ErrorKind::InvalidArgument, std::string("parameter '") + key + "' must be an integer");
    return v.get<int>();
}

Point vec(const json& p, const char* key) {
    const auto& v = p.at(key);
    require(v.is_array(), ErrorKind::InvalidArgument, std::string("parameter '") + key + "' must be an array");
    Point out;
    for (const auto& x : v) {
        require(x.is_number(), ErrorKind::InvalidArgument, std::string("parameter '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string tag_of(const std::string& name, const json& p) { return name + p.dump(); }

double norm(const Point& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

GridDomain cube(int n, double half, double h, std::size_t budget) {
    require(n >= 1 && n <= 8, ErrorKind::InvalidArgument, "dimension must be in 1..8");
    return make_grid(Point(n, -half), Point(n, half), h, budget);
}

void mark_origin(GridDomain& g) {
    Point o(g.dim(), 0.0);
    auto i = g.nearest_node(o.data());
    require(i.has_value(), ErrorKind::InvalidArgument, "origin outside the grid");
    require(distance(g.coords(*i).data(), o.data(), g.dim()) < 1e-9 * g.h, ErrorKind::InvalidArgument,
            "grid spacing must place a node at the origin");
    g.complement[*i] = 1;
}

void mark_box_boundary(GridDomain& g) {
    g.truncated.assign(g.node_count(), 0);
    std::int64_t idx[8];
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        g.unravel(i, idx);
        for (int k = 0; k < g.dim(); ++k)
            if (idx[k] == 0 || idx[k] == g.shape[k] - 1) g.truncated[i] = !g.complement[i];
    }
}

IFSSpec ifs_from(const json& p) {
    IFSSpec ifs;
    ifs.dim = integer(p, "dim");
    for (const auto& m : p.at("maps")) {
        Similarity s;
        s.ratio = num(m, "ratio");
        s.translation = vec(m, "translation");
        if (m.contains("rotation")) s.rotation = vec(m, "rotation");
        ifs.maps.push_back(std::move(s));
    }
    ifs.validate();
    return ifs;
}

PointSet ifs_set(const json& p) {
    IFSSpec ifs = ifs_from(p);
    std::vector<double> seed;
    for (const auto& s : p.at("seed")) {
        require(s.is_array() && static_cast<int>(s.size()) == ifs.dim, ErrorKind::InvalidArgument,
                "seed points must match the IFS dimension");
        for (const auto& v : s) seed.push_back(v.get<double>());
    }
    require(!seed.empty(), ErrorKind::InvalidArgument, "empty seed");
    PointSet seed_set(ifs.dim, seed, 1e-12);
    return generate_prefractal(ifs, integer(p, "depth"), seed_set);
}

PointSet cantor_set(int depth) {
    return generate_prefractal(IFSSpec::middle_thirds(), depth, PointSet(1, {0.0}, 1.0));
}

std::vector<std::size_t> read_mask_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::InvalidArgument, "cannot open mask file '" + path + "'");
    std::vector<std::size_t> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell.erase(0, cell.find_first_not_of(" \t\r\""));
            cell.erase(cell.find_last_not_of(" \t\r\"") + 1);
            if (cell.empty()) continue;
            try {
                std::size_t used = 0;
                long long v = std::stoll(cell, &used);
                require(used == cell.size() && v >= 0, ErrorKind::InvalidArgument, "bad node index '" + cell + "'");
                out.push_back(static_cast<std::size_t>(v));
            } catch (const std::logic_error&) {
                require(first, ErrorKind::InvalidArgument, "bad node index '" + cell + "'");
            }
        }
        first = false;
    }
    return out;
}

}  // namespace

std::vector<FixtureInfo> list_fixtures() { return registry(); }

const FixtureInfo& fixture_info(const std::string& name) {
    for (const auto& f : registry())
        if (f.name == name) return f;
    throw Error(ErrorKind::InvalidArgument, "unknown fixture '" + name + "'");
}

bool has_kind(const std::string& name, const std::string& kind) {
    for (const auto& f : registry())
        if (f.name == name) return std::find(f.kinds.begin(), f.kinds.end(), kind) != f.kinds.end();
    return false;
}

json resolve_params(const std::string& name, const json& params) {
    const auto& info = fixture_info(name);
    require(params.is_null() || params.is_object(), ErrorKind::InvalidArgument, "fixture parameters must be an object");
    json out = json::object();
    for (const auto& d : info.params) out[d.name] = d.default_value;
    if (params.is_object())
        for (auto it = params.begin(); it != params.end(); ++it) {
            require(out.contains(it.key()), ErrorKind::InvalidArgument,
                    "fixture '" + name + "' has no parameter '" + it.key() + "'");
            out[it.key()] = it.value();
        }
    return out;
}

GridDomain build_domain(const std::string& name, const json& params, double h, std::size_t budget) {
    require(has_kind(name, "domain"), ErrorKind::InvalidArgument, "'" + name + "' is not a domain fixture");
    const json p = resolve_params(name, params);
    GridDomain g;
    if (name == "punctured_square") {
        g = cube(integer(p, "n"), num(p, "half_width"), h, budget);
        mark_origin(g);
    } else if (name == "perforated_disk" || name == "punctured_disk") {
        const double radius = num(p, "radius"), pad = num(p, "pad");
        require(radius > 0.0 && pad >= 0.0, ErrorKind::InvalidArgument, "radius must be positive, pad nonnegative");
        g = cube(integer(p, "n"), radius + pad, h, budget);
        int j_min = 1, j_max = 0;
        if (name == "perforated_disk") {
            j_min = integer(p, "j_min");
            j_max = integer(p, "j_max");
            require(j_min >= 1, ErrorKind::InvalidArgument, "j_min must be >= 1");
        }
        Point x(g.dim());
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            g.coords(i, x.data());
            if (norm(x) >= radius * (1.0 - 1e-12)) g.complement[i] = 1;
            for (int j = j_min; j <= j_max; ++j) {
                Point w(g.dim(), 0.0);
                w[0] = std::ldexp(1.0, -j);
                if (distance(x.data(), w.data(), g.dim()) <= std::ldexp(1.0, -2 * j) * (1.0 + 1e-12)) g.complement[i] = 1;
            }
        }
        for (int j = j_min; j <= j_max; ++j) {
            Point w(g.dim(), 0.0);
            w[0] = std::ldexp(1.0, -j);
            g.complement[*g.nearest_node(w.data())] = 1;
        }
        mark_origin(g);
    } else if (name == "exterior_ball") {
        const double radius = num(p, "radius"), box = num(p, "box");
        require(radius > 0.0 && box > radius, ErrorKind::InvalidArgument, "need 0 < radius < box");
        g = cube(integer(p, "n"), box, h, budget);
        Point x(g.dim());
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            g.coords(i, x.data());
            g.complement[i] = norm(x) <= radius * (1.0 + 1e-12);
        }
        mark_origin(g);
        mark_box_boundary(g);
    } else if (name == "interval") {
        const double L = num(p, "L");
        g = make_grid({0.0}, {L}, h, budget);
        g.complement[0] = 1;
        g.truncated.assign(g.node_count(), 0);
        g.truncated.back() = 1;
    } else if (name == "radial") {
        const double L = num(p, "L");
        g = cube(integer(p, "n"), L, h, budget);
        mark_origin(g);
        g.truncated.assign(g.node_count(), 0);
        Point x(g.dim());
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            g.coords(i, x.data());
            g.truncated[i] = !g.complement[i] && norm(x) >= L * (1.0 - 1e-12);
        }
    } else if (name == "cantor_complement") {
        const double pad = num(p, "pad");
        require(pad > 0.0, ErrorKind::InvalidArgument, "pad must be positive");
        g = make_grid({-pad}, {1.0 + pad}, h, budget);
        rasterize(cantor_set(integer(p, "depth")), g);
        mark_box_boundary(g);
    } else if (name == "ifs") {
        PointSet E = ifs_set(p);
        const double pad = num(p, "pad");
        require(pad > 0.0, ErrorKind::InvalidArgument, "pad must be positive");
        Point lo = E.bbox().lo, hi = E.bbox().hi;
        for (int k = 0; k < E.dim(); ++k) {
            lo[k] = std::floor((lo[k] - pad) / h) * h;
            hi[k] = std::ceil((hi[k] + pad) / h) * h;
        }
        g = make_grid(lo, hi, h, budget);
        rasterize(E, g);
        mark_box_boundary(g);
    } else if (name == "mask_csv") {
        g = make_grid(vec(p, "lo"), vec(p, "hi"), h, budget);
        for (std::size_t i : read_mask_csv(p.at("path").get<std::string>())) {
            require(i < g.node_count(), ErrorKind::InvalidArgument, "mask node index out of range");
            g.complement[i] = 1;
        }
        if (p.at("truncate_box").get<bool>()) mark_box_boundary(g);
    }
    g.tag = tag_of(name, p);
    g.validate();
    return g;
}

GridBuilder domain_builder(const std::string& name, const json& params) {
    json p = resolve_params(name, params);
    require(has_kind(name, "domain"), ErrorKind::InvalidArgument, "'" + name + "' is not a domain fixture");
    return [name, p](double h, std::size_t budget) { return build_domain(name, p, h, budget); };
}

PointSet build_set(const std::string& name, const json& params) {
    require(has_kind(name, "set"), ErrorKind::InvalidArgument, "'" + name + "' is not a set fixture");
    const json p = resolve_params(name, params);
    if (name == "cantor") return cantor_set(integer(p, "depth"));
    if (name == "ifs") return ifs_set(p);
    if (name == "point") {
        int n = integer(p, "n");
        require(n >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
        return PointSet(n, std::vector<double>(n, 0.0), num(p, "resolution"));
    }
    if (name == "interval_points" || name == "segment") {
        int count = integer(p, "count");
        double L = num(p, "L");
        require(count >= 2 && L > 0.0, ErrorKind::InvalidArgument, "need count >= 2 and L > 0");
        int dim = name == "segment" ? 2 : 1;
        std::vector<double> c;
        for (int i = 0; i < count; ++i) {
            c.push_back(L * i / (count - 1));
            if (dim == 2) c.push_back(0.0);
        }
        return PointSet(dim, std::move(c), L / (count - 1));
    }
    if (name == "geometric_sequence") {
        int lo = integer(p, "j_min"), hi = integer(p, "j_max");
        require(lo <= hi, ErrorKind::InvalidArgument, "need j_min <= j_max");
        std::vector<double> c{0.0};
        for (int j = lo; j <= hi; ++j) c.push_back(std::ldexp(1.0, -j));
        return PointSet(1, std::move(c), std::ldexp(1.0, -hi));
    }
    // perforated_disk_complement
    int lo = integer(p, "j_min"), hi = integer(p, "j_max");
    double res = num(p, "res");
    require(lo >= 1 && lo <= hi && res > 0.0, ErrorKind::InvalidArgument, "bad perforated disk set parameters");
    std::vector<double> c{0.0, 0.0};
    for (int j = lo; j <= hi; ++j) {
        double wx = std::ldexp(1.0, -j), rad = std::ldexp(1.0, -2 * j);
        c.push_back(wx);
        c.push_back(0.0);
        auto k = static_cast<long>(std::floor(rad / res));
        for (long a = -k; a <= k; ++a)
            for (long b = -k; b <= k; ++b) {
                if ((a == 0 && b == 0) || std::hypot(a * res, b * res) > rad) continue;
                c.push_back(wx + a * res);
                c.push_back(b * res);
            }
    }
    return PointSet(2, std::move(c), res);
}

GeometryPtr build_line(const std::string& name, const json& params) {
    require(has_kind(name, "line"), ErrorKind::InvalidArgument, "'" + name + "' has no line form");
    const json p = resolve_params(name, params);
    int radial = name == "radial" ? integer(p, "n") : 1;
    auto count = static_cast<std::size_t>(integer(p, "count"));
    return line_geometry(log_grid(num(p, "eps"), num(p, "L"), count), radial, tag_of(name, p));
}

std::function<GeometryPtr(double h)> line_builder(const std::string& name, const json& params) {
    json p = resolve_params(name, params);
    require(has_kind(name, "line"), ErrorKind::InvalidArgument, "'" + name + "' has no line form");
    return [name, p](double h) {
        require(h > 0.0, ErrorKind::InvalidArgument, "log step must be positive");
        json q = p;
        double span = std::log(num(p, "L") / num(p, "eps"));
        q["count"] = static_cast<int>(std::llround(span / h)) + 1;
        GeometryPtr g = build_line(name, q);
        auto copy = std::make_shared<DiscreteGeometry>(*g);
        copy->h = h;
        copy->tag = tag_of(name, p);
        return GeometryPtr(copy);
    };
}

std::optional<ComplementSplit> complement_split(const std::string& name, const json& params, const GridDomain& g) {
    if (name != "perforated_disk" && name != "punctured_disk") return std::nullopt;
    (void)params;
    ComplementSplit s;
    s.thick = g.complement;
    s.thin.assign(g.node_count(), 0);
    Point o(g.dim(), 0.0);
    std::size_t c = *g.nearest_node(o.data());
    s.thick[c] = 0;
    s.thin[c] = 1;
    return s;
}

std::vector<std::size_t> complement_window_centers(const GridDomain& g, std::size_t limit) {
    std::vector<std::size_t> boundary, isolated;
    std::int64_t idx[8];
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (!g.complement[i]) continue;
        g.unravel(i, idx);
        bool touches = false, lonely = true;
        for (int k = 0; k < g.dim(); ++k)
            for (int s : {-1, 1}) {
                idx[k] += s;
                if (idx[k] >= 0 && idx[k] < g.shape[k]) {
                    std::size_t j = g.ravel(idx);
                    touches = touches || g.is_interior(j);
                    lonely = lonely && !g.complement[j];
                }
                idx[k] -= s;
            }
        if (lonely) isolated.push_back(i);
        else if (touches) boundary.push_back(i);
    }
    std::vector<std::size_t> out = isolated;
    std::size_t stride = std::max<std::size_t>(1, boundary.size() / std::max<std::size_t>(1, limit));
    for (std::size_t k = 0; k < boundary.size(); k += stride) out.push_back(boundary[k]);
    return out;
}

namespace {

CodimSummary summarize(const GridDomain& base, const std::vector<std::uint8_t>& mask, double R0, double tol) {
    GridDomain g = base;
    g.complement = mask;
    g.truncated.clear();
    DistanceField d = distance_transform(g);
    // Outer radii from R0 down to 16h, so small windows can isolate single
    // features; inner radii from R0/8 down to 2h.
    ScaleGrid sg;
    for (double R = R0; R >= 16 * g.h * (1 - 1e-12); R /= 2) sg.R.push_back(R);
    for (double r = R0 / 8; r >= 2 * g.h * (1 - 1e-12); r /= 2) sg.r.push_back(r);
    require(!sg.r.empty(), ErrorKind::SubResolutionScale, "grid too coarse for the estimation windows");
    auto est = codimension_estimates(g, d, complement_window_centers(g, 128), sg);
    CodimSummary s;
    s.codim_lower = Estimate{est.lower.value, tol};
    s.codim_upper = Estimate{est.upper.value, tol};
    return s;
}

}  // namespace

PredictionInputs estimate_prediction_inputs(const std::string& name, const json& params, double h, double tol) {
    json p = resolve_params(name, params);
    PredictionInputs in;
    double R0 = 0.25;
    if (name == "perforated_disk" || name == "punctured_disk") {
        // Pad so windows centred on the outer circle see the exterior.
        p["pad"] = std::max(num(p, "pad"), R0);
        in.omega_bounded = true;
    } else if (name == "exterior_ball" || name == "radial" || name == "cantor_complement" || name == "ifs") {
        in.omega_bounded = false;
        in.complement_unbounded = false;
    }
    GridDomain g = build_domain(name, p, h);
    in.whole = summarize(g, g.complement, R0, tol);
    if (auto split = complement_split(name, p, g)) {
        in.thick = summarize(g, split->thick, R0, tol);
        in.thin = summarize(g, split->thin, R0, tol);
    }
    return in;
}

}  // namespace hardylab
