#include "hardylab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>

#include "hardylab/error.hpp"
#include "spatial_hash.hpp"

namespace hardylab {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid argument";
        case ErrorKind::BudgetExceeded: return "budget exceeded";
        case ErrorKind::EmptyWindow: return "empty window";
        case ErrorKind::SubResolutionScale: return "sub-resolution scale";
        case ErrorKind::ZeroTestFunction: return "zero test function";
        case ErrorKind::NotACover: return "not a cover";
        case ErrorKind::SubResolutionWitness: return "sub-resolution witness";
        case ErrorKind::MixedDomain: return "mixed domain";
        case ErrorKind::MissingEstimate: return "missing estimate";
        case ErrorKind::PositiveMeasure: return "positive measure";
    }
    return "error";
}

double Box::diameter() const {
    double s = 0.0;
    for (std::size_t k = 0; k < lo.size(); ++k) s += (hi[k] - lo[k]) * (hi[k] - lo[k]);
    return std::sqrt(s);
}

bool Box::contains(const double* x, double slack) const {
    for (std::size_t k = 0; k < lo.size(); ++k)
        if (x[k] < lo[k] - slack || x[k] > hi[k] + slack) return false;
    return true;
}

double distance(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

double ball_volume(int dim, double radius) {
    double unit = std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
    return unit * std::pow(radius, dim);
}

PointSet::PointSet(int dim, std::vector<double> coords, double resolution) : dim_(dim), resolution_(resolution) {
    require(dim >= 1, ErrorKind::InvalidArgument, "point set dimension must be >= 1");
    require(!coords.empty() && coords.size() % dim == 0, ErrorKind::InvalidArgument,
            "point set needs a nonempty coordinate list of multiples of the dimension");
    require(resolution > 0.0 && std::isfinite(resolution), ErrorKind::InvalidArgument,
            "point set resolution must be positive");
    for (double c : coords) require(std::isfinite(c), ErrorKind::InvalidArgument, "non-finite coordinate");

    std::size_t n = coords.size() / dim;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(coords.begin() + a * dim, coords.begin() + (a + 1) * dim,
                                            coords.begin() + b * dim, coords.begin() + (b + 1) * dim);
    });

    double tol = resolution / 2.0;
    detail::SpatialHash hash(dim, tol);
    coords_.reserve(coords.size());
    std::size_t kept = 0;
    for (std::size_t i : order) {
        const double* x = coords.data() + i * dim;
        bool dup = false;
        hash.for_neighbors(x, [&](std::size_t j) {
            if (!dup && distance(x, coords_.data() + j * dim, dim) < tol) dup = true;
        });
        if (dup) continue;
        coords_.insert(coords_.end(), x, x + dim);
        hash.insert(x, kept++);
    }

    bbox_.lo.assign(dim, std::numeric_limits<double>::infinity());
    bbox_.hi.assign(dim, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < kept; ++i)
        for (int k = 0; k < dim; ++k) {
            bbox_.lo[k] = std::min(bbox_.lo[k], coords_[i * dim + k]);
            bbox_.hi[k] = std::max(bbox_.hi[k], coords_[i * dim + k]);
        }
}

std::vector<std::size_t> PointSet::in_ball(const Ball& b) const {
    std::vector<std::size_t> out;
    if (size() == 0) return out;
    double lo = b.center[0] - b.radius;
    // first coordinate is nondecreasing in lexicographic order
    std::size_t a = 0, z = size();
    while (a < z) {
        std::size_t mid = (a + z) / 2;
        if ((*this)[mid][0] < lo) a = mid + 1; else z = mid;
    }
    for (std::size_t i = a; i < size(); ++i) {
        const double* x = (*this)[i];
        if (x[0] > b.center[0] + b.radius) break;
        if (distance(x, b.center.data(), dim_) <= b.radius) out.push_back(i);
    }
    return out;
}

std::optional<std::size_t> PointSet::find(const double* x, double tol) const {
    Ball b{Point(x, x + dim_), tol};
    auto hits = in_ball(b);
    if (hits.empty()) return std::nullopt;
    std::size_t best = hits[0];
    for (std::size_t i : hits)
        if (distance((*this)[i], x, dim_) < distance((*this)[best], x, dim_)) best = i;
    return best;
}

IFSSpec IFSSpec::middle_thirds() {
    IFSSpec ifs;
    ifs.dim = 1;
    ifs.maps.push_back({1.0 / 3.0, {}, {0.0}});
    ifs.maps.push_back({1.0 / 3.0, {}, {2.0 / 3.0}});
    return ifs;
}

void IFSSpec::validate() const {
    require(dim >= 1, ErrorKind::InvalidArgument, "IFS dimension must be >= 1");
    require(!maps.empty(), ErrorKind::InvalidArgument, "IFS needs at least one map");
    for (const auto& m : maps) {
        require(m.ratio > 0.0 && m.ratio < 1.0, ErrorKind::InvalidArgument, "IFS ratio must lie in (0,1)");
        require(m.rotation.empty() || m.rotation.size() == static_cast<std::size_t>(dim * dim),
                ErrorKind::InvalidArgument, "IFS rotation has wrong size");
        require(m.translation.size() == static_cast<std::size_t>(dim), ErrorKind::InvalidArgument,
                "IFS translation has wrong size");
        if (!m.rotation.empty()) {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    double dot = 0.0;
                    for (int k = 0; k < dim; ++k) dot += m.rotation[i * dim + k] * m.rotation[j * dim + k];
                    require(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-9, ErrorKind::InvalidArgument,
                            "IFS rotation is not orthogonal");
                }
        }
    }
}

PointSet generate_prefractal(const IFSSpec& ifs, int depth, const PointSet& seed, std::size_t point_budget) {
    ifs.validate();
    require(depth >= 0, ErrorKind::InvalidArgument, "depth must be nonnegative");
    require(seed.dim() == ifs.dim, ErrorKind::InvalidArgument, "seed dimension differs from IFS dimension");
    double projected = std::pow(static_cast<double>(ifs.maps.size()), depth) * static_cast<double>(seed.size());
    require(projected <= static_cast<double>(point_budget), ErrorKind::BudgetExceeded,
            "prefractal would have " + std::to_string(projected) + " points");

    const int n = ifs.dim;
    std::vector<double> pts = seed.coords();
    std::vector<double> next;
    std::vector<double> tmp(n);
    for (int level = 0; level < depth; ++level) {
        next.clear();
        next.reserve(pts.size() * ifs.maps.size());
        for (const auto& m : ifs.maps) {
            for (std::size_t i = 0; i < pts.size(); i += n) {
                for (int a = 0; a < n; ++a) {
                    double v = 0.0;
                    if (m.rotation.empty()) v = pts[i + a];
                    else
                        for (int b = 0; b < n; ++b) v += m.rotation[a * n + b] * pts[i + b];
                    tmp[a] = m.ratio * v + m.translation[a];
                }
                next.insert(next.end(), tmp.begin(), tmp.end());
            }
        }
        pts.swap(next);
    }

    double max_ratio = 0.0;
    for (const auto& m : ifs.maps) max_ratio = std::max(max_ratio, m.ratio);
    double scale = std::pow(max_ratio, depth);
    double diam = seed.diameter();
    double extent = 1.0;
    {
        Box b{Point(n, std::numeric_limits<double>::infinity()), Point(n, -std::numeric_limits<double>::infinity())};
        for (std::size_t i = 0; i < pts.size(); i += n)
            for (int a = 0; a < n; ++a) {
                b.lo[a] = std::min(b.lo[a], pts[i + a]);
                b.hi[a] = std::max(b.hi[a], pts[i + a]);
                extent = std::max(extent, std::abs(pts[i + a]));
            }
        // A singleton seed has zero diameter; fall back to the generated set's extent.
        if (diam == 0.0) diam = b.diameter();
    }
    double floor_res = 64.0 * std::numeric_limits<double>::epsilon() * extent;
    double res = std::max(scale * diam, floor_res);
    return PointSet(n, std::move(pts), res);
}

std::size_t GridDomain::node_count() const {
    std::size_t n = 1;
    for (auto s : shape) n *= static_cast<std::size_t>(s);
    return n;
}

double GridDomain::cell_measure() const { return std::pow(h, dim()); }

void GridDomain::unravel(std::size_t i, std::int64_t* idx) const {
    for (int k = 0; k < dim(); ++k) {
        idx[k] = static_cast<std::int64_t>(i % static_cast<std::size_t>(shape[k]));
        i /= static_cast<std::size_t>(shape[k]);
    }
}

std::size_t GridDomain::ravel(const std::int64_t* idx) const {
    std::size_t i = 0;
    for (int k = dim() - 1; k >= 0; --k) i = i * static_cast<std::size_t>(shape[k]) + static_cast<std::size_t>(idx[k]);
    return i;
}

void GridDomain::coords(std::size_t i, double* out) const {
    for (int k = 0; k < dim(); ++k) {
        out[k] = origin[k] + h * static_cast<double>(i % static_cast<std::size_t>(shape[k]));
        i /= static_cast<std::size_t>(shape[k]);
    }
}

Point GridDomain::coords(std::size_t i) const {
    Point x(dim());
    coords(i, x.data());
    return x;
}

std::optional<std::size_t> GridDomain::nearest_node(const double* x) const {
    std::int64_t idx[8];
    for (int k = 0; k < dim(); ++k) {
        double t = (x[k] - origin[k]) / h;
        auto j = static_cast<std::int64_t>(std::llround(t));
        if (j < 0 || j >= shape[k]) return std::nullopt;
        idx[k] = j;
    }
    return ravel(idx);
}

std::size_t GridDomain::interior_count() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < node_count(); ++i) c += is_interior(i);
    return c;
}

void GridDomain::validate() const {
    require(dim() >= 1 && dim() <= 8, ErrorKind::InvalidArgument, "grid dimension must be in 1..8");
    require(h > 0.0 && std::isfinite(h), ErrorKind::InvalidArgument, "grid spacing must be positive");
    require(origin.size() == shape.size(), ErrorKind::InvalidArgument, "grid origin/shape mismatch");
    for (auto s : shape) require(s >= 2, ErrorKind::InvalidArgument, "grid needs >= 2 nodes per axis");
    require(complement.size() == node_count(), ErrorKind::InvalidArgument, "complement mask size mismatch");
    require(truncated.empty() || truncated.size() == node_count(), ErrorKind::InvalidArgument,
            "truncation mask size mismatch");
    bool any_c = false, any_i = false;
    for (std::size_t i = 0; i < node_count(); ++i) {
        any_c = any_c || complement[i];
        any_i = any_i || is_interior(i);
    }
    require(any_c, ErrorKind::InvalidArgument, "complement mask is empty");
    require(any_i, ErrorKind::InvalidArgument, "domain has no interior nodes");
}

GridDomain make_grid(const Point& lo, const Point& hi, double h, std::size_t grid_budget) {
    require(lo.size() == hi.size() && !lo.empty(), ErrorKind::InvalidArgument, "grid box corners mismatch");
    require(h > 0.0, ErrorKind::InvalidArgument, "grid spacing must be positive");
    GridDomain g;
    g.origin = lo;
    g.h = h;
    double total = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k) {
        double t = (hi[k] - lo[k]) / h;
        require(t > 0.0, ErrorKind::InvalidArgument, "grid box is empty");
        auto cells = static_cast<std::int64_t>(std::llround(t));
        require(std::abs(t - static_cast<double>(cells)) < 1e-6, ErrorKind::InvalidArgument,
                "grid extent is not a multiple of the spacing");
        g.shape.push_back(cells + 1);
        total *= static_cast<double>(cells + 1);
    }
    require(total <= static_cast<double>(grid_budget), ErrorKind::BudgetExceeded,
            "grid would have " + std::to_string(static_cast<long long>(total)) + " nodes");
    g.complement.assign(g.node_count(), 0);
    return g;
}

void rasterize(const PointSet& E, GridDomain& grid) {
    require(E.dim() == grid.dim(), ErrorKind::InvalidArgument, "set and grid dimensions differ");
    for (std::size_t i = 0; i < E.size(); ++i) {
        auto node = grid.nearest_node(E[i]);
        require(node.has_value(), ErrorKind::InvalidArgument, "point lies outside the grid");
        grid.complement[*node] = 1;
    }
}

namespace {

// Lower envelope of parabolas over the finite entries of f (squared distances in
// units of h^2); entries >= inf are absent sites.
void squared_dt_line(const double* f, double* out, std::size_t n, std::vector<std::size_t>& v,
                     std::vector<double>& z) {
    const double inf = std::numeric_limits<double>::infinity();
    v.resize(n);
    z.resize(n + 1);
    long k = -1;
    for (std::size_t q = 0; q < n; ++q) {
        if (!(f[q] < inf)) continue;
        double s = -inf;
        while (k >= 0) {
            auto p = static_cast<double>(v[k]);
            auto qd = static_cast<double>(q);
            s = ((f[q] + qd * qd) - (f[v[k]] + p * p)) / (2.0 * qd - 2.0 * p);
            if (s <= z[k]) --k;
            else break;
        }
        ++k;
        v[k] = q;
        z[k] = k == 0 ? -inf : s;
        z[k + 1] = inf;
    }
    if (k < 0) {
        for (std::size_t q = 0; q < n; ++q) out[q] = inf;
        return;
    }
    long j = 0;
    for (std::size_t q = 0; q < n; ++q) {
        while (z[j + 1] < static_cast<double>(q)) ++j;
        double dq = static_cast<double>(q) - static_cast<double>(v[j]);
        out[q] = dq * dq + f[v[j]];
    }
}

}  // namespace

DistanceField distance_transform(const GridDomain& domain) {
    domain.validate();
    const std::size_t N = domain.node_count();
    std::vector<double> f(N);
    for (std::size_t i = 0; i < N; ++i)
        f[i] = domain.complement[i] ? 0.0 : std::numeric_limits<double>::infinity();

    std::vector<double> line, res;
    std::vector<std::size_t> v;
    std::vector<double> z;
    std::size_t stride = 1;
    for (int a = 0; a < domain.dim(); ++a) {
        auto len = static_cast<std::size_t>(domain.shape[a]);
        line.resize(len);
        res.resize(len);
        std::size_t block = stride * len;
        for (std::size_t base = 0; base < N; base += block)
            for (std::size_t off = 0; off < stride; ++off) {
                std::size_t start = base + off;
                for (std::size_t t = 0; t < len; ++t) line[t] = f[start + t * stride];
                squared_dt_line(line.data(), res.data(), len, v, z);
                for (std::size_t t = 0; t < len; ++t) f[start + t * stride] = res[t];
            }
        stride = block;
    }

    DistanceField df;
    df.h = domain.h;
    df.d.resize(N);
    for (std::size_t i = 0; i < N; ++i) df.d[i] = domain.h * std::sqrt(f[i]);
    return df;
}

std::vector<std::size_t> maximal_packing(const PointSet& E, double r, const std::vector<std::size_t>& candidates) {
    require(r > 0.0, ErrorKind::InvalidArgument, "packing radius must be positive");
    require(!candidates.empty(), ErrorKind::EmptyWindow, "no points of E in the window");
    const int n = E.dim();
    detail::SpatialHash hash(n, 2.0 * r);
    std::vector<std::size_t> centers;
    for (std::size_t i : candidates) {
        const double* x = E[i];
        bool blocked = false;
        hash.for_neighbors(x, [&](std::size_t c) {
            if (!blocked && distance(x, E[c], n) <= 2.0 * r) blocked = true;
        });
        if (blocked) continue;
        centers.push_back(i);
        hash.insert(x, i);
    }
    return centers;
}

std::vector<std::size_t> maximal_packing(const PointSet& E, double r, const Ball& window) {
    require(static_cast<int>(window.center.size()) == E.dim(), ErrorKind::InvalidArgument,
            "window dimension differs from set dimension");
    return maximal_packing(E, r, E.in_ball(window));
}

bool covers(const PointSet& E, const std::vector<std::size_t>& idx, const std::vector<Ball>& balls) {
    if (balls.empty()) return idx.empty();
    const int n = E.dim();
    std::vector<std::size_t> order(balls.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return balls[a].center[0] < balls[b].center[0]; });
    double rmax = 0.0;
    for (const auto& b : balls) rmax = std::max(rmax, b.radius);
    for (std::size_t i : idx) {
        const double* x = E[i];
        auto it = std::lower_bound(order.begin(), order.end(), x[0] - rmax,
                                   [&](std::size_t b, double v) { return balls[b].center[0] < v; });
        bool hit = false;
        for (; it != order.end() && balls[*it].center[0] <= x[0] + rmax; ++it) {
            const Ball& b = balls[*it];
            if (distance(x, b.center.data(), n) <= b.radius * (1.0 + 1e-12)) {
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

}  // namespace hardylab
