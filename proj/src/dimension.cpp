#include "hardylab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hardylab/error.hpp"

namespace hardylab {

const char* to_string(EstimateKind kind) {
    switch (kind) {
        case EstimateKind::AssouadUpper: return "assouad_upper";
        case EstimateKind::AssouadLower: return "assouad_lower";
        case EstimateKind::MinkowskiUpper: return "minkowski_upper";
        case EstimateKind::MinkowskiLower: return "minkowski_lower";
        case EstimateKind::CodimLower: return "codim_lower";
        case EstimateKind::CodimUpper: return "codim_upper";
        case EstimateKind::Aikawa: return "aikawa";
        case EstimateKind::ContentDensity: return "content_density";
    }
    return "unknown";
}

std::vector<double> geometric_grid(double start, double factor, int count) {
    require(start > 0.0 && factor > 1.0 && count >= 1, ErrorKind::InvalidArgument, "bad geometric grid");
    std::vector<double> g;
    for (int i = 0; i < count; ++i) g.push_back(start / std::pow(factor, i));
    return g;
}

namespace {

bool admitted(const ScaleWindowSample& s, double ratio_min) { return s.R / s.r >= ratio_min * (1.0 - 1e-12); }

DimensionEstimate extremal(const std::vector<ScaleWindowSample>& samples, double ratio_min, EstimateKind kind,
                           bool take_max, bool global_only) {
    DimensionEstimate est;
    est.kind = kind;
    est.scale_ratio_min = ratio_min;
    bool any = false;
    double v = take_max ? 0.0 : std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        if (!admitted(s, ratio_min) || (global_only && !s.global)) continue;
        any = true;
        v = take_max ? std::max(v, s.slope) : std::min(v, s.slope);
        est.samples.push_back(s);
    }
    require(any, ErrorKind::MissingEstimate, std::string("no admissible samples for ") + to_string(kind));
    est.value = std::max(0.0, v);
    return est;
}

}  // namespace

std::vector<ScaleWindowSample> covering_counts(const PointSet& E, const std::vector<Ball>& windows,
                                               const std::vector<double>& r, double scale_ratio_min) {
    for (double rv : r)
        require(rv >= E.resolution() * (1.0 - 1e-12), ErrorKind::SubResolutionScale,
                "inner radius below the set resolution");
    std::vector<ScaleWindowSample> out;
    for (const auto& w : windows) {
        require(w.radius >= E.resolution() * (1.0 - 1e-12), ErrorKind::SubResolutionScale,
                "outer radius below the set resolution");
        require(E.find(w.center.data(), E.resolution() / 2).has_value(), ErrorKind::InvalidArgument,
                "window center is not a point of E");
        auto inside = E.in_ball(w);
        bool global = inside.size() == E.size();
        for (double rv : r) {
            if (!(rv < w.radius) || w.radius / rv < scale_ratio_min * (1.0 - 1e-12)) continue;
            ScaleWindowSample s;
            s.x = w.center;
            s.R = w.radius;
            s.r = rv;
            s.value = static_cast<double>(maximal_packing(E, rv, inside).size());
            s.is_count = true;
            s.global = global;
            s.slope = std::log(s.value) / std::log(s.R / s.r);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<ScaleWindowSample> covering_counts(const PointSet& E, const std::vector<std::size_t>& centers,
                                               const ScaleGrid& grid) {
    std::vector<Ball> windows;
    for (std::size_t c : centers) {
        require(c < E.size(), ErrorKind::InvalidArgument, "center index out of range");
        for (double R : grid.R) windows.push_back({E.point(c), R});
    }
    return covering_counts(E, windows, grid.r, grid.scale_ratio_min);
}

DimensionEstimate assouad_upper(const std::vector<ScaleWindowSample>& samples, double scale_ratio_min) {
    return extremal(samples, scale_ratio_min, EstimateKind::AssouadUpper, true, false);
}

DimensionEstimate assouad_lower(const std::vector<ScaleWindowSample>& samples, double scale_ratio_min) {
    return extremal(samples, scale_ratio_min, EstimateKind::AssouadLower, false, false);
}

std::pair<DimensionEstimate, DimensionEstimate> minkowski_estimates(const std::vector<ScaleWindowSample>& samples,
                                                                    double scale_ratio_min) {
    return {extremal(samples, scale_ratio_min, EstimateKind::MinkowskiLower, false, true),
            extremal(samples, scale_ratio_min, EstimateKind::MinkowskiUpper, true, true)};
}

namespace {

// Calls visit(node) for every grid node in the closed ball.
template <class F>
void for_nodes_in_ball(const GridDomain& g, const double* x, double R, F&& visit) {
    const int n = g.dim();
    std::int64_t lo[8], hi[8], idx[8];
    for (int k = 0; k < n; ++k) {
        lo[k] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((x[k] - R - g.origin[k]) / g.h - 1e-9)));
        hi[k] = std::min<std::int64_t>(g.shape[k] - 1,
                                       static_cast<std::int64_t>(std::floor((x[k] + R - g.origin[k]) / g.h + 1e-9)));
        if (lo[k] > hi[k]) return;
        idx[k] = lo[k];
    }
    double y[8];
    while (true) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            y[k] = g.origin[k] + g.h * static_cast<double>(idx[k]);
            s += (y[k] - x[k]) * (y[k] - x[k]);
        }
        if (std::sqrt(s) <= R) visit(g.ravel(idx));
        int k = 0;
        while (k < n && idx[k] == hi[k]) idx[k] = lo[k], ++k;
        if (k == n) break;
        ++idx[k];
    }
}

void require_complement_center(const GridDomain& g, const double* x) {
    auto node = g.nearest_node(x);
    require(node.has_value() && g.complement[*node], ErrorKind::InvalidArgument,
            "window center is not a complement node");
    for (int k = 0; k < g.dim(); ++k)
        require(std::abs(g.origin[k] + g.h * std::round((x[k] - g.origin[k]) / g.h) - x[k]) <= 1e-9 * g.h + 1e-15,
                ErrorKind::InvalidArgument, "window center is not a grid node");
}

}  // namespace

CodimEstimates codimension_estimates(const GridDomain& grid, const DistanceField& dist,
                                     const std::vector<Ball>& windows, const std::vector<double>& r,
                                     double scale_ratio_min) {
    grid.validate();
    require(dist.d.size() == grid.node_count(), ErrorKind::InvalidArgument, "distance field does not match grid");
    for (double rv : r)
        require(rv >= 2.0 * grid.h * (1.0 - 1e-12), ErrorKind::SubResolutionScale,
                "inner radius below twice the grid spacing");
    std::vector<ScaleWindowSample> samples;
    std::vector<double> ds;
    for (const auto& w : windows) {
        require_complement_center(grid, w.center.data());
        ds.clear();
        for_nodes_in_ball(grid, w.center.data(), w.radius, [&](std::size_t i) { ds.push_back(dist.d[i]); });
        std::sort(ds.begin(), ds.end());
        for (double rv : r) {
            if (!(rv < w.radius) || w.radius / rv < scale_ratio_min * (1.0 - 1e-12)) continue;
            auto near = static_cast<double>(std::lower_bound(ds.begin(), ds.end(), rv) - ds.begin());
            ScaleWindowSample s;
            s.x = w.center;
            s.R = w.radius;
            s.r = rv;
            s.value = near / static_cast<double>(ds.size());
            s.is_count = false;
            s.slope = std::log(s.value) / std::log(rv / w.radius);
            samples.push_back(std::move(s));
        }
    }
    CodimEstimates out;
    out.lower = extremal(samples, scale_ratio_min, EstimateKind::CodimLower, false, false);
    out.upper = extremal(samples, scale_ratio_min, EstimateKind::CodimUpper, true, false);
    return out;
}

CodimEstimates codimension_estimates(const GridDomain& grid, const DistanceField& dist,
                                     const std::vector<std::size_t>& center_nodes, const ScaleGrid& scales) {
    std::vector<Ball> windows;
    for (std::size_t c : center_nodes)
        for (double R : scales.R) windows.push_back({grid.coords(c), R});
    return codimension_estimates(grid, dist, windows, scales.r, scales.scale_ratio_min);
}

namespace {

struct WindowHistogram {
    double r = 0.0;
    double total = 0.0;
    std::vector<std::pair<double, double>> dist_count;  // clamped distance, multiplicity
};

std::vector<WindowHistogram> aikawa_histograms(const GridDomain& grid, const DistanceField& dist,
                                               const std::vector<AikawaWindow>& windows) {
    grid.validate();
    require(dist.d.size() == grid.node_count(), ErrorKind::InvalidArgument, "distance field does not match grid");
    require(!windows.empty(), ErrorKind::InvalidArgument, "no Aikawa windows");
    const int n = grid.dim();

    // Positive measure at grid level: some complement node whose axis neighbours are all complement.
    std::int64_t idx[8];
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        if (!grid.complement[i]) continue;
        grid.unravel(i, idx);
        bool all = true;
        for (int k = 0; k < n && all; ++k)
            for (int s : {-1, 1}) {
                idx[k] += s;
                bool in = idx[k] >= 0 && idx[k] < grid.shape[k] && grid.complement[grid.ravel(idx)];
                idx[k] -= s;
                if (!in) {
                    all = false;
                    break;
                }
            }
        require(!all, ErrorKind::PositiveMeasure, "set has interior grid nodes; the Aikawa integral is infinite");
    }

    std::vector<WindowHistogram> out;
    const double h = grid.h;
    for (const auto& w : windows) {
        require_complement_center(grid, w.x.data());
        require(w.r >= 2.0 * h * (1.0 - 1e-12), ErrorKind::SubResolutionScale, "Aikawa radius below 2h");
        std::map<long long, double> hist;
        double total = 0.0;
        for_nodes_in_ball(grid, w.x.data(), w.r, [&](std::size_t i) {
            double u = dist.d[i] / h;
            hist[std::llround(u * u)] += 1.0;
            total += 1.0;
        });
        WindowHistogram wh;
        wh.r = w.r;
        wh.total = total;
        for (auto [k, c] : hist) wh.dist_count.emplace_back(std::max(h * std::sqrt(static_cast<double>(k)), h / 2), c);
        out.push_back(std::move(wh));
    }
    return out;
}

double profile_value(const std::vector<WindowHistogram>& hs, double q) {
    double A = 0.0;
    for (const auto& w : hs) {
        double s = 0.0;
        for (auto [d, c] : w.dist_count) s += c * std::pow(w.r / d, q);
        A = std::max(A, s / w.total);
    }
    return A;
}

}  // namespace

double aikawa_profile_value(const GridDomain& grid, const DistanceField& dist,
                            const std::vector<AikawaWindow>& windows, double q) {
    return profile_value(aikawa_histograms(grid, dist, windows), q);
}

DimensionEstimate aikawa_critical_exponent(const GridDomain& grid, const DistanceField& dist,
                                           const std::vector<AikawaWindow>& windows, double q_lo, double q_hi,
                                           std::optional<double> boundedness_threshold, int bisection_steps) {
    require(q_hi > q_lo, ErrorKind::InvalidArgument, "q_hi must exceed q_lo");
    require(q_lo >= 0.0, ErrorKind::InvalidArgument, "q_lo must be nonnegative");
    auto hs = aikawa_histograms(grid, dist, windows);

    DimensionEstimate est;
    est.kind = EstimateKind::Aikawa;
    est.scale_ratio_min = 0.0;
    double a_lo = profile_value(hs, q_lo);
    est.profile.emplace_back(q_lo, a_lo);
    double r_max = 0.0;
    for (const auto& w : hs) r_max = std::max(r_max, w.r);
    est.threshold = boundedness_threshold ? *boundedness_threshold : a_lo * (1.0 + std::log(r_max / grid.h));

    double a_hi = profile_value(hs, q_hi);
    est.profile.emplace_back(q_hi, a_hi);
    double lo = q_lo, hi = q_hi;
    if (a_hi <= est.threshold) {
        lo = q_hi;
    } else if (a_lo <= est.threshold) {
        for (int it = 0; it < bisection_steps; ++it) {
            double mid = 0.5 * (lo + hi);
            double a = profile_value(hs, mid);
            est.profile.emplace_back(mid, a);
            (a <= est.threshold ? lo : hi) = mid;
        }
    }
    std::sort(est.profile.begin(), est.profile.end());
    est.value = lo;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        ScaleWindowSample s;
        s.x = windows[i].x;
        s.R = windows[i].r;
        s.r = grid.h;
        s.is_count = false;
        s.value = profile_value({hs[i]}, lo);
        s.slope = lo;
        est.samples.push_back(std::move(s));
    }
    return est;
}

double content_density_upper(const PointSet& E, double q, const Ball& window,
                             const std::vector<double>& cover_scales) {
    require(q >= 0.0, ErrorKind::InvalidArgument, "q must be nonnegative");
    require(window.radius > 0.0, ErrorKind::InvalidArgument, "window radius must be positive");
    auto inside = E.in_ball(window);
    require(!inside.empty(), ErrorKind::EmptyWindow, "no points of E in the window");
    const int n = E.dim();
    // The window itself is an admissible cover.
    double best = std::pow(window.radius, -q) * ball_volume(n, window.radius);
    for (double r : cover_scales) {
        if (!(r > 0.0) || 2.0 * r > window.radius) continue;
        auto centers = maximal_packing(E, r, inside);
        double sum = static_cast<double>(centers.size()) * std::pow(2.0 * r, -q) * ball_volume(n, 2.0 * r);
        best = std::min(best, sum);
    }
    return best * std::pow(window.radius, q) / ball_volume(n, window.radius);
}

}  // namespace hardylab
