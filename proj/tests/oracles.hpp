#pragma once

// Independent reference implementations used to derive frozen test values.
// They favour obviousness over speed and share no code with the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hardylab/geometry.hpp"

namespace oracle {

using hardylab::Ball;
using hardylab::GridDomain;
using hardylab::PointSet;

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

// Nearest complement node by exhaustive search.
inline double brute_distance(const GridDomain& g, std::size_t node) {
    auto x = g.coords(node);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < g.node_count(); ++j)
        if (g.complement[j]) best = std::min(best, dist(x, g.coords(j)));
    return best;
}

// Greedy packing over points in index order (the set is kept lexicographic).
inline std::vector<std::size_t> greedy_packing(const PointSet& E, double r, const Ball& w) {
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < E.size(); ++i) {
        auto x = E.point(i);
        if (dist(x, w.center) > w.radius) continue;
        bool ok = true;
        for (std::size_t j : picked) ok = ok && dist(x, E.point(j)) > 2 * r;
        if (ok) picked.push_back(i);
    }
    return picked;
}

// 2D Hardy quotient by explicit cell loops: squared forward differences
// averaged over the two parallel edges of each cell, cell distance the corner
// mean, cells kept when a corner is interior.
inline double quotient_2d(const GridDomain& g, const std::vector<double>& d, const std::vector<double>& u, double p,
                          double beta) {
    const std::int64_t nx = g.shape[0], ny = g.shape[1];
    auto at = [&](std::int64_t i, std::int64_t j) { return static_cast<std::size_t>(i + nx * j); };
    auto val = [&](std::size_t k) { return g.is_interior(k) ? u[k] : 0.0; };
    const double h = g.h;
    double num = 0.0, den = 0.0;
    for (std::int64_t j = 0; j + 1 < ny; ++j)
        for (std::int64_t i = 0; i + 1 < nx; ++i) {
            std::size_t a = at(i, j), b = at(i + 1, j), c = at(i, j + 1), e = at(i + 1, j + 1);
            if (!(g.is_interior(a) || g.is_interior(b) || g.is_interior(c) || g.is_interior(e))) continue;
            double gx = (std::pow(val(b) - val(a), 2) + std::pow(val(e) - val(c), 2)) / (2 * h * h);
            double gy = (std::pow(val(c) - val(a), 2) + std::pow(val(e) - val(b), 2)) / (2 * h * h);
            double dc = (d[a] + d[b] + d[c] + d[e]) / 4;
            num += std::pow(gx + gy, p / 2) * std::pow(dc, beta) * h * h;
        }
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.is_interior(k)) den += std::pow(std::abs(u[k]), p) * std::pow(d[k], beta - p) * h * h;
    return num / den;
}

// Left endpoints of the depth-k middle-thirds intervals, from base-3 digits {0, 2}.
inline std::vector<double> cantor_points(int depth) {
    std::vector<double> out;
    for (long m = 0; m < (1L << depth); ++m) {
        double x = 0.0, scale = 1.0;
        for (int k = depth - 1; k >= 0; --k) {
            scale /= 3.0;
            if (m >> k & 1) x += 2 * scale;
        }
        out.push_back(x);
    }
    return out;
}

}  // namespace oracle
