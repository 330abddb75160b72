#include "hardylab/frostman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hardylab/error.hpp"

namespace hardylab {

PackingTree build_packing_tree(const PointSet& E, const Point& w, double R, double delta, int depth) {
    require(static_cast<int>(w.size()) == E.dim(), ErrorKind::InvalidArgument, "root dimension mismatch");
    require(R > 0.0, ErrorKind::InvalidArgument, "root radius must be positive");
    require(delta > 0.0 && delta < 0.5, ErrorKind::InvalidArgument, "delta must lie in (0, 1/2)");
    require(depth >= 0, ErrorKind::InvalidArgument, "depth must be nonnegative");
    require(std::pow(delta, depth) * R >= E.resolution() * (1.0 - 1e-12), ErrorKind::SubResolutionScale,
            "leaf radius below the set resolution");
    auto root = E.find(w.data(), E.resolution() / 2);
    require(root.has_value(), ErrorKind::InvalidArgument, "root center is not a point of E");

    PackingTree t;
    t.dim = E.dim();
    t.R = R;
    t.delta = delta;
    t.depth = depth;
    TreeNode r0;
    r0.point = *root;
    r0.center = E.point(*root);
    r0.radius = R;
    r0.volume = ball_volume(t.dim, R);
    t.nodes.push_back(r0);
    t.levels.push_back({0});

    for (int k = 1; k <= depth; ++k) {
        double rk = std::pow(delta, k) * R;
        std::vector<std::size_t> level;
        for (std::size_t pid : t.levels[k - 1]) {
            Ball half{t.nodes[pid].center, t.nodes[pid].radius / 2};
            auto cand = E.in_ball(half);
            require(!cand.empty(), ErrorKind::EmptyWindow, "half parent ball misses E");
            for (std::size_t c : maximal_packing(E, rk, cand)) {
                TreeNode nd;
                nd.point = c;
                nd.center = E.point(c);
                nd.radius = rk;
                nd.level = k;
                nd.parent = static_cast<long>(pid);
                nd.volume = ball_volume(t.dim, rk);
                t.nodes[pid].children.push_back(t.nodes.size());
                level.push_back(t.nodes.size());
                t.nodes.push_back(std::move(nd));
            }
        }
        t.levels.push_back(std::move(level));
    }
    return t;
}

MeasureDistribution distribute_measure(const PackingTree& tree) {
    MeasureDistribution nu;
    nu.mass.assign(tree.nodes.size(), 0.0L);
    nu.normalizer.assign(tree.nodes.size(), 0.0L);
    if (tree.nodes.empty()) return nu;
    nu.mass[0] = 1.0L;
    for (const auto& level : tree.levels)
        for (std::size_t id : level) {
            const auto& nd = tree.nodes[id];
            long double M = 0.0L;
            for (std::size_t c : nd.children) M += static_cast<long double>(tree.nodes[c].volume);
            nu.normalizer[id] = M;
            for (std::size_t c : nd.children)
                nu.mass[c] = nu.mass[id] * static_cast<long double>(tree.nodes[c].volume) / M;
        }
    return nu;
}

long double MeasureDistribution::conservation_error(const PackingTree& tree) const {
    long double worst = 0.0L;
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
        const auto& ch = tree.nodes[id].children;
        if (ch.empty()) continue;
        long double s = 0.0L;
        for (std::size_t c : ch) s += mass[c];
        worst = std::max(worst, std::fabs(s - mass[id]));
    }
    return worst;
}

namespace {

struct LeafIndex {
    std::vector<std::size_t> order;  // node ids sorted by first coordinate
    const PackingTree* tree;

    explicit LeafIndex(const PackingTree& t) : order(t.leaves()), tree(&t) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return t.nodes[a].center[0] < t.nodes[b].center[0];
        });
    }

    template <class F>
    void in_ball(const Ball& b, F&& visit) const {
        auto it = std::lower_bound(order.begin(), order.end(), b.center[0] - b.radius,
                                   [&](std::size_t id, double v) { return tree->nodes[id].center[0] < v; });
        for (; it != order.end() && tree->nodes[*it].center[0] <= b.center[0] + b.radius; ++it)
            if (distance(tree->nodes[*it].center.data(), b.center.data(), tree->dim) <= b.radius) visit(*it);
    }
};

}  // namespace

GrowthResult growth_check(const PackingTree& tree, const MeasureDistribution& nu, double q) {
    require(q > 0.0, ErrorKind::InvalidArgument, "q must be positive");
    require(nu.mass.size() == tree.nodes.size(), ErrorKind::InvalidArgument, "measure does not match tree");
    LeafIndex index(tree);
    GrowthResult res;
    const double mu0 = tree.nodes[0].volume;
    for (int k = 0; k <= tree.depth; ++k) {
        double r = std::pow(tree.delta, k) * tree.R;
        double level_max = 0.0;
        for (std::size_t leaf : tree.leaves()) {
            Ball b{tree.nodes[leaf].center, r};
            long double m = 0.0L;
            index.in_ball(b, [&](std::size_t id) { m += nu.mass[id]; });
            double c = static_cast<double>(m) * mu0 * std::pow(r / tree.R, q) / ball_volume(tree.dim, r);
            level_max = std::max(level_max, c);
            if (c > res.max_constant) {
                res.max_constant = c;
                res.worst = b;
            }
        }
        res.level_max.push_back(level_max);
    }
    return res;
}

ContentBound content_lower_bound(const PackingTree& tree, const MeasureDistribution& nu, double q,
                                 const std::vector<std::vector<Ball>>& covers, double max_constant) {
    require(q >= 0.0, ErrorKind::InvalidArgument, "q must be nonnegative");
    require(max_constant > 0.0, ErrorKind::InvalidArgument, "growth constant must be positive");
    require(!covers.empty(), ErrorKind::InvalidArgument, "no candidate covers");
    require(nu.mass.size() == tree.nodes.size(), ErrorKind::InvalidArgument, "measure does not match tree");
    ContentBound out;
    out.lower_bound = std::pow(tree.R, -q) * tree.nodes[0].volume / max_constant;
    out.min_sum = std::numeric_limits<double>::infinity();
    for (const auto& cover : covers) {
        double sum = 0.0;
        for (const auto& b : cover) {
            require(b.radius > 0.0 && b.radius <= tree.R * (1.0 + 1e-12), ErrorKind::InvalidArgument,
                    "cover ball radius must lie in (0, R]");
            sum += std::pow(b.radius, -q) * ball_volume(tree.dim, b.radius);
        }
        for (std::size_t leaf : tree.leaves()) {
            const double* x = tree.nodes[leaf].center.data();
            bool hit = std::any_of(cover.begin(), cover.end(), [&](const Ball& b) {
                return distance(x, b.center.data(), tree.dim) <= b.radius * (1.0 + 1e-12);
            });
            require(hit, ErrorKind::NotACover, "a leaf center is not covered");
        }
        out.sums.push_back(sum);
        out.min_sum = std::min(out.min_sum, sum);
        if (sum < out.lower_bound * (1.0 - 1e-12)) out.holds = false;
    }
    return out;
}

std::vector<Ball> level_cover(const PackingTree& tree, int level) {
    require(level >= 0 && level <= tree.depth, ErrorKind::InvalidArgument, "level out of range");
    std::vector<Ball> out;
    for (std::size_t id : tree.levels[level]) out.push_back({tree.nodes[id].center, tree.nodes[id].radius});
    return out;
}

}  // namespace hardylab
