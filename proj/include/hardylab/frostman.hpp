#pragma once

#include <vector>

#include "hardylab/geometry.hpp"

namespace hardylab {

struct TreeNode {
    std::size_t point = 0;  // index into E
    Point center;
    double radius = 0.0;
    int level = 0;
    long parent = -1;
    std::vector<std::size_t> children;
    double volume = 0.0;
};

struct PackingTree {
    int dim = 1;
    double R = 0.0;
    double delta = 0.25;
    int depth = 0;
    std::vector<TreeNode> nodes;  // level by level, root first
    std::vector<std::vector<std::size_t>> levels;

    const std::vector<std::size_t>& leaves() const { return levels.back(); }
};

// Children of a level-k node are a maximal delta^{k+1} R packing of
// (half the parent ball) intersected with E.
PackingTree build_packing_tree(const PointSet& E, const Point& w, double R, double delta, int depth);

struct MeasureDistribution {
    std::vector<long double> mass;
    std::vector<long double> normalizer;  // sum of child volumes; 0 at leaves

    double operator[](std::size_t i) const { return static_cast<double>(mass[i]); }
    // Largest |sum of child masses - parent mass| over internal nodes.
    long double conservation_error(const PackingTree& tree) const;
};

MeasureDistribution distribute_measure(const PackingTree& tree);

struct GrowthResult {
    double max_constant = 0.0;
    Ball worst;
    std::vector<double> level_max;  // per test radius delta^k R
};

GrowthResult growth_check(const PackingTree& tree, const MeasureDistribution& nu, double q);

struct ContentBound {
    double min_sum = 0.0;
    double lower_bound = 0.0;
    bool holds = true;
    std::vector<double> sums;
};

ContentBound content_lower_bound(const PackingTree& tree, const MeasureDistribution& nu, double q,
                                 const std::vector<std::vector<Ball>>& covers, double max_constant);

// Balls of radius delta^k R around the level-k centers; they cover every leaf.
std::vector<Ball> level_cover(const PackingTree& tree, int level);

}  // namespace hardylab
