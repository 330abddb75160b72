#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hardylab/geometry.hpp"

namespace hardylab {

enum class EstimateKind {
    AssouadUpper,
    AssouadLower,
    MinkowskiUpper,
    MinkowskiLower,
    CodimLower,
    CodimUpper,
    Aikawa,
    ContentDensity,
};

const char* to_string(EstimateKind kind);

struct ScaleWindowSample {
    Point x;
    double R = 0.0;
    double r = 0.0;
    double value = 0.0;   // packing count N, or volume ratio
    bool is_count = true;
    bool global = false;  // window contains all of E
    double slope = 0.0;   // log N / log(R/r), or log(ratio) / log(r/R)
};

struct DimensionEstimate {
    EstimateKind kind = EstimateKind::AssouadUpper;
    double value = 0.0;
    std::vector<ScaleWindowSample> samples;
    double scale_ratio_min = 8.0;
    // Aikawa only: (q, A(q)) pairs in evaluation order, and the threshold used.
    std::vector<std::pair<double, double>> profile;
    double threshold = 0.0;
};

struct ScaleGrid {
    std::vector<double> R;
    std::vector<double> r;
    double scale_ratio_min = 8.0;
};

// start, start/factor, ..., count values.
std::vector<double> geometric_grid(double start, double factor, int count);

std::vector<ScaleWindowSample> covering_counts(const PointSet& E, const std::vector<std::size_t>& centers,
                                               const ScaleGrid& grid);
// Explicit windows; each window center must be a point of E.
std::vector<ScaleWindowSample> covering_counts(const PointSet& E, const std::vector<Ball>& windows,
                                               const std::vector<double>& r, double scale_ratio_min);

DimensionEstimate assouad_upper(const std::vector<ScaleWindowSample>& samples, double scale_ratio_min = 8.0);
DimensionEstimate assouad_lower(const std::vector<ScaleWindowSample>& samples, double scale_ratio_min = 8.0);

// Extremal slopes over the global windows (windows containing E) of the same
// sample table; returns (lower, upper).
std::pair<DimensionEstimate, DimensionEstimate> minkowski_estimates(const std::vector<ScaleWindowSample>& samples,
                                                                    double scale_ratio_min = 8.0);

struct CodimEstimates {
    DimensionEstimate lower;
    DimensionEstimate upper;
};

// E is the complement mask of the grid; window centers must be complement nodes.
CodimEstimates codimension_estimates(const GridDomain& grid, const DistanceField& dist,
                                     const std::vector<Ball>& windows, const std::vector<double>& r,
                                     double scale_ratio_min = 8.0);
CodimEstimates codimension_estimates(const GridDomain& grid, const DistanceField& dist,
                                     const std::vector<std::size_t>& center_nodes, const ScaleGrid& scales);

struct AikawaWindow {
    Point x;
    double r = 0.0;
};

// Windows are balls centred at complement nodes. Without an explicit threshold
// the bound is A(q_lo) * (1 + ln(r_max / r_min)).
DimensionEstimate aikawa_critical_exponent(const GridDomain& grid, const DistanceField& dist,
                                           const std::vector<AikawaWindow>& windows, double q_lo, double q_hi,
                                           std::optional<double> boundedness_threshold = std::nullopt,
                                           int bisection_steps = 40);
// A(q) on the same windows, for diagnostics and tests.
double aikawa_profile_value(const GridDomain& grid, const DistanceField& dist,
                            const std::vector<AikawaWindow>& windows, double q);

double content_density_upper(const PointSet& E, double q, const Ball& window,
                             const std::vector<double>& cover_scales);

}  // namespace hardylab
