#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "hardylab/geometry.hpp"
#include "hardylab/hardy.hpp"

namespace hardylab {

struct ParamDoc {
    std::string name;
    nlohmann::json default_value;
    std::string doc;
};

struct FixtureInfo {
    std::string name;
    std::vector<std::string> kinds;  // "domain", "set", "line"
    std::string doc;
    std::vector<ParamDoc> params;
};

std::vector<FixtureInfo> list_fixtures();
const FixtureInfo& fixture_info(const std::string& name);
bool has_kind(const std::string& name, const std::string& kind);

// Params merged over the documented defaults; unknown keys are rejected.
nlohmann::json resolve_params(const std::string& name, const nlohmann::json& params);

GridDomain build_domain(const std::string& name, const nlohmann::json& params, double h,
                        std::size_t grid_budget = kDefaultGridBudget);
GridBuilder domain_builder(const std::string& name, const nlohmann::json& params);

PointSet build_set(const std::string& name, const nlohmann::json& params);

// One-dimensional problems; h is the log-step of the grid.
GeometryPtr build_line(const std::string& name, const nlohmann::json& params);
std::function<GeometryPtr(double h)> line_builder(const std::string& name, const nlohmann::json& params);

// Thick/thin decomposition of the complement mask where the fixture has one:
// thick is the complement of Omega_0, thin the removed set F.
struct ComplementSplit {
    std::vector<std::uint8_t> thick, thin;
};
std::optional<ComplementSplit> complement_split(const std::string& name, const nlohmann::json& params,
                                                const GridDomain& domain);

// Complement nodes with an interior axis neighbour, thinned to about `limit`
// evenly spaced picks; isolated complement nodes are always kept.
std::vector<std::size_t> complement_window_centers(const GridDomain& grid, std::size_t limit);

// Codimension estimates of the complement (and of the split parts) measured on
// a grid of spacing h, each carrying the given tolerance.
PredictionInputs estimate_prediction_inputs(const std::string& name, const nlohmann::json& params, double h,
                                            double tol = 0.1);

}  // namespace hardylab
