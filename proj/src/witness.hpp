#pragma once

#include <vector>

#include "hardylab/hardy.hpp"

namespace hardylab::detail {

// Distance to the complement with the connected complement component nearest
// to c removed; +inf everywhere when nothing else remains.
std::vector<double> distance_to_rest(const GridDomain& domain, const Point& c);

// Witness nodal values; rest may carry a precomputed distance_to_rest field.
std::vector<double> witness_nodal(const GridDomain& domain, const WitnessParams& w, const std::vector<double>* rest);

}  // namespace hardylab::detail
