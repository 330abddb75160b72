#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hardylab/geometry.hpp"

namespace hardylab {

// p-independent discretization: interior unknowns with node measure and
// distance, and cells whose squared gradient is sum_e coef_e (u_a - u_b)^2.
// Edge endpoints equal to -1 refer to nodes where u vanishes.
struct DiscreteGeometry {
    int dim = 1;
    double h = 0.0;
    std::string tag;
    std::size_t n = 0;
    std::vector<double> node_measure, node_dist;
    std::vector<double> cell_measure, cell_dist;
    std::vector<std::uint32_t> edge_ptr;
    std::vector<std::int64_t> edge_a, edge_b;
    std::vector<double> edge_coef;
    std::vector<std::size_t> unknown_node;  // grid node of each unknown (grid problems)
    std::vector<double> abscissa;           // node position of each unknown (line problems)

    std::size_t cell_count() const { return cell_measure.size(); }
};

using GeometryPtr = std::shared_ptr<const DiscreteGeometry>;

GeometryPtr grid_geometry(const GridDomain& domain, const DistanceField& dist);

// Nodes t_0 < ... < t_N on (0, L]; u vanishes at both ends, d(t) = t, and
// every integral carries the radial weight t^(radial_dim - 1).
GeometryPtr line_geometry(const std::vector<double>& t, int radial_dim, std::string tag);

// count nodes log-spaced from eps to L inclusive.
std::vector<double> log_grid(double eps, double L, std::size_t count);

struct HardyProblem {
    GeometryPtr geom;
    double p = 2.0;
    double beta = 0.0;
    std::vector<double> wden;  // per unknown: measure * d^(beta - p)
    std::vector<double> wnum;  // per cell: measure * d_c^beta
};

HardyProblem make_problem(GeometryPtr geom, double p, double beta);

struct QuotientValue {
    double numerator = 0.0;
    double denominator = 0.0;
    double value = 0.0;
};

QuotientValue quotient(const HardyProblem& problem, const std::vector<double>& u);

// Same quadrature evaluated directly on a grid for a full nodal vector (values
// on non-interior nodes are ignored); avoids assembling very large problems.
QuotientValue grid_quotient(const GridDomain& domain, const DistanceField& dist, double p, double beta,
                            const std::vector<double>& u_full);

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 10000;
    double smoothing = 1e-12;
    int refresh = 8;             // preconditioner refresh period for p != 2
    bool force_descent = false;  // use the general-p path also at p = 2
};

struct RayleighResult {
    double lambda = 0.0;
    double hardy_constant = 0.0;
    std::vector<double> minimizer;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> trace;
    std::vector<double> residual_trace;
    bool converged = false;
    std::string status;  // "converged" or "inconclusive"
};

std::vector<double> default_init(const HardyProblem& problem);
RayleighResult minimize_quotient(const HardyProblem& problem, const std::vector<double>& init,
                                 const SolverOptions& opts = {});

enum class WitnessFamily { Shell, Plateau, Log };

const char* to_string(WitnessFamily f);

struct WitnessParams {
    WitnessFamily family = WitnessFamily::Shell;
    Point center;
    int j = 4;                    // shell/log inner scale 2^-j
    double radius = 0.25;         // plateau ball radius; log outer radius
    double cutoff_width = 0.25;   // shell: width of the log cutoff near the rest of the complement
};

// Nodal values of the witness on every grid node (zero off the interior).
std::vector<double> witness_function(const GridDomain& domain, const DistanceField& dist, const WitnessParams& w);
double witness_quotient(const GridDomain& domain, const DistanceField& dist, const WitnessParams& w, double p,
                        double beta);

enum class NumericLabel { HoldsEvidence, FailsEvidence, Inconclusive };
const char* to_string(NumericLabel l);

struct RefinementRun {
    std::string tag;
    double h = 0.0;
    double lambda = 0.0;
    bool converged = true;
    int iterations = 0;
};

// Per-step ratio of reciprocal increments below which a witness series is
// read as converging to a positive limit rather than decaying to zero.
inline const double kWitnessRateFloor = std::pow(2.0, -0.15);

// Decreasing quotients whose reciprocals keep growing at a non-vanishing rate.
bool witness_certifies_decay(const std::vector<double>& values);

struct RefinementOutcome {
    std::vector<RefinementRun> runs;
    double slope = 0.0;
    std::vector<double> ratios;
    std::vector<int> witness_j;
    std::vector<double> witness_values;
    bool witness_certified = false;
    NumericLabel label = NumericLabel::Inconclusive;
};

RefinementOutcome classify_refinement(const std::vector<RefinementRun>& runs,
                                      const std::vector<double>& witness_values = {},
                                      const std::vector<int>& witness_j = {});

using GridBuilder = std::function<GridDomain(double h, std::size_t grid_budget)>;

struct WitnessPlan {
    WitnessParams params;
    int j_lo = 4;
    int j_hi = 8;
    double h = 0.0;
    std::size_t grid_budget = kDefaultGridBudget;
};

// Witness quotients for j = j_lo..j_hi on one grid of spacing plan.h.
std::vector<double> witness_series(const GridBuilder& build, const WitnessPlan& plan, double p, double beta);
std::vector<double> witness_series(const GridDomain& domain, const DistanceField& dist, const WitnessPlan& plan,
                                   double p, double beta);

RefinementOutcome refinement_study(const GridBuilder& build, const std::vector<double>& hs, double p, double beta,
                                   const SolverOptions& opts = {}, const std::optional<WitnessPlan>& witness = {});
RefinementOutcome refinement_study(const std::function<GeometryPtr(double h)>& build, const std::vector<double>& hs,
                                   double p, double beta, const SolverOptions& opts = {});

struct Estimate {
    double value = 0.0;
    double tol = 0.0;
};

struct CodimSummary {
    std::optional<Estimate> codim_lower;
    std::optional<Estimate> codim_upper;
    std::optional<Estimate> codim_h_lower;  // lower bound for codim_H; defaults to codim_lower
};

struct PredictionInputs {
    CodimSummary whole;
    bool omega_bounded = true;
    bool complement_unbounded = false;
    // Split Omega = Omega_0 \ F: thick = complement of Omega_0, thin = F.
    std::optional<CodimSummary> thick;
    std::optional<CodimSummary> thin;
};

enum class Predicted { Admits, Fails, Boundary, OutOfTheory };
const char* to_string(Predicted l);

Predicted predict_admissibility(const PredictionInputs& in, double p, double beta, double margin);

struct ScanPoint {
    double p = 0.0;
    double beta = 0.0;
    Predicted predicted = Predicted::Boundary;
    RefinementOutcome numeric;
    bool disagreement = false;
};

struct AdmissibilityMap {
    std::vector<double> p_grid, beta_grid;
    double margin = 0.25;
    PredictionInputs inputs;
    std::vector<ScanPoint> points;  // p-major order

    int disagreements() const;
};

struct ScanOptions {
    std::vector<double> hs;
    SolverOptions solver;
    std::optional<WitnessPlan> witness;
    int threads = 1;
    bool run_out_of_theory = true;
};

AdmissibilityMap admissibility_scan(const GridBuilder& build, const PredictionInputs& inputs,
                                    const std::vector<double>& p_grid, const std::vector<double>& beta_grid,
                                    double margin, const ScanOptions& opts);

}  // namespace hardylab
