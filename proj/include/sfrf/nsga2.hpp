#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sfrf/masks.hpp"
#include "sfrf/metrics.hpp"

namespace sfrf {

struct GeneBounds {
  double lo = 0.0;
  double hi = 1.0;
};

struct Individual {
  std::vector<double> genome;
  ObjectiveVector objectives;
  bool evaluated = false;
  int rank = -1;
  double crowding = 0.0;
};

struct GaConfig {
  int population_size = 50;  // even, >= 4
  int max_generations = 300;
  double spread_tolerance = 1e-4;
  int stall_window = 25;  // consecutive generations below tolerance
  double crossover_rate = 0.9;
  double crossover_index = 20.0;  // SBX distribution index
  double mutation_index = 20.0;   // polynomial mutation distribution index
  double mutation_rate = 1.0 / 3.0;  // per-gene probability
  std::uint64_t seed = 0;
  int threads = 1;
};

void validate(const GaConfig& config);

struct ParetoArchive {
  std::vector<Individual> members;  // mutually non-dominated
  int generation_found = 0;
};

struct EvolveResult {
  ParetoArchive archive;
  std::vector<double> spread_history;  // one entry per generation
  // Objective vectors of the rank-0 front after each generation, for
  // objective-space plots.
  std::vector<std::vector<ObjectiveVector>> front_history;
  int generations_run = 0;
  bool aborted = false;       // evaluator failure; archive holds the last
  std::string abort_message;  // completed generation
};

// Evaluates a genome; the seed is derived from (master seed, generation,
// individual index) so reruns reproduce bit-identically under any thread
// count.
using ObjectiveFn =
    std::function<ObjectiveVector(const std::vector<double>& genome,
                                  std::uint64_t seed)>;

// Strict Pareto dominance, minimization on every component.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Deb's front construction: fronts[0] is the non-dominated subset, fronts[k+1]
// is non-dominated after removing fronts[0..k]. Returns indices into the
// population.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    std::span<const Individual> population);

// Crowding distances within one front (indices into population). Boundary
// individuals per objective get +infinity; interior ones accumulate
// normalized neighbor gaps; a zero objective range contributes nothing.
void assign_crowding(std::vector<Individual>& population,
                     std::span<const std::size_t> front);

// Convergence statistic between consecutive non-dominated fronts, computed
// in objective space:
//
//   mu    = sum over objectives k of the Euclidean distance between the
//           objective-k-minimizing member of the current front and of the
//           previous front (movement of the boundary solutions)
//   d_i   = nearest-neighbor distance of member i within the current front
//   dbar  = mean of the d_i
//
//   spread = (mu + sum_i |d_i - dbar|) / (mu + n * dbar)
//
// With fewer than two members (or dbar = 0) the statistic degenerates to
// mu / (mu + n * dbar); 0/0 is defined as 0. The generation loop stops when
// |spread_t - spread_{t-1}| stays below the tolerance for a full stall
// window.
double front_spread(std::span<const ObjectiveVector> front,
                    std::span<const ObjectiveVector> previous_front);

// Generational NSGA-II: binary tournament on (rank, crowding), simulated
// binary crossover, polynomial mutation, bound clamping, and elitist
// (mu + lambda) selection by front then crowding. The returned archive is
// the final rank-0 front.
EvolveResult evolve(const ObjectiveFn& objective,
                    std::span<const GeneBounds> bounds, const GaConfig& config);

// Minimal rul_mse; ties broken by lower smoothness_mad, then lower
// neg_monotonicity.
const Individual& select_best_rul(std::span<const Individual> archive);

// Bounds of the receptive-field genome (sigma_rule_center, sigma_rule
// surround, inhibition_factor).
std::vector<GeneBounds> receptive_field_bounds();

// Genome <-> parameter mapping used by the optimization commands; the
// bandwidths stay at their configured values.
ReceptiveFieldParams params_from_genome(const ReceptiveFieldParams& base,
                                        std::span<const double> genome);

}  // namespace sfrf
