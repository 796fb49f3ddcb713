#include "sfrf/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfrf/error.hpp"
#include "sfrf/parallel.hpp"
#include "sfrf/rng.hpp"

namespace sfrf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double objective_distance(const ObjectiveVector& a, const ObjectiveVector& b) {
  double acc = 0.0;
  for (int k = 0; k < ObjectiveVector::size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

// Bounded simulated binary crossover (per-gene exchange probability 0.5).
void sbx_crossover(std::vector<double>& a, std::vector<double>& b,
                   std::span<const GeneBounds> bounds, double index, Rng& rng) {
  for (std::size_t g = 0; g < a.size(); ++g) {
    if (uniform_unit(rng) > 0.5) continue;
    double x1 = a[g];
    double x2 = b[g];
    if (std::fabs(x1 - x2) < 1e-14) continue;
    if (x1 > x2) std::swap(x1, x2);
    const double lo = bounds[g].lo;
    const double hi = bounds[g].hi;
    const double u = uniform_unit(rng);

    const auto spread_factor = [&](double beta_bound) {
      const double alpha = 2.0 - std::pow(beta_bound, -(index + 1.0));
      if (u <= 1.0 / alpha) {
        return std::pow(u * alpha, 1.0 / (index + 1.0));
      }
      return std::pow(1.0 / (2.0 - u * alpha), 1.0 / (index + 1.0));
    };

    const double gap = x2 - x1;
    const double beta_lo = 1.0 + 2.0 * (x1 - lo) / gap;
    const double beta_hi = 1.0 + 2.0 * (hi - x2) / gap;
    const double c1 = 0.5 * (x1 + x2 - spread_factor(beta_lo) * gap);
    const double c2 = 0.5 * (x1 + x2 + spread_factor(beta_hi) * gap);
    a[g] = std::clamp(c1, lo, hi);
    b[g] = std::clamp(c2, lo, hi);
    if (uniform_unit(rng) > 0.5) std::swap(a[g], b[g]);
  }
}

// Bounded polynomial mutation.
void polynomial_mutation(std::vector<double>& genome,
                         std::span<const GeneBounds> bounds, double index,
                         double rate, Rng& rng) {
  for (std::size_t g = 0; g < genome.size(); ++g) {
    if (uniform_unit(rng) >= rate) continue;
    const double lo = bounds[g].lo;
    const double hi = bounds[g].hi;
    const double range = hi - lo;
    if (range <= 0.0) continue;
    const double x = genome[g];
    const double d1 = (x - lo) / range;
    const double d2 = (hi - x) / range;
    const double u = uniform_unit(rng);
    const double exponent = 1.0 / (index + 1.0);
    double delta;
    if (u < 0.5) {
      const double val =
          2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, index + 1.0);
      delta = std::pow(val, exponent) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) +
                         2.0 * (u - 0.5) * std::pow(1.0 - d2, index + 1.0);
      delta = 1.0 - std::pow(val, exponent);
    }
    genome[g] = std::clamp(x + delta * range, lo, hi);
  }
}

// Tournament winner by (rank, crowding); the first pick wins exact ties.
std::size_t tournament(const std::vector<Individual>& population, Rng& rng) {
  const std::size_t a = uniform_index(rng, population.size());
  const std::size_t b = uniform_index(rng, population.size());
  const Individual& ia = population[a];
  const Individual& ib = population[b];
  if (ib.rank < ia.rank) return b;
  if (ia.rank == ib.rank && ib.crowding > ia.crowding) return b;
  return a;
}

void rank_population(std::vector<Individual>& population) {
  const auto fronts = fast_nondominated_sort(population);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    for (std::size_t i : fronts[r]) population[i].rank = static_cast<int>(r);
    assign_crowding(population, fronts[r]);
  }
}

}  // namespace

void validate(const GaConfig& config) {
  if (config.population_size < 4 || config.population_size % 2 != 0) {
    fail(ErrorKind::Config, "ga: population size must be even and >= 4");
  }
  if (config.max_generations < 1) {
    fail(ErrorKind::Config, "ga: max_generations must be >= 1");
  }
  if (config.spread_tolerance < 0.0) {
    fail(ErrorKind::Config, "ga: spread tolerance must be >= 0");
  }
  if (config.stall_window < 1) {
    fail(ErrorKind::Config, "ga: stall window must be >= 1");
  }
  if (config.crossover_rate < 0.0 || config.crossover_rate > 1.0 ||
      config.mutation_rate < 0.0 || config.mutation_rate > 1.0) {
    fail(ErrorKind::Config, "ga: rates must lie in [0, 1]");
  }
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  bool strictly_better = false;
  for (int k = 0; k < ObjectiveVector::size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strictly_better = true;
  }
  return strictly_better;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    std::span<const Individual> population) {
  const std::size_t n = population.size();
  for (const Individual& ind : population) {
    if (!ind.evaluated) {
      fail(ErrorKind::Config, "nondominated sort: unevaluated individual");
    }
  }

  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<int> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(population[i].objectives, population[j].objectives)) {
        dominated_by[i].push_back(j);
        ++domination_count[j];
      } else if (dominates(population[j].objectives,
                           population[i].objectives)) {
        dominated_by[j].push_back(i);
        ++domination_count[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (domination_count[i] == 0) fronts[0].push_back(i);
  }

  std::size_t assigned = fronts[0].size();
  while (assigned < n) {
    std::vector<std::size_t> next;
    for (std::size_t i : fronts.back()) {
      for (std::size_t j : dominated_by[i]) {
        if (--domination_count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    assigned += next.size();
    fronts.push_back(std::move(next));
  }
  return fronts;
}

void assign_crowding(std::vector<Individual>& population,
                     std::span<const std::size_t> front) {
  if (front.empty()) {
    fail(ErrorKind::Config, "crowding: empty front");
  }
  for (std::size_t i : front) population[i].crowding = 0.0;
  if (front.size() <= 2) {
    for (std::size_t i : front) population[i].crowding = kInf;
    return;
  }
  std::vector<std::size_t> order(front.begin(), front.end());
  for (int k = 0; k < ObjectiveVector::size(); ++k) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return population[a].objectives[k] <
                              population[b].objectives[k];
                     });
    const double range = population[order.back()].objectives[k] -
                         population[order.front()].objectives[k];
    if (range <= 0.0) continue;  // constant objective contributes nothing
    population[order.front()].crowding = kInf;
    population[order.back()].crowding = kInf;
    for (std::size_t pos = 1; pos + 1 < order.size(); ++pos) {
      const double gap = population[order[pos + 1]].objectives[k] -
                         population[order[pos - 1]].objectives[k];
      population[order[pos]].crowding += gap / range;
    }
  }
}

double front_spread(std::span<const ObjectiveVector> front,
                    std::span<const ObjectiveVector> previous_front) {
  if (front.empty() || previous_front.empty()) {
    fail(ErrorKind::Config, "spread: empty front");
  }

  double mu = 0.0;
  for (int k = 0; k < ObjectiveVector::size(); ++k) {
    const auto by_k = [k](const ObjectiveVector& a, const ObjectiveVector& b) {
      return a[k] < b[k];
    };
    const ObjectiveVector& cur =
        *std::min_element(front.begin(), front.end(), by_k);
    const ObjectiveVector& prev =
        *std::min_element(previous_front.begin(), previous_front.end(), by_k);
    mu += objective_distance(cur, prev);
  }

  const std::size_t n = front.size();
  double dbar = 0.0;
  std::vector<double> nearest(n, 0.0);
  if (n >= 2) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = kInf;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        best = std::min(best, objective_distance(front[i], front[j]));
      }
      nearest[i] = best;
      dbar += best;
    }
    dbar /= static_cast<double>(n);
  }

  double deviation = 0.0;
  for (std::size_t i = 0; i < n; ++i) deviation += std::fabs(nearest[i] - dbar);

  const double denominator = mu + static_cast<double>(n) * dbar;
  if (denominator <= 0.0) return 0.0;
  return (mu + deviation) / denominator;
}

EvolveResult evolve(const ObjectiveFn& objective,
                    std::span<const GeneBounds> bounds,
                    const GaConfig& config) {
  validate(config);
  if (bounds.empty()) {
    fail(ErrorKind::Config, "evolve: no gene bounds");
  }
  for (const GeneBounds& b : bounds) {
    if (!(b.lo < b.hi)) {
      fail(ErrorKind::Config, "evolve: bounds require lo < hi");
    }
  }

  EvolveResult result;
  const std::size_t pop_size = static_cast<std::size_t>(config.population_size);
  std::vector<Individual> population(pop_size);

  // Variation and selection consume one sequential stream; evaluation seeds
  // are derived per (generation, index) so parallel evaluation stays
  // reproducible.
  Rng variation_rng(derive_seed(config.seed, 0x76617279u));

  {
    Rng init_rng(derive_seed(config.seed, 0x696e6974u));
    for (Individual& ind : population) {
      ind.genome.resize(bounds.size());
      for (std::size_t g = 0; g < bounds.size(); ++g) {
        ind.genome[g] = uniform_real(init_rng, bounds[g].lo, bounds[g].hi);
      }
    }
  }

  const auto evaluate_all = [&](std::vector<Individual>& group,
                                int generation) {
    parallel_for(group.size(), config.threads, [&](std::size_t i) {
      group[i].objectives = objective(
          group[i].genome,
          derive_seed(config.seed, static_cast<std::uint64_t>(generation),
                      i));
      group[i].evaluated = true;
    });
  };

  const auto collect_archive = [&](const std::vector<Individual>& pop,
                                   int generation) {
    ParetoArchive archive;
    archive.generation_found = generation;
    for (const Individual& ind : pop) {
      if (ind.rank == 0) archive.members.push_back(ind);
    }
    return archive;
  };

  try {
    evaluate_all(population, 0);
  } catch (const std::exception& e) {
    result.aborted = true;
    result.abort_message = e.what();
    return result;
  }
  rank_population(population);
  result.archive = collect_archive(population, 0);

  std::vector<ObjectiveVector> previous_front;
  for (const Individual& ind : result.archive.members) {
    previous_front.push_back(ind.objectives);
  }

  double previous_spread = front_spread(previous_front, previous_front);
  int stall = 0;

  for (int generation = 1; generation <= config.max_generations;
       ++generation) {
    std::vector<Individual> offspring;
    offspring.reserve(pop_size);
    while (offspring.size() < pop_size) {
      const std::size_t p1 = tournament(population, variation_rng);
      const std::size_t p2 = tournament(population, variation_rng);
      std::vector<double> c1 = population[p1].genome;
      std::vector<double> c2 = population[p2].genome;
      if (uniform_unit(variation_rng) < config.crossover_rate) {
        sbx_crossover(c1, c2, bounds, config.crossover_index, variation_rng);
      }
      polynomial_mutation(c1, bounds, config.mutation_index,
                          config.mutation_rate, variation_rng);
      polynomial_mutation(c2, bounds, config.mutation_index,
                          config.mutation_rate, variation_rng);
      Individual child1;
      child1.genome = std::move(c1);
      Individual child2;
      child2.genome = std::move(c2);
      offspring.push_back(std::move(child1));
      offspring.push_back(std::move(child2));
    }

    try {
      evaluate_all(offspring, generation);
    } catch (const std::exception& e) {
      result.aborted = true;
      result.abort_message = e.what();
      return result;
    }

    std::vector<Individual> combined;
    combined.reserve(population.size() + offspring.size());
    for (Individual& ind : population) combined.push_back(std::move(ind));
    for (Individual& ind : offspring) combined.push_back(std::move(ind));

    const auto fronts = fast_nondominated_sort(combined);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
      for (std::size_t i : fronts[r]) combined[i].rank = static_cast<int>(r);
      assign_crowding(combined, fronts[r]);
    }

    std::vector<Individual> next;
    next.reserve(pop_size);
    for (const auto& front : fronts) {
      if (next.size() + front.size() <= pop_size) {
        for (std::size_t i : front) next.push_back(std::move(combined[i]));
      } else {
        std::vector<std::size_t> order(front.begin(), front.end());
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                           return combined[a].crowding > combined[b].crowding;
                         });
        for (std::size_t i : order) {
          if (next.size() == pop_size) break;
          next.push_back(std::move(combined[i]));
        }
      }
      if (next.size() == pop_size) break;
    }
    population = std::move(next);
    rank_population(population);

    result.archive = collect_archive(population, generation);
    result.generations_run = generation;

    std::vector<ObjectiveVector> current_front;
    for (const Individual& ind : result.archive.members) {
      current_front.push_back(ind.objectives);
    }
    const double spread = front_spread(current_front, previous_front);
    result.spread_history.push_back(spread);
    result.front_history.push_back(current_front);

    if (std::fabs(spread - previous_spread) < config.spread_tolerance) {
      ++stall;
    } else {
      stall = 0;
    }
    previous_spread = spread;
    previous_front = std::move(current_front);
    if (stall >= config.stall_window) break;
  }
  return result;
}

const Individual& select_best_rul(std::span<const Individual> archive) {
  if (archive.empty()) {
    fail(ErrorKind::Config, "select best rul: empty archive");
  }
  const Individual* best = &archive.front();
  for (const Individual& ind : archive.subspan(1)) {
    const ObjectiveVector& a = ind.objectives;
    const ObjectiveVector& b = best->objectives;
    const bool better =
        a.rul_mse < b.rul_mse ||
        (a.rul_mse == b.rul_mse &&
         (a.smoothness_mad < b.smoothness_mad ||
          (a.smoothness_mad == b.smoothness_mad &&
           a.neg_monotonicity < b.neg_monotonicity)));
    if (better) best = &ind;
  }
  return *best;
}

std::vector<GeneBounds> receptive_field_bounds() {
  return {{kSigmaRuleMin, kSigmaRuleMax},
          {kSigmaRuleMin, kSigmaRuleMax},
          {0.0, 1.0}};
}

ReceptiveFieldParams params_from_genome(const ReceptiveFieldParams& base,
                                        std::span<const double> genome) {
  if (genome.size() != 3) {
    fail(ErrorKind::Config, "genome must have 3 genes");
  }
  ReceptiveFieldParams params = base;
  params.sigma_rule_center = genome[0];
  params.sigma_rule_surround = genome[1];
  params.inhibition_factor = genome[2];
  return params;
}

}  // namespace sfrf
