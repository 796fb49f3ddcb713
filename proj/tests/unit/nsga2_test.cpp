#include "sfrf/nsga2.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "sfrf/error.hpp"
#include "sfrf/rng.hpp"

using namespace sfrf;

namespace {

Individual make_individual(double a, double b, double c) {
  Individual ind;
  ind.genome = {0.0};
  ind.objectives = {a, b, c};
  ind.evaluated = true;
  return ind;
}

// Bi-objective bowl pair with a constant third objective; the trade-off set
// is x in [0, 2].
ObjectiveVector schaffer(const std::vector<double>& genome, std::uint64_t) {
  const double x = genome[0];
  return {x * x, (x - 2.0) * (x - 2.0), 0.0};
}

GaConfig schaffer_config(std::uint64_t seed, int generations) {
  GaConfig config;
  config.population_size = 50;
  config.max_generations = generations;
  config.stall_window = generations;  // run the full budget
  config.spread_tolerance = 0.0;
  config.mutation_rate = 1.0;  // one gene
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("dominance is strict and irreflexive") {
  const ObjectiveVector a{1.0, 1.0, 1.0};
  const ObjectiveVector b{2.0, 2.0, 2.0};
  const ObjectiveVector c{1.0, 2.0, 1.0};
  const ObjectiveVector d{2.0, 1.0, 2.0};
  CHECK(dominates(a, b));
  CHECK_FALSE(dominates(b, a));
  CHECK_FALSE(dominates(c, d));
  CHECK_FALSE(dominates(d, c));
  CHECK_FALSE(dominates(a, a));
}

TEST_CASE("nondominated sort layers") {
  SUBCASE("mutually incomparable points form one front") {
    std::vector<Individual> population{
        make_individual(1, 3, 2), make_individual(2, 1, 3),
        make_individual(3, 2, 1)};
    const auto fronts = fast_nondominated_sort(population);
    REQUIRE(fronts.size() == 1);
    CHECK(fronts[0].size() == 3);
  }
  SUBCASE("a dominance chain gives singleton fronts") {
    std::vector<Individual> population;
    for (int i = 0; i < 4; ++i) {
      population.push_back(make_individual(i, i, i));
    }
    const auto fronts = fast_nondominated_sort(population);
    REQUIRE(fronts.size() == 4);
    for (std::size_t r = 0; r < 4; ++r) {
      REQUIRE(fronts[r].size() == 1);
      CHECK(fronts[r][0] == r);
    }
  }
  SUBCASE("matches the peeling oracle on random populations") {
    Rng rng(83);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 29);
      std::vector<Individual> population;
      std::vector<ObjectiveVector> points;
      for (std::size_t i = 0; i < n; ++i) {
        // A small value lattice forces plenty of ties and exact dominance.
        const auto v = [&] {
          return static_cast<double>(uniform_index(rng, 4));
        };
        const ObjectiveVector objectives{v(), v(), v()};
        points.push_back(objectives);
        population.push_back(make_individual(objectives.rul_mse,
                                             objectives.neg_monotonicity,
                                             objectives.smoothness_mad));
      }
      const auto fronts = fast_nondominated_sort(population);
      const auto expected = oracle::nondominated_layers(points);
      REQUIRE(fronts.size() == expected.size());
      for (std::size_t r = 0; r < fronts.size(); ++r) {
        CHECK(fronts[r] == expected[r]);
      }
    }
  }
  SUBCASE("unevaluated individuals are rejected") {
    std::vector<Individual> population{make_individual(1, 2, 3)};
    population[0].evaluated = false;
    CHECK_THROWS_AS(fast_nondominated_sort(population), Error);
  }
}

TEST_CASE("crowding distance") {
  SUBCASE("small fronts are all boundary") {
    std::vector<Individual> population{make_individual(1, 2, 3),
                                       make_individual(2, 1, 3)};
    const std::vector<std::size_t> front{0, 1};
    assign_crowding(population, front);
    CHECK(std::isinf(population[0].crowding));
    CHECK(std::isinf(population[1].crowding));
  }
  SUBCASE("equally spaced collinear points") {
    // One objective varies (0, 5, 10), the others are constant: the middle
    // point accumulates (10 - 0) / 10 = 1.
    std::vector<Individual> population{make_individual(0, 7, 7),
                                       make_individual(5, 7, 7),
                                       make_individual(10, 7, 7)};
    const std::vector<std::size_t> front{0, 1, 2};
    assign_crowding(population, front);
    CHECK(std::isinf(population[0].crowding));
    CHECK(population[1].crowding == 1.0);
    CHECK(std::isinf(population[2].crowding));
  }
  SUBCASE("triplicated vectors give zero interior distance") {
    std::vector<Individual> population{
        make_individual(0, 0, 0), make_individual(5, 5, 5),
        make_individual(5, 5, 5), make_individual(5, 5, 5),
        make_individual(10, 10, 10)};
    const std::vector<std::size_t> front{0, 1, 2, 3, 4};
    assign_crowding(population, front);
    CHECK(population[2].crowding == 0.0);  // innermost duplicate
  }
  SUBCASE("constant objectives grant no boundary status") {
    // The interior point (by the varying objective) is listed first; a
    // constant objective must not hand it an infinite distance.
    std::vector<Individual> population{make_individual(5, 7, 7),
                                       make_individual(0, 7, 7),
                                       make_individual(10, 7, 7)};
    const std::vector<std::size_t> front{0, 1, 2};
    assign_crowding(population, front);
    CHECK(population[0].crowding == 1.0);
    CHECK(std::isinf(population[1].crowding));
    CHECK(std::isinf(population[2].crowding));
  }
}

TEST_CASE("front spread statistic") {
  SUBCASE("identical fronts have equal spread") {
    const std::vector<ObjectiveVector> front{
        {0.0, 1.0, 0.0}, {0.5, 0.5, 0.0}, {1.0, 0.0, 0.0}};
    const double a = front_spread(front, front);
    const double b = front_spread(front, front);
    CHECK(a == b);
  }
  SUBCASE("a static single point has zero spread") {
    const std::vector<ObjectiveVector> one{{1.0, 1.0, 1.0}};
    CHECK(front_spread(one, one) == 0.0);
  }
  SUBCASE("shifting a front raises the spread monotonically") {
    std::vector<ObjectiveVector> base;
    for (int i = 0; i <= 4; ++i) {
      base.push_back({static_cast<double>(i), 4.0 - i, 0.0});
    }
    double previous = front_spread(base, base);
    for (double delta : {0.1, 0.3, 0.9}) {
      std::vector<ObjectiveVector> shifted;
      for (const auto& p : base) {
        shifted.push_back(
            {p.rul_mse + delta, p.neg_monotonicity + delta, p.smoothness_mad});
      }
      const double spread = front_spread(shifted, base);
      CHECK(spread > previous);
      previous = spread;
    }
  }
}

TEST_CASE("evolve solves the bi-objective bowl pair") {
  const auto result = evolve(schaffer, std::vector<GeneBounds>{{-5.0, 5.0}},
                             schaffer_config(4242, 50));
  REQUIRE(!result.archive.members.empty());

  std::size_t inside = 0;
  for (const Individual& ind : result.archive.members) {
    if (ind.genome[0] >= -0.05 && ind.genome[0] <= 2.05) ++inside;
  }
  CHECK(static_cast<double>(inside) >=
        0.95 * static_cast<double>(result.archive.members.size()));

  // No dominated pair inside the archive.
  for (const Individual& a : result.archive.members) {
    for (const Individual& b : result.archive.members) {
      CHECK_FALSE(dominates(a.objectives, b.objectives));
    }
  }
}

TEST_CASE("per-objective archive minima never regress") {
  const auto result = evolve(schaffer, std::vector<GeneBounds>{{-5.0, 5.0}},
                             schaffer_config(99, 30));
  REQUIRE(result.front_history.size() >= 2);
  for (int k = 0; k < ObjectiveVector::size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& front : result.front_history) {
      double current = std::numeric_limits<double>::infinity();
      for (const auto& objectives : front) {
        current = std::min(current, objectives[k]);
      }
      CHECK(current <= best + 1e-12);
      best = std::min(best, current);
    }
  }
}

TEST_CASE("evolution is deterministic under a fixed seed") {
  const auto a = evolve(schaffer, std::vector<GeneBounds>{{-5.0, 5.0}},
                        schaffer_config(7, 10));
  auto threaded = schaffer_config(7, 10);
  threaded.threads = 4;
  const auto b =
      evolve(schaffer, std::vector<GeneBounds>{{-5.0, 5.0}}, threaded);
  REQUIRE(a.archive.members.size() == b.archive.members.size());
  for (std::size_t i = 0; i < a.archive.members.size(); ++i) {
    CHECK(a.archive.members[i].genome == b.archive.members[i].genome);
    CHECK(a.archive.members[i].objectives == b.archive.members[i].objectives);
  }
  CHECK(a.spread_history == b.spread_history);
}

TEST_CASE("genomes stay within bounds under aggressive variation") {
  GaConfig config;
  config.population_size = 20;
  config.max_generations = 15;
  config.stall_window = 15;
  config.spread_tolerance = 0.0;
  config.crossover_rate = 1.0;
  config.mutation_rate = 1.0;
  config.mutation_index = 0.5;  // large mutation steps
  config.seed = 3;
  const std::vector<GeneBounds> bounds{{-1.0, 1.0}, {5.0, 6.0}, {0.0, 0.1}};
  const ObjectiveFn noisy = [](const std::vector<double>& genome,
                               std::uint64_t seed) {
    Rng rng(seed);
    return ObjectiveVector{genome[0] + normal(rng), genome[1] * genome[2],
                           uniform_unit(rng)};
  };
  const auto result = evolve(noisy, bounds, config);
  for (const Individual& ind : result.archive.members) {
    for (std::size_t g = 0; g < bounds.size(); ++g) {
      CHECK(ind.genome[g] >= bounds[g].lo);
      CHECK(ind.genome[g] <= bounds[g].hi);
    }
  }
}

TEST_CASE("evaluator failure preserves the partial archive") {
  std::atomic<int> calls{0};
  const ObjectiveFn flaky = [&](const std::vector<double>& genome,
                                std::uint64_t) -> ObjectiveVector {
    if (++calls > 30) throw std::runtime_error("evaluator budget exhausted");
    const double x = genome[0];
    return {x * x, (x - 2.0) * (x - 2.0), 0.0};
  };
  GaConfig config;
  config.population_size = 20;
  config.max_generations = 10;
  config.stall_window = 10;
  config.seed = 5;
  const auto result =
      evolve(flaky, std::vector<GeneBounds>{{-5.0, 5.0}}, config);
  CHECK(result.aborted);
  CHECK(result.abort_message.find("budget") != std::string::npos);
  CHECK(!result.archive.members.empty());  // archive of generation 0
}

TEST_CASE("best-rul selection and tie breaking") {
  std::vector<Individual> archive{make_individual(0.5, -0.2, 0.1),
                                  make_individual(0.2, -0.9, 0.7),
                                  make_individual(0.2, -0.4, 0.3)};
  SUBCASE("argmin on the first objective, ties by smoothness") {
    const Individual& best = select_best_rul(archive);
    CHECK(best.objectives.rul_mse == 0.2);
    CHECK(best.objectives.smoothness_mad == 0.3);
  }
  SUBCASE("full tie falls back to monotonicity") {
    std::vector<Individual> tied{make_individual(0.2, -0.4, 0.3),
                                 make_individual(0.2, -0.9, 0.3)};
    CHECK(select_best_rul(tied).objectives.neg_monotonicity == -0.9);
  }
  SUBCASE("singleton archive") {
    std::vector<Individual> one{make_individual(1, 2, 3)};
    CHECK(&select_best_rul(one) == &one[0]);
  }
  SUBCASE("empty archive is an error") {
    const std::vector<Individual> none;
    CHECK_THROWS_AS(select_best_rul(none), Error);
  }
}

TEST_CASE("receptive-field genome mapping") {
  const auto bounds = receptive_field_bounds();
  REQUIRE(bounds.size() == 3);
  CHECK(bounds[0].lo == doctest::Approx(1.0 / 9.0));
  CHECK(bounds[0].hi == 9.0);
  CHECK(bounds[2].lo == 0.0);
  CHECK(bounds[2].hi == 1.0);

  ReceptiveFieldParams base;
  base.center_bandwidth_hz = 4.0;
  base.surround_bandwidth_hz = 12.0;
  const std::vector<double> genome{1.5, 0.5, 0.25};
  const auto params = params_from_genome(base, genome);
  CHECK(params.sigma_rule_center == 1.5);
  CHECK(params.sigma_rule_surround == 0.5);
  CHECK(params.inhibition_factor == 0.25);
  CHECK(params.center_bandwidth_hz == 4.0);
  CHECK(params.surround_bandwidth_hz == 12.0);
}

TEST_CASE("ga config validation") {
  GaConfig config;
  CHECK_NOTHROW(validate(config));
  config.population_size = 7;
  CHECK_THROWS_AS(validate(config), Error);
  config.population_size = 2;
  CHECK_THROWS_AS(validate(config), Error);
  config = {};
  config.mutation_rate = 1.5;
  CHECK_THROWS_AS(validate(config), Error);
}
