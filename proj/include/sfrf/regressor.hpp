#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace sfrf {

struct TreeConfig {
  int max_depth = -1;     // -1 = unlimited; 0 forbids any split
  int min_leaf_size = 5;  // minimum rows on each side of a split
};

struct RegressorConfig {
  int n_learners = 30;
  double bootstrap_fraction = 1.0;  // sample size as a fraction of the rows
  TreeConfig tree;
};

// CART-style regression tree, greedy variance-reduction splits. Ties are
// broken toward the lowest feature index, then the lowest threshold, so the
// fit is a deterministic function of its input.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf: mean target of the training rows reaching it
  };

  static RegressionTree fit(const std::vector<std::vector<double>>& rows,
                            std::span<const double> targets,
                            const TreeConfig& config);

  double predict(std::span<const double> row) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t feature_count() const { return feature_count_; }

  // Used by model deserialization.
  RegressionTree() = default;
  RegressionTree(std::vector<Node> nodes, std::size_t feature_count)
      : nodes_(std::move(nodes)), feature_count_(feature_count) {}

 private:
  std::vector<Node> nodes_;
  std::size_t feature_count_ = 0;
};

// Bootstrap-aggregated regression trees; the prediction is the arithmetic
// mean over members. Fits are reproducible: tree t draws its bootstrap
// sample from a stream derived from (seed, t), so threading cannot change
// the result.
class BaggingEnsemble {
 public:
  static BaggingEnsemble fit(const std::vector<std::vector<double>>& rows,
                             std::span<const double> targets,
                             const RegressorConfig& config, std::uint64_t seed,
                             int threads = 1);

  double predict(std::span<const double> row) const;

  const std::vector<RegressionTree>& trees() const { return trees_; }
  const RegressorConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

  void save_json(std::ostream& out) const;
  static BaggingEnsemble load_json(std::istream& in);

 private:
  std::vector<RegressionTree> trees_;
  RegressorConfig config_;
  std::uint64_t seed_ = 0;
};

// Mean squared prediction error over the training rows.
double resubstitution_loss(const BaggingEnsemble& ensemble,
                           const std::vector<std::vector<double>>& rows,
                           std::span<const double> targets);

struct OrderSweepRow {
  int order = 0;
  std::uint64_t seed = 0;
  double loss = 0.0;
};

struct OrderSweepStats {
  int order = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct OrderSweepResult {
  std::vector<OrderSweepRow> rows;
  std::vector<OrderSweepStats> stats;  // one entry per order, input order
};

// Repeated fits of buffered-indicator features at each requested order;
// fit (order o, repeat r) is seeded with derive_seed(seed, o, r). Feature
// matrices are built by the caller (see buffered_feature_matrix in
// metrics.hpp); this overload takes a prebuilt matrix per order.
OrderSweepResult order_sweep(
    const std::vector<std::vector<std::vector<double>>>& rows_per_order,
    std::span<const int> orders, std::span<const double> targets, int repeats,
    const RegressorConfig& config, std::uint64_t seed, int threads = 1);

void write_order_sweep_csv(std::ostream& out, const OrderSweepResult& result);

// Linear-interpolated quantile of an unsorted sample (p in [0, 1]).
double quantile(std::vector<double> values, double p);

}  // namespace sfrf
