#include "sfrf/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "json.hpp"
#include "sfrf/error.hpp"
#include "sfrf/numeric_io.hpp"
#include "sfrf/parallel.hpp"
#include "sfrf/rng.hpp"

namespace sfrf {

namespace {

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double score = -1.0;  // sum of child mean-squared-sums; higher is better
};

// Best split over the given rows, maximizing sum_l^2/n_l + sum_r^2/n_r
// (equivalent to SSE reduction). Strictly-better comparisons keep the
// earliest feature/threshold on ties.
SplitCandidate best_split(const std::vector<std::vector<double>>& rows,
                          std::span<const double> targets,
                          std::span<const std::size_t> indices,
                          int min_leaf_size) {
  SplitCandidate best;
  const std::size_t n = indices.size();
  if (n < 2 * static_cast<std::size_t>(min_leaf_size)) return best;
  const std::size_t features = rows.front().size();

  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  for (std::size_t f = 0; f < features; ++f) {
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](std::size_t a, std::size_t b) {
                       return rows[a][f] < rows[b][f];
                     });
    double left_sum = 0.0;
    double total = 0.0;
    for (std::size_t i : sorted) total += targets[i];
    for (std::size_t pos = 1; pos < n; ++pos) {
      left_sum += targets[sorted[pos - 1]];
      const double lo = rows[sorted[pos - 1]][f];
      const double hi = rows[sorted[pos]][f];
      if (!(lo < hi)) continue;  // no boundary between equal values
      if (pos < static_cast<std::size_t>(min_leaf_size) ||
          n - pos < static_cast<std::size_t>(min_leaf_size)) {
        continue;
      }
      const double right_sum = total - left_sum;
      const double score =
          left_sum * left_sum / static_cast<double>(pos) +
          right_sum * right_sum / static_cast<double>(n - pos);
      if (score > best.score) {
        best.found = true;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (lo + hi);
        best.score = score;
      }
    }
  }
  return best;
}

}  // namespace

RegressionTree RegressionTree::fit(const std::vector<std::vector<double>>& rows,
                                   std::span<const double> targets,
                                   const TreeConfig& config) {
  if (rows.empty()) {
    fail(ErrorKind::InsufficientLength, "tree fit: no training rows");
  }
  if (rows.size() != targets.size()) {
    fail(ErrorKind::GridMismatch, "tree fit: rows/targets length mismatch");
  }
  if (config.min_leaf_size < 1) {
    fail(ErrorKind::Config, "tree fit: min_leaf_size must be >= 1");
  }

  RegressionTree tree;
  tree.feature_count_ = rows.front().size();

  struct Pending {
    std::vector<std::size_t> indices;
    int depth;
    int node;
  };
  std::vector<std::size_t> all(rows.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  tree.nodes_.push_back({});
  std::vector<Pending> stack;
  stack.push_back({std::move(all), 0, 0});

  while (!stack.empty()) {
    Pending item = std::move(stack.back());
    stack.pop_back();

    double sum = 0.0;
    for (std::size_t i : item.indices) sum += targets[i];
    const double mean = sum / static_cast<double>(item.indices.size());
    double sse = 0.0;
    for (std::size_t i : item.indices) {
      const double d = targets[i] - mean;
      sse += d * d;
    }

    Node& node = tree.nodes_[item.node];
    node.value = mean;

    const bool depth_capped =
        config.max_depth >= 0 && item.depth >= config.max_depth;
    if (depth_capped || sse <= 0.0) continue;

    const SplitCandidate split =
        best_split(rows, targets, item.indices, config.min_leaf_size);
    if (!split.found) continue;

    std::vector<std::size_t> left, right;
    left.reserve(item.indices.size());
    right.reserve(item.indices.size());
    for (std::size_t i : item.indices) {
      (rows[i][split.feature] <= split.threshold ? left : right).push_back(i);
    }

    const int left_id = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back({});
    const int right_id = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back({});
    Node& parent = tree.nodes_[item.node];
    parent.feature = split.feature;
    parent.threshold = split.threshold;
    parent.left = left_id;
    parent.right = right_id;

    stack.push_back({std::move(right), item.depth + 1, right_id});
    stack.push_back({std::move(left), item.depth + 1, left_id});
  }
  return tree;
}

double RegressionTree::predict(std::span<const double> row) const {
  if (row.size() != feature_count_) {
    fail(ErrorKind::GridMismatch,
         "tree predict: row has " + std::to_string(row.size()) +
             " features, expected " + std::to_string(feature_count_));
  }
  int at = 0;
  while (nodes_[at].feature >= 0) {
    const Node& node = nodes_[at];
    at = row[static_cast<std::size_t>(node.feature)] <= node.threshold
             ? node.left
             : node.right;
  }
  return nodes_[at].value;
}

BaggingEnsemble BaggingEnsemble::fit(
    const std::vector<std::vector<double>>& rows,
    std::span<const double> targets, const RegressorConfig& config,
    std::uint64_t seed, int threads) {
  if (rows.size() < 2) {
    fail(ErrorKind::InsufficientLength,
         "bagging fit: need at least 2 training rows");
  }
  if (config.n_learners < 1) {
    fail(ErrorKind::Config, "bagging fit: n_learners must be >= 1");
  }
  if (config.bootstrap_fraction <= 0.0 || config.bootstrap_fraction > 1.0) {
    fail(ErrorKind::Config,
         "bagging fit: bootstrap_fraction must lie in (0, 1]");
  }

  BaggingEnsemble ensemble;
  ensemble.config_ = config;
  ensemble.seed_ = seed;
  ensemble.trees_.resize(static_cast<std::size_t>(config.n_learners));

  const std::size_t n = rows.size();
  const std::size_t sample_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(config.bootstrap_fraction * static_cast<double>(n))));

  parallel_for(ensemble.trees_.size(), threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::vector<double>> sample_rows;
    std::vector<double> sample_targets;
    sample_rows.reserve(sample_size);
    sample_targets.reserve(sample_size);
    for (std::size_t i = 0; i < sample_size; ++i) {
      const std::size_t pick = uniform_index(rng, n);
      sample_rows.push_back(rows[pick]);
      sample_targets.push_back(targets[pick]);
    }
    ensemble.trees_[t] =
        RegressionTree::fit(sample_rows, sample_targets, config.tree);
  });
  return ensemble;
}

double BaggingEnsemble::predict(std::span<const double> row) const {
  double acc = 0.0;
  for (const RegressionTree& tree : trees_) acc += tree.predict(row);
  return acc / static_cast<double>(trees_.size());
}

void BaggingEnsemble::save_json(std::ostream& out) const {
  nlohmann::json doc;
  doc["model"] = "bagging_regression_ensemble";
  doc["seed"] = seed_;
  doc["n_learners"] = config_.n_learners;
  doc["bootstrap_fraction"] = config_.bootstrap_fraction;
  doc["max_depth"] = config_.tree.max_depth;
  doc["min_leaf_size"] = config_.tree.min_leaf_size;
  nlohmann::json trees = nlohmann::json::array();
  for (const RegressionTree& tree : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const RegressionTree::Node& node : tree.nodes()) {
      nodes.push_back({{"feature", node.feature},
                       {"threshold", node.threshold},
                       {"left", node.left},
                       {"right", node.right},
                       {"value", node.value}});
    }
    trees.push_back({{"feature_count", tree.feature_count()},
                     {"nodes", std::move(nodes)}});
  }
  doc["trees"] = std::move(trees);
  out << doc.dump(2) << '\n';
}

BaggingEnsemble BaggingEnsemble::load_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("model load: ") + e.what());
  }
  BaggingEnsemble ensemble;
  try {
    ensemble.seed_ = doc.at("seed").get<std::uint64_t>();
    ensemble.config_.n_learners = doc.at("n_learners").get<int>();
    ensemble.config_.bootstrap_fraction =
        doc.at("bootstrap_fraction").get<double>();
    ensemble.config_.tree.max_depth = doc.at("max_depth").get<int>();
    ensemble.config_.tree.min_leaf_size = doc.at("min_leaf_size").get<int>();
    for (const auto& tree_doc : doc.at("trees")) {
      std::vector<RegressionTree::Node> nodes;
      for (const auto& node_doc : tree_doc.at("nodes")) {
        RegressionTree::Node node;
        node.feature = node_doc.at("feature").get<int>();
        node.threshold = node_doc.at("threshold").get<double>();
        node.left = node_doc.at("left").get<int>();
        node.right = node_doc.at("right").get<int>();
        node.value = node_doc.at("value").get<double>();
        nodes.push_back(node);
      }
      ensemble.trees_.emplace_back(
          std::move(nodes), tree_doc.at("feature_count").get<std::size_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("model load: ") + e.what());
  }
  if (ensemble.trees_.empty()) {
    fail(ErrorKind::Parse, "model load: no trees in document");
  }
  return ensemble;
}

double resubstitution_loss(const BaggingEnsemble& ensemble,
                           const std::vector<std::vector<double>>& rows,
                           std::span<const double> targets) {
  if (rows.size() != targets.size() || rows.empty()) {
    fail(ErrorKind::GridMismatch,
         "resubstitution loss: rows/targets length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double d = ensemble.predict(rows[i]) - targets[i];
    acc += d * d;
  }
  return acc / static_cast<double>(rows.size());
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) {
    fail(ErrorKind::InsufficientLength, "quantile: empty sample");
  }
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(values.size() - 1, lo + 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

OrderSweepResult order_sweep(
    const std::vector<std::vector<std::vector<double>>>& rows_per_order,
    std::span<const int> orders, std::span<const double> targets, int repeats,
    const RegressorConfig& config, std::uint64_t seed, int threads) {
  if (rows_per_order.size() != orders.size()) {
    fail(ErrorKind::Config, "order sweep: rows/orders length mismatch");
  }
  if (repeats < 1) {
    fail(ErrorKind::Config, "order sweep: repeats must be >= 1");
  }

  OrderSweepResult result;
  result.rows.resize(orders.size() * static_cast<std::size_t>(repeats));

  // Flatten (order, repeat) into one task list so threading stays effective
  // for small repeat counts.
  parallel_for(result.rows.size(), threads, [&](std::size_t task) {
    const std::size_t o = task / static_cast<std::size_t>(repeats);
    const std::size_t r = task % static_cast<std::size_t>(repeats);
    const std::uint64_t fit_seed =
        derive_seed(seed, static_cast<std::uint64_t>(orders[o]), r);
    const auto ensemble =
        BaggingEnsemble::fit(rows_per_order[o], targets, config, fit_seed, 1);
    result.rows[task] = {orders[o], fit_seed,
                         resubstitution_loss(ensemble, rows_per_order[o],
                                             targets)};
  });

  for (std::size_t o = 0; o < orders.size(); ++o) {
    std::vector<double> losses;
    losses.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
      losses.push_back(
          result.rows[o * static_cast<std::size_t>(repeats) +
                      static_cast<std::size_t>(r)]
              .loss);
    }
    OrderSweepStats stats;
    stats.order = orders[o];
    stats.min = quantile(losses, 0.0);
    stats.q1 = quantile(losses, 0.25);
    stats.median = quantile(losses, 0.5);
    stats.q3 = quantile(losses, 0.75);
    stats.max = quantile(losses, 1.0);
    result.stats.push_back(stats);
  }
  return result;
}

void write_order_sweep_csv(std::ostream& out, const OrderSweepResult& result) {
  out << "order,seed,loss\n";
  for (const OrderSweepRow& row : result.rows) {
    out << row.order << ',' << row.seed << ',' << format_double(row.loss)
        << '\n';
  }
}

}  // namespace sfrf
