#include "sfrf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "sfrf/error.hpp"
#include "sfrf/parallel.hpp"

namespace sfrf {

namespace {

// Mid-ranks, 1-based; tied values share the mean of their rank range.
std::vector<double> mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;  // constant series
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows,
                           std::size_t j) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][j];
  return out;
}

std::vector<int> resolve_columns(std::span<const int> requested) {
  std::vector<int> columns;
  if (requested.empty()) {
    columns.resize(kSfrfCount);
    std::iota(columns.begin(), columns.end(), 0);
  } else {
    columns.assign(requested.begin(), requested.end());
    for (int c : columns) {
      if (c < 0 || c >= static_cast<int>(kSfrfCount)) {
        fail(ErrorKind::Config, "feature column out of range: " +
                                    std::to_string(c));
      }
    }
  }
  return columns;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> t) {
  if (x.size() != t.size()) {
    fail(ErrorKind::GridMismatch, "spearman: series length mismatch");
  }
  if (x.size() < 2) {
    fail(ErrorKind::InsufficientLength, "spearman: need at least 2 samples");
  }
  const auto rx = mid_ranks(x);
  const auto rt = mid_ranks(t);
  return pearson(rx, rt);
}

double monotonicity(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) {
    fail(ErrorKind::InsufficientLength, "monotonicity: need at least 2 rows");
  }
  const std::size_t features = rows.front().size();
  if (features == 0) {
    fail(ErrorKind::InsufficientLength, "monotonicity: no feature columns");
  }
  std::vector<double> time(rows.size());
  std::iota(time.begin(), time.end(), 1.0);

  double product = 1.0;
  for (std::size_t j = 0; j < features; ++j) {
    const double rho = std::fabs(spearman(column(rows, j), time));
    if (rho == 0.0) return 0.0;
    product *= rho;
  }
  return std::pow(product, 1.0 / static_cast<double>(features));
}

double median(std::vector<double> values) {
  if (values.empty()) {
    fail(ErrorKind::InsufficientLength, "median: empty sample");
  }
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    const double lower =
        *std::max_element(values.begin(), values.begin() + mid);
    m = 0.5 * (lower + m);
  }
  return m;
}

double smoothness_mad(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 3) {
    fail(ErrorKind::InsufficientLength,
         "smoothness: need at least 3 rows (2 first differences)");
  }
  const std::size_t features = rows.front().size();
  if (features == 0) {
    fail(ErrorKind::InsufficientLength, "smoothness: no feature columns");
  }

  double product = 1.0;
  for (std::size_t j = 0; j < features; ++j) {
    std::vector<double> diffs(rows.size() - 1);
    for (std::size_t t = 0; t + 1 < rows.size(); ++t) {
      diffs[t] = rows[t + 1][j] - rows[t][j];
    }
    const double center = median(diffs);
    for (double& d : diffs) d = std::fabs(d - center);
    const double mad = median(std::move(diffs));
    if (mad == 0.0) return 0.0;
    product *= mad;
  }
  return std::pow(product, 1.0 / static_cast<double>(features));
}

double rul_mse(std::span<const double> predicted,
               std::span<const double> observed) {
  if (predicted.size() != observed.size()) {
    fail(ErrorKind::GridMismatch, "rul mse: series length mismatch");
  }
  if (predicted.empty()) {
    fail(ErrorKind::InsufficientLength, "rul mse: empty series");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - observed[i];
    acc += d * d;
  }
  return acc / static_cast<double>(predicted.size());
}

std::vector<std::vector<double>> buffered_feature_matrix(
    const IndicatorTrajectory& trajectory, int order,
    std::span<const int> feature_columns) {
  if (trajectory.rows.empty()) {
    fail(ErrorKind::EmptyHistory, "buffered features: empty trajectory");
  }
  if (order < 0) {
    fail(ErrorKind::Config, "buffered features: order must be >= 0");
  }
  const auto columns = resolve_columns(feature_columns);

  std::vector<std::vector<double>> out(trajectory.rows.size());
  for (std::size_t t = 0; t < trajectory.rows.size(); ++t) {
    std::vector<double> features;
    features.reserve(columns.size() * static_cast<std::size_t>(order + 1));
    for (int back = 0; back <= order; ++back) {
      const std::size_t idx =
          static_cast<std::size_t>(back) <= t ? t - back : 0;
      for (int c : columns) {
        features.push_back(trajectory.rows[idx][static_cast<std::size_t>(c)]);
      }
    }
    out[t] = std::move(features);
  }
  return out;
}

ObjectiveEvaluator::ObjectiveEvaluator(const RunToFailureRecord& record,
                                       const BearingParameters& bearing,
                                       const Expansion& expansion,
                                       SurrogateConfig surrogate,
                                       WindowKind window, int threads)
    : bearing_id_(record.bearing_id),
      bearing_(bearing),
      operating_(record.operating_mode),
      expansion_(expansion),
      surrogate_(std::move(surrogate)) {
  if (record.snapshots.empty()) {
    fail(ErrorKind::EmptyRun, "objective evaluator: record has no snapshots");
  }
  if (surrogate_.stride < 1) {
    fail(ErrorKind::Config, "objective evaluator: stride must be >= 1");
  }
  resolve_columns(surrogate_.feature_columns);

  const std::size_t n = record.snapshots.front().sample_count();
  grid_ = snapshot_grid(operating_.sampling_frequency_hz, n);

  const std::size_t count = record.snapshots.size();
  spectra_.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const Snapshot& s = record.snapshots[i];
    if (s.sample_count() != n) {
      fail(ErrorKind::GridMismatch,
           "objective evaluator: snapshots have differing lengths");
    }
    spectra_[i] = {magnitude_spectrum(s.horizontal,
                                      operating_.sampling_frequency_hz, window),
                   magnitude_spectrum(s.vertical,
                                      operating_.sampling_frequency_hz, window),
                   s.snapshot_index};
  });

  rul_labels_.resize(count);
  const double k = static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    rul_labels_[i] =
        count == 1 ? 0.0 : (k - static_cast<double>(i + 1)) / (k - 1.0);
  }
}

IndicatorTrajectory ObjectiveEvaluator::trajectory(
    const ReceptiveFieldParams& params) const {
  const MaskBank bank =
      build_mask_bank(bearing_, operating_, params, expansion_, grid_);
  IndicatorTrajectory trajectory;
  trajectory.bearing_id = bearing_id_;
  trajectory.snapshot_indices.reserve(spectra_.size());
  trajectory.rows.reserve(spectra_.size());
  for (const SpectrumPair& pair : spectra_) {
    const SfrfVector v = sfrf_from_spectra(pair.horizontal, pair.vertical,
                                           bank, pair.snapshot_index);
    trajectory.snapshot_indices.push_back(v.snapshot_index);
    trajectory.rows.push_back(v.values);
  }
  trajectory.rul_labels = rul_labels_;
  return trajectory;
}

ObjectiveVector ObjectiveEvaluator::evaluate(const ReceptiveFieldParams& params,
                                             std::uint64_t seed) const {
  const IndicatorTrajectory full = trajectory(params);
  const auto columns = resolve_columns(surrogate_.feature_columns);

  // Trend metrics over the full life of the selected columns.
  std::vector<std::vector<double>> metric_rows(full.rows.size());
  for (std::size_t t = 0; t < full.rows.size(); ++t) {
    metric_rows[t].reserve(columns.size());
    for (int c : columns) {
      metric_rows[t].push_back(full.rows[t][static_cast<std::size_t>(c)]);
    }
  }
  const double mono = monotonicity(metric_rows);
  const double smooth = smoothness_mad(metric_rows);

  // Surrogate RUL error: resubstitution on the sub-sampled trajectory.
  const auto features =
      buffered_feature_matrix(full, surrogate_.order, surrogate_.feature_columns);
  std::vector<std::vector<double>> train_rows;
  std::vector<double> train_targets;
  for (std::size_t t = 0; t < features.size();
       t += static_cast<std::size_t>(surrogate_.stride)) {
    train_rows.push_back(features[t]);
    train_targets.push_back(full.rul_labels[t]);
  }
  const auto ensemble = BaggingEnsemble::fit(train_rows, train_targets,
                                             surrogate_.regressor, seed, 1);
  const double mse = resubstitution_loss(ensemble, train_rows, train_targets);

  ObjectiveVector objectives;
  objectives.rul_mse = mse;
  objectives.neg_monotonicity = -mono;
  objectives.smoothness_mad = surrogate_.maximize_smoothness ? -smooth : smooth;
  return objectives;
}

ObjectiveVector objective_vector(const ReceptiveFieldParams& params,
                                 const RunToFailureRecord& record,
                                 const BearingParameters& bearing,
                                 const Expansion& expansion,
                                 const SurrogateConfig& surrogate,
                                 std::uint64_t seed, WindowKind window) {
  const ObjectiveEvaluator evaluator(record, bearing, expansion, surrogate,
                                     window, 1);
  return evaluator.evaluate(params, seed);
}

std::string metrics_report_json(const ObjectiveVector& objectives) {
  nlohmann::json doc;
  doc["rul_mse"] = objectives.rul_mse;
  doc["monotonicity"] = -objectives.neg_monotonicity;
  doc["smoothness_mad"] = objectives.smoothness_mad;
  return doc.dump();
}

}  // namespace sfrf
