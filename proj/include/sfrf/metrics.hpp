#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfrf/pipeline.hpp"
#include "sfrf/regressor.hpp"

namespace sfrf {

// Minimization-oriented objective triple: RUL mean-squared error, negated
// trend monotonicity, and first-difference jitter (geometric-mean MAD).
struct ObjectiveVector {
  double rul_mse = 0.0;
  double neg_monotonicity = 0.0;
  double smoothness_mad = 0.0;

  static constexpr int size() { return 3; }
  double operator[](int i) const {
    return i == 0 ? rul_mse : i == 1 ? neg_monotonicity : smoothness_mad;
  }
  bool operator==(const ObjectiveVector&) const = default;
};

// Rank correlation via Pearson correlation of mid-ranks (ties get the mean
// of their rank range). A constant series is defined to correlate 0.
double spearman(std::span<const double> x, std::span<const double> t);

// Geometric mean over feature columns of |spearman(column, time)|;
// rows is a K x F matrix, K >= 2. A constant column drives the result to 0.
double monotonicity(const std::vector<std::vector<double>>& rows);

// Per column: median absolute deviation of the first differences about
// their median; geometric mean over columns. Requires K >= 3.
double smoothness_mad(const std::vector<std::vector<double>>& rows);

double rul_mse(std::span<const double> predicted,
               std::span<const double> observed);

// Middle element for odd lengths, mean of the two central order statistics
// for even lengths.
double median(std::vector<double> values);

struct SurrogateConfig {
  RegressorConfig regressor;
  int stride = 2;  // trajectory sub-sampling step for surrogate training
  int order = 0;   // buffered-indicator order of the surrogate features
  bool maximize_smoothness = false;  // flip the smoothness objective sign
  // Feature columns (0..7) entering the metrics and the surrogate; empty
  // means all eight.
  std::vector<int> feature_columns;
};

// Buffered-indicator feature matrix for a trajectory: row t holds the
// selected columns of rows t, t-1, ..., t-order (earliest row replicated
// during warm-up).
std::vector<std::vector<double>> buffered_feature_matrix(
    const IndicatorTrajectory& trajectory, int order,
    std::span<const int> feature_columns = {});

// Evaluates the objective triple for a parameter set against one record.
// Magnitude spectra are computed once at construction; each evaluation only
// rebuilds masks, so it is cheap enough to sit inside an optimization loop.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const RunToFailureRecord& record,
                     const BearingParameters& bearing,
                     const Expansion& expansion, SurrogateConfig surrogate,
                     WindowKind window = WindowKind::Rectangular,
                     int threads = 1);

  ObjectiveVector evaluate(const ReceptiveFieldParams& params,
                           std::uint64_t seed) const;

  IndicatorTrajectory trajectory(const ReceptiveFieldParams& params) const;

  const SurrogateConfig& surrogate() const { return surrogate_; }

 private:
  struct SpectrumPair {
    MagnitudeSpectrum horizontal;
    MagnitudeSpectrum vertical;
    int snapshot_index = 1;
  };

  std::string bearing_id_;
  BearingParameters bearing_;
  OperatingMode operating_;
  Expansion expansion_;
  SurrogateConfig surrogate_;
  FrequencyGrid grid_;
  std::vector<SpectrumPair> spectra_;
  std::vector<double> rul_labels_;
};

// One-call convenience wrapper around ObjectiveEvaluator.
ObjectiveVector objective_vector(const ReceptiveFieldParams& params,
                                 const RunToFailureRecord& record,
                                 const BearingParameters& bearing,
                                 const Expansion& expansion,
                                 const SurrogateConfig& surrogate,
                                 std::uint64_t seed,
                                 WindowKind window = WindowKind::Rectangular);

// {"rul_mse": ..., "monotonicity": ..., "smoothness_mad": ...} with the
// monotonicity reported in maximization orientation.
std::string metrics_report_json(const ObjectiveVector& objectives);

}  // namespace sfrf
