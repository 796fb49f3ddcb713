#include "sfrf/masks.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "sfrf/error.hpp"
#include "sfrf/numeric_io.hpp"

namespace sfrf {

namespace {

constexpr double kSupportSigmas = 12.0;

// Unit-peak Gaussian evaluated at the grid bins, zero outside +-12 sigma
// (true value there is below 1e-31).
SpectralMask gaussian_centered(double center_hz, double sigma_hz,
                               const FrequencyGrid& grid) {
  SpectralMask mask{grid, std::vector<double>(grid.size, 0.0)};
  const double lo = center_hz - kSupportSigmas * sigma_hz;
  const double hi = center_hz + kSupportSigmas * sigma_hz;
  std::size_t first = 0;
  if (lo > 0.0) {
    const double idx = std::ceil(lo / grid.df_hz);
    first = idx >= static_cast<double>(grid.size)
                ? grid.size
                : static_cast<std::size_t>(idx);
  }
  for (std::size_t i = first; i < grid.size; ++i) {
    const double f = grid.frequency(i);
    if (f > hi) break;
    const double z = (f - center_hz) / sigma_hz;
    mask.gains[i] = std::exp(-0.5 * z * z);
  }
  return mask;
}

}  // namespace

FrequencyGrid snapshot_grid(double sampling_frequency_hz,
                            std::size_t n_samples) {
  if (sampling_frequency_hz <= 0.0) {
    fail(ErrorKind::Config, "grid: sampling frequency must be positive");
  }
  if (n_samples < 2) {
    fail(ErrorKind::DegenerateSignal, "grid: need at least 2 samples");
  }
  return FrequencyGrid{sampling_frequency_hz / static_cast<double>(n_samples),
                       n_samples / 2 + 1};
}

void validate(const ReceptiveFieldParams& params) {
  if (params.center_bandwidth_hz <= 0.0 || params.surround_bandwidth_hz <= 0.0) {
    fail(ErrorKind::Config, "receptive field: bandwidths must be positive");
  }
  const auto in_sigma_bounds = [](double k) {
    return k >= kSigmaRuleMin && k <= kSigmaRuleMax;
  };
  if (!in_sigma_bounds(params.sigma_rule_center) ||
      !in_sigma_bounds(params.sigma_rule_surround)) {
    fail(ErrorKind::Config,
         "receptive field: sigma rules must lie in [1/9, 9]");
  }
  if (params.inhibition_factor < 0.0 || params.inhibition_factor > 1.0) {
    fail(ErrorKind::Config,
         "receptive field: inhibition factor must lie in [0, 1]");
  }
}

SpectralMask gaussian_mask(const FrequencyBand& band, double sigma_rule,
                           const FrequencyGrid& grid) {
  if (!(band.f_min_hz < band.f_max_hz) || band.f_min_hz < 0.0) {
    fail(ErrorKind::DegenerateBand,
         "gaussian mask: band requires 0 <= f_min < f_max (got [" +
             format_double(band.f_min_hz) + ", " +
             format_double(band.f_max_hz) + "])");
  }
  if (sigma_rule <= 0.0) {
    fail(ErrorKind::Config, "gaussian mask: sigma rule must be positive");
  }
  const double center = 0.5 * (band.f_min_hz + band.f_max_hz);
  const double sigma = (band.f_max_hz - band.f_min_hz) / (2.0 * sigma_rule);
  return gaussian_centered(center, sigma, grid);
}

SpectralMask disjunction(std::span<const SpectralMask> masks) {
  if (masks.empty()) {
    fail(ErrorKind::EmptyDisjunction, "disjunction: no masks given");
  }
  SpectralMask out = masks.front();
  for (std::size_t m = 1; m < masks.size(); ++m) {
    if (masks[m].grid != out.grid) {
      fail(ErrorKind::GridMismatch, "disjunction: masks on different grids");
    }
    for (std::size_t i = 0; i < out.gains.size(); ++i) {
      out.gains[i] = std::max(out.gains[i], masks[m].gains[i]);
    }
  }
  return out;
}

SpectralMask receptive_field_gain(std::span<const double> frequencies_hz,
                                  double bandwidth_hz, double sigma_rule,
                                  const FrequencyGrid& grid) {
  if (frequencies_hz.empty()) {
    fail(ErrorKind::EmptyDisjunction, "receptive field: no frequencies given");
  }
  if (bandwidth_hz <= 0.0) {
    fail(ErrorKind::Config, "receptive field: bandwidth must be positive");
  }
  if (sigma_rule <= 0.0) {
    fail(ErrorKind::Config, "receptive field: sigma rule must be positive");
  }
  const double grid_max = grid.max_frequency();
  const double half = 0.5 * bandwidth_hz;
  const double sigma = bandwidth_hz / (2.0 * sigma_rule);

  std::vector<SpectralMask> members;
  members.reserve(frequencies_hz.size());
  for (double f : frequencies_hz) {
    // Bands with no overlap with [0, fs/2] are discarded; bands partially
    // outside keep their center on the characteristic frequency and are
    // clipped by evaluation on the non-negative grid.
    if (f + half < 0.0 || f - half > grid_max) continue;
    members.push_back(gaussian_centered(f, sigma, grid));
  }
  if (members.empty()) {
    fail(ErrorKind::EmptyDisjunction,
         "receptive field: every band lies outside the grid");
  }
  return disjunction(members);
}

DoGMask build_dog_mask(std::span<const double> fault_frequencies_hz,
                       const ReceptiveFieldParams& params,
                       const FrequencyGrid& grid) {
  const SpectralMask center =
      receptive_field_gain(fault_frequencies_hz, params.center_bandwidth_hz,
                           params.sigma_rule_center, grid);
  const SpectralMask surround =
      receptive_field_gain(fault_frequencies_hz, params.surround_bandwidth_hz,
                           params.sigma_rule_surround, grid);
  DoGMask mask{grid, std::vector<double>(grid.size, 0.0)};
  for (std::size_t i = 0; i < grid.size; ++i) {
    mask.signed_gains[i] =
        center.gains[i] - params.inhibition_factor * surround.gains[i];
  }
  return mask;
}

double dog_response(const DoGMask& mask,
                    std::span<const double> magnitude_spectrum) {
  if (magnitude_spectrum.size() != mask.signed_gains.size()) {
    fail(ErrorKind::GridMismatch,
         "dog response: spectrum length " +
             std::to_string(magnitude_spectrum.size()) +
             " does not match mask length " +
             std::to_string(mask.signed_gains.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < magnitude_spectrum.size(); ++i) {
    acc += mask.signed_gains[i] * magnitude_spectrum[i];
  }
  return acc * mask.grid.df_hz;
}

void write_mask_csv(std::ostream& out, const FrequencyGrid& grid,
                    std::span<const double> gains) {
  out << "frequency_hz,gain\n";
  for (std::size_t i = 0; i < gains.size(); ++i) {
    out << format_double(grid.frequency(i)) << ',' << format_double(gains[i])
        << '\n';
  }
}

}  // namespace sfrf
