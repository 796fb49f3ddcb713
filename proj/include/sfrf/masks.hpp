#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace sfrf {

// Uniform non-negative frequency axis: bin i sits at i * df. A snapshot of N
// samples at rate fs yields df = fs / N and floor(N/2) + 1 one-sided bins.
struct FrequencyGrid {
  double df_hz = 0.0;
  std::size_t size = 0;

  double frequency(std::size_t i) const { return df_hz * static_cast<double>(i); }
  double max_frequency() const {
    return size == 0 ? 0.0 : df_hz * static_cast<double>(size - 1);
  }
  bool operator==(const FrequencyGrid&) const = default;
};

FrequencyGrid snapshot_grid(double sampling_frequency_hz,
                            std::size_t n_samples);

struct FrequencyBand {
  double f_min_hz = 0.0;
  double f_max_hz = 0.0;
};

// Tunable shape of one center-surround spectral detector. The sigma rules
// set how many Gaussian standard deviations the band half-width spans; the
// inhibition factor scales the subtracted surround.
struct ReceptiveFieldParams {
  double center_bandwidth_hz = 4.0;
  double surround_bandwidth_hz = 12.0;
  double sigma_rule_center = 2.0;
  double sigma_rule_surround = 2.0;
  double inhibition_factor = 1.0 / 3.0;
};

inline constexpr double kSigmaRuleMin = 1.0 / 9.0;
inline constexpr double kSigmaRuleMax = 9.0;

void validate(const ReceptiveFieldParams& params);

// Gain function over a frequency grid, values in [0, 1].
struct SpectralMask {
  FrequencyGrid grid;
  std::vector<double> gains;
};

// Signed center-minus-surround gains, values in [-inhibition_factor, 1].
struct DoGMask {
  FrequencyGrid grid;
  std::vector<double> signed_gains;
};

// gains[i] = exp(-0.5 ((f_i - f_c) / sigma_f)^2) with f_c the band midpoint
// and sigma_f = band_width / (2 * sigma_rule). Evaluated within
// +-12 sigma_f of the center; beyond that the gain is set to 0 (true value
// below 1e-31). Throws Error{DegenerateBand} when f_min >= f_max.
SpectralMask gaussian_mask(const FrequencyBand& band, double sigma_rule,
                           const FrequencyGrid& grid);

// Bin-wise maximum. Throws Error{EmptyDisjunction} on an empty list and
// Error{GridMismatch} when grids differ.
SpectralMask disjunction(std::span<const SpectralMask> masks);

// One band [f - W/2, f + W/2] per characteristic frequency; bands with no
// overlap with the grid span are dropped, the rest are Gaussian-masked
// (centers stay on the characteristic frequencies) and combined by
// disjunction. Throws Error{EmptyDisjunction} when every band lies outside
// the grid.
SpectralMask receptive_field_gain(std::span<const double> frequencies_hz,
                                  double bandwidth_hz, double sigma_rule,
                                  const FrequencyGrid& grid);

// Center gain minus inhibition_factor times surround gain, bin-wise. Both
// gain functions are anchored on the same frequency set.
DoGMask build_dog_mask(std::span<const double> fault_frequencies_hz,
                       const ReceptiveFieldParams& params,
                       const FrequencyGrid& grid);

// Riemann sum of signed gain times magnitude over the grid:
// sum_i signed_gains[i] * spectrum[i] * df. Negative results are possible
// when surround energy dominates. Throws Error{GridMismatch} on length
// mismatch.
double dog_response(const DoGMask& mask,
                    std::span<const double> magnitude_spectrum);

// Two-column CSV (frequency_hz,gain), header included.
void write_mask_csv(std::ostream& out, const FrequencyGrid& grid,
                    std::span<const double> gains);

}  // namespace sfrf
