#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sfrf/bearing.hpp"
#include "sfrf/masks.hpp"
#include "sfrf/signal.hpp"

namespace sfrf {

// Feature layout of one indicator vector: four fault modes on the horizontal
// channel, then the same four on the vertical channel.
inline constexpr std::size_t kSfrfCount = 8;
inline constexpr std::array<const char*, kSfrfCount> kSfrfColumnNames = {
    "h_outer", "h_inner", "h_ball", "h_cage",
    "v_outer", "v_inner", "v_ball", "v_cage"};

struct SfrfVector {
  int snapshot_index = 1;
  std::array<double, kSfrfCount> values{};
};

// Current vector followed by the previous `order` vectors, most recent
// first; 8 * (order + 1) values in all.
struct BufferedIndicator {
  int order = 0;
  std::vector<double> values;
};

struct IndicatorTrajectory {
  std::string bearing_id;
  std::vector<int> snapshot_indices;
  std::vector<std::array<double, kSfrfCount>> rows;  // K x 8
  std::vector<double> rul_labels;                    // 1 -> 0, last entry 0

  std::size_t size() const { return rows.size(); }
};

// The four signed spectral filters for one operating point, shared by both
// channels (same grid). Filters are built once per run and reused across
// snapshots.
struct MaskBank {
  FrequencyGrid grid;
  std::array<DoGMask, 4> masks;  // indexed in kFaultModes order
};

MaskBank build_mask_bank(const BearingParameters& bearing,
                         const OperatingMode& operating,
                         const ReceptiveFieldParams& params,
                         const Expansion& expansion,
                         const FrequencyGrid& grid);

// Eight filter responses for one snapshot: the magnitude spectrum of each
// channel evaluated against all four masks.
SfrfVector compute_sfrf_vector(const Snapshot& snapshot, const MaskBank& bank,
                               WindowKind window = WindowKind::Rectangular);

SfrfVector sfrf_from_spectra(const MagnitudeSpectrum& horizontal,
                             const MagnitudeSpectrum& vertical,
                             const MaskBank& bank, int snapshot_index);

// Concatenates the newest vector with its `order` predecessors. When fewer
// than `order` predecessors exist the earliest vector is replicated, which
// keeps the warm-up trend-neutral. Throws Error{EmptyHistory} on an empty
// prefix.
BufferedIndicator buffered_indicator(std::span<const SfrfVector> prefix,
                                     int order);

// Full-run indicator matrix with linear normalized-RUL labels
// (K - t) / (K - 1); a single-snapshot run gets the degenerate label 0.
IndicatorTrajectory compute_trajectory(const RunToFailureRecord& record,
                                       const BearingParameters& bearing,
                                       const ReceptiveFieldParams& params,
                                       const Expansion& expansion,
                                       WindowKind window = WindowKind::Rectangular,
                                       int threads = 1);

// CSV interchange format:
// snapshot,h_outer,h_inner,h_ball,h_cage,v_outer,v_inner,v_ball,v_cage,rul_norm
void write_trajectory_csv(std::ostream& out,
                          const IndicatorTrajectory& trajectory);
IndicatorTrajectory read_trajectory_csv(std::istream& in,
                                        const std::string& origin);

}  // namespace sfrf
