#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sfrf/bearing.hpp"
#include "sfrf/masks.hpp"

namespace sfrf {

// One run-to-failure vibration record: two acceleration channels sampled
// over a short window, indexed by minutes since the start of the run.
struct Snapshot {
  std::vector<double> horizontal;
  std::vector<double> vertical;
  double sampling_frequency_hz = 0.0;
  int snapshot_index = 1;  // 1-based

  std::size_t sample_count() const { return horizontal.size(); }
  double window_seconds() const {
    return sampling_frequency_hz > 0.0
               ? static_cast<double>(sample_count()) / sampling_frequency_hz
               : 0.0;
  }
};

struct MagnitudeSpectrum {
  FrequencyGrid grid;
  std::vector<double> magnitudes;
};

struct RunToFailureRecord {
  std::string bearing_id;
  std::vector<Snapshot> snapshots;
  OperatingMode operating_mode;
  std::vector<std::string> warnings;  // e.g. gaps in the snapshot numbering
};

enum class WindowKind { Rectangular, Hann };

// Two-column numeric CSV (horizontal, vertical), optional header line.
// Throws Error{Parse} with the row/column location on malformed input and
// when fewer than 2 rows are present.
Snapshot load_snapshot(const std::filesystem::path& path,
                       double sampling_frequency_hz, int snapshot_index);

Snapshot parse_snapshot_csv(std::istream& in, const std::string& origin,
                            double sampling_frequency_hz, int snapshot_index);

void write_snapshot_csv(std::ostream& out, const Snapshot& snapshot);

// One-sided magnitude spectrum with 1/N amplitude normalization and a
// factor 2 on all bins except DC and (for even N) Nyquist, so an on-bin
// sinusoid of amplitude a reads as magnitude a. With a Hann window the
// magnitudes are rescaled by the window's coherent gain to keep that
// property. Throws Error{DegenerateSignal} for N < 2.
MagnitudeSpectrum magnitude_spectrum(std::span<const double> samples,
                                     double sampling_frequency_hz,
                                     WindowKind window = WindowKind::Rectangular);

void write_spectrum_csv(std::ostream& out, const MagnitudeSpectrum& spectrum);

// Loads <k>.csv for k = 1.. from a directory, ordered by numeric filename.
// Gaps in the numbering are recorded as warnings; an empty directory is an
// Error{EmptyRun}.
RunToFailureRecord load_run(const std::filesystem::path& directory,
                            const OperatingMode& operating_mode,
                            const std::string& bearing_id = "");

}  // namespace sfrf
