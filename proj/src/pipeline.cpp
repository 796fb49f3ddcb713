#include "sfrf/pipeline.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "sfrf/error.hpp"
#include "sfrf/numeric_io.hpp"
#include "sfrf/parallel.hpp"

namespace sfrf {

MaskBank build_mask_bank(const BearingParameters& bearing,
                         const OperatingMode& operating,
                         const ReceptiveFieldParams& params,
                         const Expansion& expansion,
                         const FrequencyGrid& grid) {
  validate(params);
  const CharacteristicFrequencies cf =
      characteristic_frequencies(bearing, operating);
  MaskBank bank;
  bank.grid = grid;
  for (std::size_t m = 0; m < kFaultModes.size(); ++m) {
    const auto frequencies = fault_frequency_set(
        kFaultModes[m], cf, operating.shaft_frequency_hz,
        expansion.n_harmonics, expansion.n_sidebands);
    bank.masks[m] = build_dog_mask(frequencies, params, grid);
  }
  return bank;
}

SfrfVector sfrf_from_spectra(const MagnitudeSpectrum& horizontal,
                             const MagnitudeSpectrum& vertical,
                             const MaskBank& bank, int snapshot_index) {
  SfrfVector v;
  v.snapshot_index = snapshot_index;
  for (std::size_t m = 0; m < bank.masks.size(); ++m) {
    v.values[m] = dog_response(bank.masks[m], horizontal.magnitudes);
    v.values[m + 4] = dog_response(bank.masks[m], vertical.magnitudes);
  }
  return v;
}

SfrfVector compute_sfrf_vector(const Snapshot& snapshot, const MaskBank& bank,
                               WindowKind window) {
  const auto h = magnitude_spectrum(snapshot.horizontal,
                                    snapshot.sampling_frequency_hz, window);
  const auto v = magnitude_spectrum(snapshot.vertical,
                                    snapshot.sampling_frequency_hz, window);
  if (h.grid != bank.grid) {
    fail(ErrorKind::GridMismatch,
         "sfrf: snapshot grid does not match the mask bank");
  }
  return sfrf_from_spectra(h, v, bank, snapshot.snapshot_index);
}

BufferedIndicator buffered_indicator(std::span<const SfrfVector> prefix,
                                     int order) {
  if (prefix.empty()) {
    fail(ErrorKind::EmptyHistory, "buffered indicator: empty history");
  }
  if (order < 0) {
    fail(ErrorKind::Config, "buffered indicator: order must be >= 0");
  }
  BufferedIndicator out;
  out.order = order;
  out.values.reserve(kSfrfCount * static_cast<std::size_t>(order + 1));
  const std::size_t last = prefix.size() - 1;
  for (int back = 0; back <= order; ++back) {
    const std::size_t idx =
        static_cast<std::size_t>(back) <= last ? last - back : 0;
    const SfrfVector& v = prefix[idx];
    out.values.insert(out.values.end(), v.values.begin(), v.values.end());
  }
  return out;
}

IndicatorTrajectory compute_trajectory(const RunToFailureRecord& record,
                                       const BearingParameters& bearing,
                                       const ReceptiveFieldParams& params,
                                       const Expansion& expansion,
                                       WindowKind window, int threads) {
  if (record.snapshots.empty()) {
    fail(ErrorKind::EmptyRun, "trajectory: record has no snapshots");
  }
  const std::size_t n = record.snapshots.front().sample_count();
  for (const Snapshot& s : record.snapshots) {
    if (s.sample_count() != n) {
      fail(ErrorKind::GridMismatch,
           "trajectory: snapshots have differing lengths (" +
               std::to_string(n) + " vs " +
               std::to_string(s.sample_count()) + ")");
    }
  }
  const FrequencyGrid grid =
      snapshot_grid(record.operating_mode.sampling_frequency_hz, n);
  const MaskBank bank =
      build_mask_bank(bearing, record.operating_mode, params, expansion, grid);

  const std::size_t count = record.snapshots.size();
  IndicatorTrajectory trajectory;
  trajectory.bearing_id = record.bearing_id;
  trajectory.snapshot_indices.resize(count);
  trajectory.rows.resize(count);
  trajectory.rul_labels.resize(count);

  parallel_for(count, threads, [&](std::size_t i) {
    const SfrfVector v =
        compute_sfrf_vector(record.snapshots[i], bank, window);
    trajectory.snapshot_indices[i] = v.snapshot_index;
    trajectory.rows[i] = v.values;
  });

  const double k = static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    trajectory.rul_labels[i] =
        count == 1 ? 0.0 : (k - static_cast<double>(i + 1)) / (k - 1.0);
  }
  return trajectory;
}

void write_trajectory_csv(std::ostream& out,
                          const IndicatorTrajectory& trajectory) {
  out << "snapshot";
  for (const char* name : kSfrfColumnNames) out << ',' << name;
  out << ",rul_norm\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out << trajectory.snapshot_indices[i];
    for (double value : trajectory.rows[i]) out << ',' << format_double(value);
    out << ',' << format_double(trajectory.rul_labels[i]) << '\n';
  }
}

IndicatorTrajectory read_trajectory_csv(std::istream& in,
                                        const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorKind::Parse, origin + ": empty trajectory file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string expected = "snapshot";
  for (const char* name : kSfrfColumnNames) {
    expected += ',';
    expected += name;
  }
  expected += ",rul_norm";
  if (line != expected) {
    fail(ErrorKind::Parse,
         origin + ": unexpected trajectory header: '" + line + "'");
  }

  IndicatorTrajectory trajectory;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view view(line);
    std::size_t start = 0;
    for (std::size_t i = 0; i <= view.size(); ++i) {
      if (i == view.size() || view[i] == ',') {
        fields.push_back(view.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != kSfrfCount + 2) {
      fail(ErrorKind::Parse, origin + ":" + std::to_string(row) +
                                 ": expected " +
                                 std::to_string(kSfrfCount + 2) + " columns");
    }
    const auto index = parse_int(fields[0]);
    if (!index) {
      fail(ErrorKind::Parse,
           origin + ":" + std::to_string(row) + ": bad snapshot index");
    }
    std::array<double, kSfrfCount> values{};
    for (std::size_t j = 0; j < kSfrfCount; ++j) {
      const auto value = parse_double(fields[j + 1]);
      if (!value) {
        fail(ErrorKind::Parse, origin + ":" + std::to_string(row) + ":col " +
                                   std::to_string(j + 2) + ": not a number");
      }
      values[j] = *value;
    }
    const auto label = parse_double(fields.back());
    if (!label) {
      fail(ErrorKind::Parse,
           origin + ":" + std::to_string(row) + ": bad rul_norm value");
    }
    trajectory.snapshot_indices.push_back(static_cast<int>(*index));
    trajectory.rows.push_back(values);
    trajectory.rul_labels.push_back(*label);
  }
  if (trajectory.rows.empty()) {
    fail(ErrorKind::Parse, origin + ": trajectory has no rows");
  }
  return trajectory;
}

}  // namespace sfrf
