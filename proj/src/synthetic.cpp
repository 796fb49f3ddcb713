#include "sfrf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sfrf/error.hpp"
#include "sfrf/numeric_io.hpp"

namespace sfrf {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Snapshot synth_snapshot(const CharacteristicFrequencies& cf,
                        const std::vector<FaultInjection>& injections,
                        const OperatingMode& mode, std::size_t n_samples,
                        int snapshot_index, Rng& rng,
                        const Expansion& expansion) {
  if (n_samples < 2) {
    fail(ErrorKind::DegenerateSignal, "synth: need at least 2 samples");
  }

  Snapshot snapshot;
  snapshot.sampling_frequency_hz = mode.sampling_frequency_hz;
  snapshot.snapshot_index = snapshot_index;
  snapshot.horizontal.assign(n_samples, 0.0);
  snapshot.vertical.assign(n_samples, 0.0);

  const double dt = 1.0 / mode.sampling_frequency_hz;
  double noise_variance = 0.0;

  for (const FaultInjection& injection : injections) {
    noise_variance += injection.noise_floor * injection.noise_floor;
    const double base =
        injection.amplitude ? injection.amplitude(snapshot_index) : 0.0;
    if (base < 0.0) {
      fail(ErrorKind::Config, "synth: amplitude profile must be non-negative");
    }
    const int sidebands =
        injection.include_sidebands ? expansion.n_sidebands : 0;
    const auto components =
        fault_frequency_components(injection.mode, cf,
                                   mode.shaft_frequency_hz,
                                   expansion.n_harmonics, sidebands);
    for (const FrequencyComponent& c : components) {
      // Phase is drawn even for silent snapshots so the stream position
      // depends only on the injection layout, not on amplitudes.
      const double phase = uniform_real(rng, 0.0, 2.0 * kPi);
      if (base == 0.0) continue;
      const int order = (c.harmonic - 1) + std::abs(c.sideband);
      const double amplitude = base * std::pow(0.5, order);
      const double omega = 2.0 * kPi * c.frequency_hz;
      for (std::size_t t = 0; t < n_samples; ++t) {
        const double value =
            amplitude * std::sin(omega * static_cast<double>(t) * dt + phase);
        snapshot.horizontal[t] += value;
        snapshot.vertical[t] += value;
      }
    }
  }

  if (noise_variance > 0.0) {
    const double sigma = std::sqrt(noise_variance);
    for (std::size_t t = 0; t < n_samples; ++t) {
      snapshot.horizontal[t] += normal(rng, 0.0, sigma);
    }
    for (std::size_t t = 0; t < n_samples; ++t) {
      snapshot.vertical[t] += normal(rng, 0.0, sigma);
    }
  }
  return snapshot;
}

RunToFailureRecord synth_run(const std::vector<SynthStage>& stages,
                             const BearingParameters& bearing,
                             const OperatingMode& mode, std::size_t n_samples,
                             std::uint64_t seed, const Expansion& expansion,
                             const std::string& bearing_id) {
  int total = 0;
  for (const SynthStage& stage : stages) {
    if (stage.duration < 0) {
      fail(ErrorKind::Config, "synth: stage duration must be >= 0");
    }
    total += stage.duration;
  }
  if (total < 3) {
    fail(ErrorKind::Config,
         "synth: run needs a total duration of at least 3 snapshots");
  }

  const CharacteristicFrequencies cf = characteristic_frequencies(bearing, mode);

  RunToFailureRecord record;
  record.bearing_id = bearing_id;
  record.operating_mode = mode;
  record.snapshots.reserve(static_cast<std::size_t>(total));

  int index = 1;
  for (const SynthStage& stage : stages) {
    for (int k = 0; k < stage.duration; ++k, ++index) {
      // Per-snapshot stream: the record does not depend on how snapshots
      // are grouped into stages being generated in sequence elsewhere.
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
      record.snapshots.push_back(synth_snapshot(
          cf, stage.injections, mode, n_samples, index, rng, expansion));
    }
  }
  return record;
}

FaultInjection constant_injection(FaultMode mode, double amplitude,
                                  double noise_floor, bool include_sidebands) {
  FaultInjection injection;
  injection.mode = mode;
  injection.amplitude = [amplitude](int) { return amplitude; };
  injection.include_sidebands = include_sidebands;
  injection.noise_floor = noise_floor;
  return injection;
}

FaultInjection ramp_injection(FaultMode mode, double peak_amplitude,
                              double noise_floor, int start_index,
                              int end_index, bool include_sidebands) {
  FaultInjection injection;
  injection.mode = mode;
  injection.amplitude = [=](int index) {
    if (index < start_index) return 0.0;
    if (index >= end_index || end_index == start_index) return peak_amplitude;
    const double progress = static_cast<double>(index - start_index + 1) /
                            static_cast<double>(end_index - start_index + 1);
    return peak_amplitude * progress;
  };
  injection.include_sidebands = include_sidebands;
  injection.noise_floor = noise_floor;
  return injection;
}

FaultInjection healthy_injection(double noise_floor) {
  FaultInjection injection;
  injection.mode = FaultMode::OuterRace;
  injection.amplitude = [](int) { return 0.0; };
  injection.include_sidebands = false;
  injection.noise_floor = noise_floor;
  return injection;
}

std::vector<SynthStage> parse_stage_spec(const std::string& spec,
                                         double amplitude,
                                         double noise_floor) {
  std::vector<SynthStage> stages;
  std::size_t start = 0;
  int index = 1;
  std::string_view view(spec);
  while (start <= view.size()) {
    std::size_t comma = view.find(',', start);
    if (comma == std::string_view::npos) comma = view.size();
    const std::string_view part = trim(view.substr(start, comma - start));
    start = comma + 1;
    if (part.empty()) continue;

    const std::size_t space = part.find(' ');
    if (space == std::string_view::npos) {
      fail(ErrorKind::Config,
           "stage spec: expected '<count> <kind>', got '" +
               std::string(part) + "'");
    }
    const auto count = parse_int(part.substr(0, space));
    const std::string_view kind = trim(part.substr(space + 1));
    if (!count || *count < 1) {
      fail(ErrorKind::Config,
           "stage spec: bad snapshot count in '" + std::string(part) + "'");
    }
    const int duration = static_cast<int>(*count);

    SynthStage stage;
    stage.duration = duration;
    if (kind == "healthy") {
      stage.injections.push_back(healthy_injection(noise_floor));
    } else if (const auto mode = fault_mode_from_name(kind)) {
      stage.injections.push_back(ramp_injection(
          *mode, amplitude, noise_floor, index, index + duration - 1));
    } else {
      fail(ErrorKind::Config,
           "stage spec: unknown stage kind '" + std::string(kind) + "'");
    }
    stages.push_back(std::move(stage));
    index += duration;
  }
  if (stages.empty()) {
    fail(ErrorKind::Config, "stage spec: no stages given");
  }
  return stages;
}

void write_run_directory(const RunToFailureRecord& record,
                         const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  for (const Snapshot& snapshot : record.snapshots) {
    const auto path =
        directory / (std::to_string(snapshot.snapshot_index) + ".csv");
    std::ofstream out(path);
    if (!out) {
      fail(ErrorKind::Data, "cannot write snapshot file: " + path.string());
    }
    write_snapshot_csv(out, snapshot);
  }
}

}  // namespace sfrf
