#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sfrf/bearing.hpp"
#include "sfrf/rng.hpp"
#include "sfrf/signal.hpp"

namespace sfrf {

// One injected fault signature. Each frequency-set member contributes a
// sinusoid whose amplitude decays by a factor 1/2 per combined
// harmonic/sideband order, i.e. amplitude * 0.5^((n-1) + |s|); white
// Gaussian noise with the given standard deviation is added per channel.
struct FaultInjection {
  FaultMode mode = FaultMode::OuterRace;
  std::function<double(int)> amplitude;  // snapshot index (1-based) -> amplitude
  bool include_sidebands = true;
  double noise_floor = 0.0;
};

// Tones are identical on both channels (shared phases drawn from the rng);
// noise realizations are independent per channel. Noise floors of multiple
// injections combine as sqrt of the summed variances.
Snapshot synth_snapshot(const CharacteristicFrequencies& cf,
                        const std::vector<FaultInjection>& injections,
                        const OperatingMode& mode, std::size_t n_samples,
                        int snapshot_index, Rng& rng,
                        const Expansion& expansion = {});

// One segment of a run: `duration` snapshots sharing a set of injections.
// A fault stage typically ramps its amplitude linearly across the stage.
struct SynthStage {
  int duration = 0;
  std::vector<FaultInjection> injections;  // profiles see the global index
};

RunToFailureRecord synth_run(const std::vector<SynthStage>& stages,
                             const BearingParameters& bearing,
                             const OperatingMode& mode, std::size_t n_samples,
                             std::uint64_t seed,
                             const Expansion& expansion = {},
                             const std::string& bearing_id = "synthetic");

// Convenience builders for the common two-stage pattern.
FaultInjection constant_injection(FaultMode mode, double amplitude,
                                  double noise_floor,
                                  bool include_sidebands = true);
// Amplitude 0 at the snapshot before `start_index`, rising linearly to
// `peak_amplitude` at `end_index`.
FaultInjection ramp_injection(FaultMode mode, double peak_amplitude,
                              double noise_floor, int start_index,
                              int end_index, bool include_sidebands = true);
// Noise only.
FaultInjection healthy_injection(double noise_floor);

// Parses the stage mini-language used by the synth command:
// "10 healthy,10 outer" -> ten noise-only snapshots, then ten snapshots with
// an outer-race signature ramping from 0 to `amplitude`. Stage kinds:
// healthy | outer | inner | ball | cage. Throws Error{Config} on malformed
// specs or a zero-duration total.
std::vector<SynthStage> parse_stage_spec(const std::string& spec,
                                         double amplitude, double noise_floor);

// Writes <k>.csv snapshot files in the run-directory layout consumed by
// load_run.
void write_run_directory(const RunToFailureRecord& record,
                         const std::filesystem::path& directory);

}  // namespace sfrf
