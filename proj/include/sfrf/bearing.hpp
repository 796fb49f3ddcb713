#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace sfrf {

// Rolling-element bearing geometry. Raceway diameters are optional; when both
// are present they must be consistent with the pitch diameter.
struct BearingParameters {
  std::optional<double> inner_raceway_diameter_mm;
  std::optional<double> outer_raceway_diameter_mm;
  double pitch_diameter_mm = 0.0;
  double ball_diameter_mm = 0.0;
  double contact_angle_deg = 0.0;
  int ball_count = 0;
};

struct OperatingMode {
  double shaft_frequency_hz = 0.0;
  double sampling_frequency_hz = 0.0;
};

struct CharacteristicFrequencies {
  double bpfo_hz = 0.0;  // ball pass frequency, outer race
  double bpfi_hz = 0.0;  // ball pass frequency, inner race
  double bsf_hz = 0.0;   // ball spin frequency
  double ftf_hz = 0.0;   // fundamental train (cage) frequency
};

enum class FaultMode { OuterRace, InnerRace, Ball, Cage };

inline constexpr std::array<FaultMode, 4> kFaultModes = {
    FaultMode::OuterRace, FaultMode::InnerRace, FaultMode::Ball,
    FaultMode::Cage};

std::string_view fault_mode_name(FaultMode mode);
std::optional<FaultMode> fault_mode_from_name(std::string_view name);

// Harmonic/sideband expansion orders for the per-mode frequency sets.
struct Expansion {
  int n_harmonics = 2;
  int n_sidebands = 2;
};

// One member of a fault frequency set, with the harmonic/sideband indices it
// came from (sideband index 0 for the harmonic itself).
struct FrequencyComponent {
  double frequency_hz = 0.0;
  int harmonic = 1;
  int sideband = 0;
};

// Throws Error{Geometry} on non-positive diameters, ball >= pitch,
// ball_count < 1, or raceway/pitch inconsistency beyond 1e-6 mm.
void validate(const BearingParameters& params);

// Throws Error{Config} on non-positive frequencies.
void validate(const OperatingMode& mode);

// Closed-form characteristic frequencies. Linear in the shaft frequency;
// shaft_frequency_hz = 0 yields all zeros.
CharacteristicFrequencies characteristic_frequencies(
    const BearingParameters& params, const OperatingMode& mode);

// Expands one fault mode into its harmonic/sideband components:
//   OuterRace: n*BPFO                      n = 1..N_h
//   InnerRace: n*BPFI + s*f_r              n = 1..N_h, s = -N_s..N_s
//   Ball:      n*BSF  + s*FTF              n = 1..N_h, s = -N_s..N_s
//   Cage:      n*FTF                       n = 1..N_h
// Sorted ascending; non-positive frequencies dropped; collisions within
// 1e-9 Hz collapsed, keeping the lower-order member.
std::vector<FrequencyComponent> fault_frequency_components(
    FaultMode mode, const CharacteristicFrequencies& cf,
    double shaft_frequency_hz, int n_harmonics, int n_sidebands);

std::vector<double> fault_frequency_set(FaultMode mode,
                                        const CharacteristicFrequencies& cf,
                                        double shaft_frequency_hz,
                                        int n_harmonics, int n_sidebands);

// Geometry of the LDK UER204 bearing used by the XJTU-SY run-to-failure
// test rig.
BearingParameters ldk_uer204();

}  // namespace sfrf
