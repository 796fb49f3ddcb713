#include "sfrf/bearing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfrf/error.hpp"

namespace sfrf {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kCollisionToleranceHz = 1e-9;
}  // namespace

std::string_view fault_mode_name(FaultMode mode) {
  switch (mode) {
    case FaultMode::OuterRace: return "outer";
    case FaultMode::InnerRace: return "inner";
    case FaultMode::Ball: return "ball";
    case FaultMode::Cage: return "cage";
  }
  return "unknown";
}

std::optional<FaultMode> fault_mode_from_name(std::string_view name) {
  for (FaultMode mode : kFaultModes) {
    if (name == fault_mode_name(mode)) return mode;
  }
  return std::nullopt;
}

void validate(const BearingParameters& params) {
  if (params.pitch_diameter_mm <= 0.0 || params.ball_diameter_mm <= 0.0) {
    fail(ErrorKind::Geometry, "bearing: diameters must be positive");
  }
  if (params.ball_diameter_mm >= params.pitch_diameter_mm) {
    fail(ErrorKind::Geometry,
         "bearing: ball diameter must be smaller than pitch diameter");
  }
  if (params.ball_count < 1) {
    fail(ErrorKind::Geometry, "bearing: ball count must be at least 1");
  }
  const bool have_inner = params.inner_raceway_diameter_mm.has_value();
  const bool have_outer = params.outer_raceway_diameter_mm.has_value();
  if (have_inner && *params.inner_raceway_diameter_mm <= 0.0) {
    fail(ErrorKind::Geometry, "bearing: inner raceway diameter must be positive");
  }
  if (have_outer && *params.outer_raceway_diameter_mm <= 0.0) {
    fail(ErrorKind::Geometry, "bearing: outer raceway diameter must be positive");
  }
  if (have_inner && have_outer) {
    const double implied = 0.5 * (*params.inner_raceway_diameter_mm +
                                  *params.outer_raceway_diameter_mm);
    if (std::fabs(implied - params.pitch_diameter_mm) > 1e-6) {
      fail(ErrorKind::Geometry,
           "bearing: pitch diameter inconsistent with raceway diameters "
           "(expected " +
               std::to_string(implied) + " mm)");
    }
  }
}

void validate(const OperatingMode& mode) {
  if (mode.shaft_frequency_hz <= 0.0) {
    fail(ErrorKind::Config, "operating mode: shaft frequency must be positive");
  }
  if (mode.sampling_frequency_hz <= 0.0) {
    fail(ErrorKind::Config,
         "operating mode: sampling frequency must be positive");
  }
}

CharacteristicFrequencies characteristic_frequencies(
    const BearingParameters& params, const OperatingMode& mode) {
  validate(params);
  const double fr = mode.shaft_frequency_hz;
  const double ratio = params.ball_diameter_mm / params.pitch_diameter_mm;
  const double cos_phi = std::cos(params.contact_angle_deg * kPi / 180.0);
  const double rc = ratio * cos_phi;
  const double half_balls = 0.5 * static_cast<double>(params.ball_count);

  CharacteristicFrequencies cf;
  cf.bpfo_hz = fr * half_balls * (1.0 - rc);
  cf.bpfi_hz = fr * half_balls * (1.0 + rc);
  cf.bsf_hz = fr * (params.pitch_diameter_mm /
                    (2.0 * params.ball_diameter_mm)) * (1.0 - rc * rc);
  cf.ftf_hz = fr * 0.5 * (1.0 - rc);
  return cf;
}

std::vector<FrequencyComponent> fault_frequency_components(
    FaultMode mode, const CharacteristicFrequencies& cf,
    double shaft_frequency_hz, int n_harmonics, int n_sidebands) {
  if (n_harmonics < 1) {
    fail(ErrorKind::Config, "fault frequency set: n_harmonics must be >= 1");
  }
  if (n_sidebands < 0) {
    fail(ErrorKind::Config, "fault frequency set: n_sidebands must be >= 0");
  }

  double carrier = 0.0;
  double modulator = 0.0;
  switch (mode) {
    case FaultMode::OuterRace: carrier = cf.bpfo_hz; break;
    case FaultMode::InnerRace:
      carrier = cf.bpfi_hz;
      modulator = shaft_frequency_hz;
      break;
    case FaultMode::Ball:
      carrier = cf.bsf_hz;
      modulator = cf.ftf_hz;
      break;
    case FaultMode::Cage: carrier = cf.ftf_hz; break;
  }
  const bool has_sidebands =
      mode == FaultMode::InnerRace || mode == FaultMode::Ball;
  const int s_max = has_sidebands ? n_sidebands : 0;

  std::vector<FrequencyComponent> out;
  out.reserve(static_cast<std::size_t>(n_harmonics) * (2 * s_max + 1));
  for (int n = 1; n <= n_harmonics; ++n) {
    for (int s = -s_max; s <= s_max; ++s) {
      const double f = n * carrier + s * modulator;
      if (f <= 0.0) continue;
      out.push_back({f, n, s});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FrequencyComponent& a, const FrequencyComponent& b) {
              return a.frequency_hz < b.frequency_hz;
            });

  // Collapse exact-arithmetic collisions, keeping the lower-order member
  // (smaller harmonic + |sideband|), which carries the stronger response.
  std::vector<FrequencyComponent> unique;
  unique.reserve(out.size());
  for (const FrequencyComponent& c : out) {
    if (!unique.empty() &&
        c.frequency_hz - unique.back().frequency_hz <= kCollisionToleranceHz) {
      FrequencyComponent& kept = unique.back();
      const int kept_order = (kept.harmonic - 1) + std::abs(kept.sideband);
      const int cand_order = (c.harmonic - 1) + std::abs(c.sideband);
      if (cand_order < kept_order) kept = c;
      continue;
    }
    unique.push_back(c);
  }
  return unique;
}

std::vector<double> fault_frequency_set(FaultMode mode,
                                        const CharacteristicFrequencies& cf,
                                        double shaft_frequency_hz,
                                        int n_harmonics, int n_sidebands) {
  const auto components = fault_frequency_components(
      mode, cf, shaft_frequency_hz, n_harmonics, n_sidebands);
  std::vector<double> out;
  out.reserve(components.size());
  for (const FrequencyComponent& c : components) out.push_back(c.frequency_hz);
  return out;
}

BearingParameters ldk_uer204() {
  BearingParameters p;
  p.inner_raceway_diameter_mm = 29.30;
  p.outer_raceway_diameter_mm = 39.80;
  p.pitch_diameter_mm = 34.55;
  p.ball_diameter_mm = 7.92;
  p.contact_angle_deg = 0.0;
  p.ball_count = 8;
  return p;
}

}  // namespace sfrf
