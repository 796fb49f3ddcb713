#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sfrf/bearing.hpp"
#include "sfrf/masks.hpp"
#include "sfrf/metrics.hpp"
#include "sfrf/nsga2.hpp"
#include "sfrf/signal.hpp"

namespace sfrf {

struct SynthDefaults {
  std::size_t n_samples = 32768;
  double amplitude = 1.0;
  double noise_floor = 0.1;
};

// Everything a run needs, read from one key-value document with a section
// per module. Defaults describe the XJTU-SY operating point.
struct RunConfig {
  BearingParameters bearing = ldk_uer204();
  OperatingMode operating{35.0, 25600.0};
  ReceptiveFieldParams receptive_field;
  Expansion expansion;
  WindowKind window = WindowKind::Rectangular;
  RegressorConfig regressor;
  SurrogateConfig surrogate() const;  // assembled from the fields below
  int surrogate_stride = 2;
  int surrogate_order = 0;
  bool maximize_smoothness = false;
  GaConfig ga;
  SynthDefaults synth;
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0 = hardware concurrency
};

// Parses the document; unknown sections/keys and malformed values raise
// Error{Config} with the line number.
RunConfig parse_config(const std::string& text, const std::string& origin);
RunConfig load_config(const std::filesystem::path& path);

// Full document including defaulted values; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

// Cross-field checks (geometry, bounds, GA shape). Throws Error{Config} or
// Error{Geometry}.
void validate(const RunConfig& config);

}  // namespace sfrf
