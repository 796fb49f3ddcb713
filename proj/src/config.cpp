#include "sfrf/config.hpp"

#include <fstream>
#include <sstream>

#include "sfrf/error.hpp"
#include "sfrf/numeric_io.hpp"

namespace sfrf {

namespace {

struct KeyRef {
  std::string section;
  std::string key;
};

[[noreturn]] void bad_value(const std::string& origin, std::size_t line,
                            const std::string& detail) {
  fail(ErrorKind::Config,
       origin + ":" + std::to_string(line) + ": " + detail);
}

double need_double(const std::string& origin, std::size_t line,
                   std::string_view value) {
  const auto parsed = parse_double(value);
  if (!parsed) bad_value(origin, line, "expected a number");
  return *parsed;
}

long long need_int(const std::string& origin, std::size_t line,
                   std::string_view value) {
  const auto parsed = parse_int(value);
  if (!parsed) bad_value(origin, line, "expected an integer");
  return *parsed;
}

bool need_bool(const std::string& origin, std::size_t line,
               std::string_view value) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad_value(origin, line, "expected true or false");
}

}  // namespace

SurrogateConfig RunConfig::surrogate() const {
  SurrogateConfig s;
  s.regressor = regressor;
  s.stride = surrogate_stride;
  s.order = surrogate_order;
  s.maximize_smoothness = maximize_smoothness;
  return s;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig config;
  config.seed.reset();

  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string_view view = trim(line);
    if (view.empty()) continue;

    if (view.front() == '[') {
      if (view.back() != ']') bad_value(origin, line_no, "unterminated section");
      section = std::string(trim(view.substr(1, view.size() - 2)));
      continue;
    }

    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      bad_value(origin, line_no, "expected key = value");
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string_view value = trim(view.substr(eq + 1));

    const auto is = [&](const char* s, const char* k) {
      return section == s && key == k;
    };

    if (is("bearing", "inner_raceway_diameter_mm")) {
      config.bearing.inner_raceway_diameter_mm =
          need_double(origin, line_no, value);
    } else if (is("bearing", "outer_raceway_diameter_mm")) {
      config.bearing.outer_raceway_diameter_mm =
          need_double(origin, line_no, value);
    } else if (is("bearing", "pitch_diameter_mm")) {
      config.bearing.pitch_diameter_mm = need_double(origin, line_no, value);
    } else if (is("bearing", "ball_diameter_mm")) {
      config.bearing.ball_diameter_mm = need_double(origin, line_no, value);
    } else if (is("bearing", "contact_angle_deg")) {
      config.bearing.contact_angle_deg = need_double(origin, line_no, value);
    } else if (is("bearing", "ball_count")) {
      config.bearing.ball_count =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("operating", "shaft_frequency_hz")) {
      config.operating.shaft_frequency_hz = need_double(origin, line_no, value);
    } else if (is("operating", "sampling_frequency_hz")) {
      config.operating.sampling_frequency_hz =
          need_double(origin, line_no, value);
    } else if (is("receptive_field", "center_bandwidth_hz")) {
      config.receptive_field.center_bandwidth_hz =
          need_double(origin, line_no, value);
    } else if (is("receptive_field", "surround_bandwidth_hz")) {
      config.receptive_field.surround_bandwidth_hz =
          need_double(origin, line_no, value);
    } else if (is("receptive_field", "sigma_rule_center")) {
      config.receptive_field.sigma_rule_center =
          need_double(origin, line_no, value);
    } else if (is("receptive_field", "sigma_rule_surround")) {
      config.receptive_field.sigma_rule_surround =
          need_double(origin, line_no, value);
    } else if (is("receptive_field", "inhibition_factor")) {
      config.receptive_field.inhibition_factor =
          need_double(origin, line_no, value);
    } else if (is("expansion", "n_harmonics")) {
      config.expansion.n_harmonics =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("expansion", "n_sidebands")) {
      config.expansion.n_sidebands =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("spectrum", "window")) {
      if (value == "rectangular") {
        config.window = WindowKind::Rectangular;
      } else if (value == "hann") {
        config.window = WindowKind::Hann;
      } else {
        bad_value(origin, line_no, "window must be rectangular or hann");
      }
    } else if (is("regressor", "n_learners")) {
      config.regressor.n_learners =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("regressor", "bootstrap_fraction")) {
      config.regressor.bootstrap_fraction = need_double(origin, line_no, value);
    } else if (is("regressor", "max_depth")) {
      config.regressor.tree.max_depth =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("regressor", "min_leaf_size")) {
      config.regressor.tree.min_leaf_size =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("surrogate", "stride")) {
      config.surrogate_stride =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("surrogate", "order")) {
      config.surrogate_order =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("surrogate", "maximize_smoothness")) {
      config.maximize_smoothness = need_bool(origin, line_no, value);
    } else if (is("ga", "population_size")) {
      config.ga.population_size =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("ga", "max_generations")) {
      config.ga.max_generations =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("ga", "spread_tolerance")) {
      config.ga.spread_tolerance = need_double(origin, line_no, value);
    } else if (is("ga", "stall_window")) {
      config.ga.stall_window =
          static_cast<int>(need_int(origin, line_no, value));
    } else if (is("ga", "crossover_rate")) {
      config.ga.crossover_rate = need_double(origin, line_no, value);
    } else if (is("ga", "crossover_index")) {
      config.ga.crossover_index = need_double(origin, line_no, value);
    } else if (is("ga", "mutation_index")) {
      config.ga.mutation_index = need_double(origin, line_no, value);
    } else if (is("ga", "mutation_rate")) {
      config.ga.mutation_rate = need_double(origin, line_no, value);
    } else if (is("synth", "n_samples")) {
      const long long n = need_int(origin, line_no, value);
      if (n < 2) bad_value(origin, line_no, "n_samples must be >= 2");
      config.synth.n_samples = static_cast<std::size_t>(n);
    } else if (is("synth", "amplitude")) {
      config.synth.amplitude = need_double(origin, line_no, value);
    } else if (is("synth", "noise_floor")) {
      config.synth.noise_floor = need_double(origin, line_no, value);
    } else if (is("run", "seed")) {
      const long long s = need_int(origin, line_no, value);
      if (s < 0) bad_value(origin, line_no, "seed must be non-negative");
      config.seed = static_cast<std::uint64_t>(s);
    } else if (is("run", "threads")) {
      config.threads = static_cast<int>(need_int(origin, line_no, value));
    } else {
      bad_value(origin, line_no,
                "unknown setting [" + section + "] " + key);
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::Config, "cannot open config file: " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  const auto d = [](double v) { return format_double(v); };

  out << "[bearing]\n";
  if (config.bearing.inner_raceway_diameter_mm) {
    out << "inner_raceway_diameter_mm = "
        << d(*config.bearing.inner_raceway_diameter_mm) << '\n';
  }
  if (config.bearing.outer_raceway_diameter_mm) {
    out << "outer_raceway_diameter_mm = "
        << d(*config.bearing.outer_raceway_diameter_mm) << '\n';
  }
  out << "pitch_diameter_mm = " << d(config.bearing.pitch_diameter_mm) << '\n'
      << "ball_diameter_mm = " << d(config.bearing.ball_diameter_mm) << '\n'
      << "contact_angle_deg = " << d(config.bearing.contact_angle_deg) << '\n'
      << "ball_count = " << config.bearing.ball_count << '\n';

  out << "\n[operating]\n"
      << "shaft_frequency_hz = " << d(config.operating.shaft_frequency_hz)
      << '\n'
      << "sampling_frequency_hz = "
      << d(config.operating.sampling_frequency_hz) << '\n';

  out << "\n[receptive_field]\n"
      << "center_bandwidth_hz = " << d(config.receptive_field.center_bandwidth_hz)
      << '\n'
      << "surround_bandwidth_hz = "
      << d(config.receptive_field.surround_bandwidth_hz) << '\n'
      << "sigma_rule_center = " << d(config.receptive_field.sigma_rule_center)
      << '\n'
      << "sigma_rule_surround = "
      << d(config.receptive_field.sigma_rule_surround) << '\n'
      << "inhibition_factor = " << d(config.receptive_field.inhibition_factor)
      << '\n';

  out << "\n[expansion]\n"
      << "n_harmonics = " << config.expansion.n_harmonics << '\n'
      << "n_sidebands = " << config.expansion.n_sidebands << '\n';

  out << "\n[spectrum]\n"
      << "window = "
      << (config.window == WindowKind::Hann ? "hann" : "rectangular") << '\n';

  out << "\n[regressor]\n"
      << "n_learners = " << config.regressor.n_learners << '\n'
      << "bootstrap_fraction = " << d(config.regressor.bootstrap_fraction)
      << '\n'
      << "max_depth = " << config.regressor.tree.max_depth << '\n'
      << "min_leaf_size = " << config.regressor.tree.min_leaf_size << '\n';

  out << "\n[surrogate]\n"
      << "stride = " << config.surrogate_stride << '\n'
      << "order = " << config.surrogate_order << '\n'
      << "maximize_smoothness = "
      << (config.maximize_smoothness ? "true" : "false") << '\n';

  out << "\n[ga]\n"
      << "population_size = " << config.ga.population_size << '\n'
      << "max_generations = " << config.ga.max_generations << '\n'
      << "spread_tolerance = " << d(config.ga.spread_tolerance) << '\n'
      << "stall_window = " << config.ga.stall_window << '\n'
      << "crossover_rate = " << d(config.ga.crossover_rate) << '\n'
      << "crossover_index = " << d(config.ga.crossover_index) << '\n'
      << "mutation_index = " << d(config.ga.mutation_index) << '\n'
      << "mutation_rate = " << d(config.ga.mutation_rate) << '\n';

  out << "\n[synth]\n"
      << "n_samples = " << config.synth.n_samples << '\n'
      << "amplitude = " << d(config.synth.amplitude) << '\n'
      << "noise_floor = " << d(config.synth.noise_floor) << '\n';

  // threads is accepted on parse but never serialized: it changes how fast
  // results arrive, not what they are, and emitted configs are part of the
  // reproducibility surface.
  out << "\n[run]\n";
  if (config.seed) out << "seed = " << *config.seed << '\n';
  return out.str();
}

void validate(const RunConfig& config) {
  validate(config.bearing);
  validate(config.operating);
  validate(config.receptive_field);
  if (config.expansion.n_harmonics < 1) {
    fail(ErrorKind::Config, "config: n_harmonics must be >= 1");
  }
  if (config.expansion.n_sidebands < 0) {
    fail(ErrorKind::Config, "config: n_sidebands must be >= 0");
  }
  if (config.regressor.n_learners < 1) {
    fail(ErrorKind::Config, "config: n_learners must be >= 1");
  }
  if (config.regressor.bootstrap_fraction <= 0.0 ||
      config.regressor.bootstrap_fraction > 1.0) {
    fail(ErrorKind::Config, "config: bootstrap_fraction must lie in (0, 1]");
  }
  if (config.regressor.tree.min_leaf_size < 1) {
    fail(ErrorKind::Config, "config: min_leaf_size must be >= 1");
  }
  if (config.surrogate_stride < 1) {
    fail(ErrorKind::Config, "config: surrogate stride must be >= 1");
  }
  if (config.surrogate_order < 0) {
    fail(ErrorKind::Config, "config: surrogate order must be >= 0");
  }
  if (config.synth.amplitude < 0.0 || config.synth.noise_floor < 0.0) {
    fail(ErrorKind::Config,
         "config: synth amplitude and noise floor must be >= 0");
  }
  if (config.threads < 0) {
    fail(ErrorKind::Config, "config: threads must be >= 0");
  }
  validate(config.ga);
}

}  // namespace sfrf
