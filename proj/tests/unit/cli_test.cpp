#include "sfrf/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "sfrf/error.hpp"
#include "sfrf/numeric_io.hpp"

using namespace sfrf;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "sfrf_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("sfrf");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Desk-scale configuration: short windows keep the FFTs cheap while the
// 1.25 Hz bins still resolve the default bandwidths.
fs::path write_desk_config(const fs::path& dir) {
  const auto path = dir / "desk.ini";
  std::ofstream out(path);
  out << "[operating]\n"
         "sampling_frequency_hz = 2560\n"
         "[synth]\n"
         "n_samples = 2048\n";
  return path;
}

RunConfig desk_config() {
  RunConfig config;
  config.operating.sampling_frequency_hz = 2560.0;
  config.synth.n_samples = 2048;
  return config;
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("synth then extract produces the documented csv shape") {
  const auto dir = temp_dir("synth_extract");
  const auto config = write_desk_config(dir);
  const auto data = dir / "run";
  CHECK(run({"synth", "--config", config.string(), "--stages",
             "10 healthy,10 outer", "--out", data.string(), "--seed",
             "11"}) == 0);
  for (int i = 1; i <= 20; ++i) {
    CHECK(fs::exists(data / (std::to_string(i) + ".csv")));
  }

  const auto out_csv = dir / "trajectory.csv";
  CHECK(run({"extract", "--config", config.string(), "--data", data.string(),
             "--out", out_csv.string()}) == 0);
  const std::string text = slurp(out_csv);
  CHECK(count_lines(text) == 21);  // header + 20 rows
  CHECK(text.rfind("snapshot,h_outer,", 0) == 0);
}

TEST_CASE("extract is byte-deterministic") {
  const auto dir = temp_dir("determinism");
  const auto config = write_desk_config(dir);
  const auto data = dir / "run";
  REQUIRE(run({"synth", "--config", config.string(), "--stages",
               "4 healthy,4 inner", "--out", data.string(), "--seed",
               "5"}) == 0);

  const auto out_a = dir / "a.csv";
  const auto out_b = dir / "b.csv";
  REQUIRE(run({"extract", "--config", config.string(), "--data", data.string(),
               "--out", out_a.string()}) == 0);
  REQUIRE(run({"extract", "--config", config.string(), "--data", data.string(),
               "--out", out_b.string(), "--threads", "4"}) == 0);
  CHECK(slurp(out_a) == slurp(out_b));

  // Regenerating the dataset with the same seed is also byte-identical.
  const auto data2 = dir / "run2";
  REQUIRE(run({"synth", "--config", config.string(), "--stages",
               "4 healthy,4 inner", "--out", data2.string(), "--seed",
               "5"}) == 0);
  CHECK(slurp(data / "3.csv") == slurp(data2 / "3.csv"));
}

TEST_CASE("missing data directory exits with the data code") {
  const auto dir = temp_dir("missing_data");
  const auto config = write_desk_config(dir);
  CHECK(run({"extract", "--config", config.string(), "--data",
             (dir / "nope").string(), "--out", (dir / "t.csv").string()}) ==
        3);
}

TEST_CASE("config errors exit with the config code") {
  const auto dir = temp_dir("bad_config");
  const auto path = dir / "bad.ini";
  {
    std::ofstream out(path);
    out << "[ga]\npopulation_size = 7\n";
  }
  CHECK(run({"extract", "--config", path.string(), "--data", dir.string(),
             "--out", (dir / "t.csv").string()}) == 2);
  CHECK(run({"synth", "--config", write_desk_config(dir).string(), "--stages",
             "0 healthy", "--out", (dir / "r").string(), "--seed", "1"}) == 2);
}

TEST_CASE("optimization commands demand a seed") {
  const auto dir = temp_dir("no_seed");
  const auto config = write_desk_config(dir);
  CHECK(run({"synth", "--config", config.string(), "--stages", "3 healthy",
             "--out", (dir / "r").string()}) == 2);
}

TEST_CASE("dump-config round trips through the parser") {
  CHECK(run({"--dump-config"}) == 0);
  const RunConfig config;
  const std::string text = serialize_config(config);
  CHECK(serialize_config(parse_config(text, "dump")) == text);
}

TEST_CASE("predict sweeps orders and writes predictions") {
  const auto dir = temp_dir("predict");
  const auto data = dir / "run";
  auto config = desk_config();
  config.seed = 17;
  cmd_synth(config, "8 healthy,8 outer", data);
  const auto trajectory_csv = dir / "trajectory.csv";
  cmd_extract(config, data, trajectory_csv);

  cmd_predict(config, trajectory_csv, {0, 2}, 3, dir / "out");
  const std::string sweep = slurp(dir / "out" / "order_sweep.csv");
  CHECK(count_lines(sweep) == 7);  // header + 2 orders x 3 repeats
  CHECK(fs::exists(dir / "out" / "order_stats.csv"));
  CHECK(fs::exists(dir / "out" / "predictions.csv"));
  CHECK(fs::exists(dir / "out" / "model.json"));
  const std::string predictions = slurp(dir / "out" / "predictions.csv");
  CHECK(count_lines(predictions) == 17);  // header + 16 snapshots

  // Orders beyond the trajectory length are configuration errors.
  CHECK_THROWS_AS(cmd_predict(config, trajectory_csv, {99}, 3, dir / "out2"),
                  Error);
}

TEST_CASE("optimize writes an archive and a best-parameter config") {
  const auto dir = temp_dir("optimize");
  const auto data = dir / "run";
  auto config = desk_config();
  config.seed = 23;
  config.ga.population_size = 8;
  config.ga.max_generations = 3;
  config.ga.stall_window = 3;
  config.regressor.n_learners = 10;
  cmd_synth(config, "6 healthy,10 outer", data);
  cmd_optimize(config, data, dir / "out");

  const std::string archive = slurp(dir / "out" / "archive.csv");
  CHECK(archive.rfind("kappa_c,kappa_s,kappa_h,", 0) == 0);
  CHECK(count_lines(archive) >= 2);
  // Every archive row is rank 0, with the trend column in maximization
  // orientation (non-negative).
  std::istringstream lines(archive);
  std::string line;
  std::getline(lines, line);  // header
  std::vector<std::vector<std::string>> rows;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 8);
    CHECK(fields[6] == "0");
    CHECK(fields[4].rfind('-', 0) == std::string::npos);
    rows.push_back(std::move(fields));
  }
  CHECK(fs::exists(dir / "out" / "history.jsonl"));

  // The emitted best config re-parses, keeps the evolved genome within
  // bounds, and matches an archive row bit-for-bit, so re-evaluating it
  // reproduces that row's objectives.
  const RunConfig best = load_config(dir / "out" / "best_config.ini");
  CHECK(best.receptive_field.sigma_rule_center >= kSigmaRuleMin);
  CHECK(best.receptive_field.sigma_rule_center <= kSigmaRuleMax);
  CHECK(best.receptive_field.inhibition_factor >= 0.0);
  CHECK(best.receptive_field.inhibition_factor <= 1.0);
  bool in_archive = false;
  for (const auto& fields : rows) {
    in_archive =
        in_archive ||
        (fields[0] == format_double(best.receptive_field.sigma_rule_center) &&
         fields[1] == format_double(best.receptive_field.sigma_rule_surround) &&
         fields[2] == format_double(best.receptive_field.inhibition_factor));
  }
  CHECK(in_archive);
}

TEST_CASE("per-mode optimization writes four archives") {
  const auto dir = temp_dir("per_mode");
  const auto data = dir / "run";
  auto config = desk_config();
  config.seed = 29;
  config.ga.population_size = 4;
  config.ga.max_generations = 2;
  config.ga.stall_window = 2;
  config.regressor.n_learners = 5;
  cmd_synth(config, "4 healthy,8 ball", data);
  cmd_optimize(config, data, dir / "out", true);
  for (const char* mode : {"outer", "inner", "ball", "cage"}) {
    CHECK(fs::exists(dir / "out" / ("archive_" + std::string(mode) + ".csv")));
    CHECK(fs::exists(dir / "out" /
                     ("best_config_" + std::string(mode) + ".ini")));
  }
}

TEST_CASE("unknown arguments fail with the config code") {
  CHECK(run({"extract", "--bogus"}) == 2);
  CHECK(run({}) == 2);
}
