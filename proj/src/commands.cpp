#include "sfrf/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfrf/error.hpp"
#include "sfrf/numeric_io.hpp"
#include "sfrf/pipeline.hpp"
#include "sfrf/synthetic.hpp"

namespace sfrf {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    fail(ErrorKind::Data, "cannot write output file: " + path.string());
  }
  return out;
}

std::uint64_t require_seed(const RunConfig& config) {
  if (!config.seed) {
    fail(ErrorKind::Config,
         "a seed is required (set --seed or [run] seed in the config)");
  }
  return *config.seed;
}

void write_archive_csv(std::ostream& out,
                       std::span<const Individual> members) {
  out << "kappa_c,kappa_s,kappa_h,rul_mse,monotonicity,smoothness_mad,rank,"
         "crowding\n";
  // Fixed row order for reproducibility: sort by genome.
  std::vector<const Individual*> sorted;
  for (const Individual& ind : members) sorted.push_back(&ind);
  std::sort(sorted.begin(), sorted.end(),
            [](const Individual* a, const Individual* b) {
              return a->genome < b->genome;
            });
  for (const Individual* ind : sorted) {
    out << format_double(ind->genome[0]) << ','
        << format_double(ind->genome[1]) << ','
        << format_double(ind->genome[2]) << ','
        << format_double(ind->objectives.rul_mse) << ','
        << format_double(-ind->objectives.neg_monotonicity) << ','
        << format_double(ind->objectives.smoothness_mad) << ',' << ind->rank
        << ',' << format_double(ind->crowding) << '\n';
  }
}

void write_history_jsonl(std::ostream& out, const EvolveResult& result) {
  for (std::size_t g = 0; g < result.front_history.size(); ++g) {
    nlohmann::json line;
    line["generation"] = g + 1;
    line["spread"] = result.spread_history[g];
    nlohmann::json front = nlohmann::json::array();
    for (const ObjectiveVector& objectives : result.front_history[g]) {
      front.push_back({objectives.rul_mse, -objectives.neg_monotonicity,
                       objectives.smoothness_mad});
    }
    line["front"] = std::move(front);
    out << line.dump() << '\n';
  }
}

void run_one_optimization(const RunConfig& config,
                          const RunToFailureRecord& record,
                          const SurrogateConfig& surrogate,
                          std::uint64_t seed,
                          const std::filesystem::path& out_dir,
                          const std::string& suffix) {
  ObjectiveEvaluator evaluator(record, config.bearing, config.expansion,
                               surrogate, config.window, config.threads);
  const auto bounds = receptive_field_bounds();
  const ObjectiveFn objective = [&](const std::vector<double>& genome,
                                    std::uint64_t eval_seed) {
    return evaluator.evaluate(params_from_genome(config.receptive_field, genome),
                              eval_seed);
  };

  GaConfig ga = config.ga;
  ga.seed = seed;
  ga.threads = config.threads;
  const EvolveResult result = evolve(objective, bounds, ga);

  {
    auto out = open_output(out_dir / ("archive" + suffix + ".csv"));
    write_archive_csv(out, result.archive.members);
  }
  {
    auto out = open_output(out_dir / ("history" + suffix + ".jsonl"));
    write_history_jsonl(out, result);
  }
  if (result.aborted) {
    fail(ErrorKind::Data, "optimization aborted: " + result.abort_message);
  }

  const Individual& best = select_best_rul(result.archive.members);
  RunConfig best_config = config;
  best_config.receptive_field =
      params_from_genome(config.receptive_field, best.genome);
  {
    auto out = open_output(out_dir / ("best_config" + suffix + ".ini"));
    out << serialize_config(best_config);
  }

  std::cout << "optimize" << suffix << ": " << result.generations_run
            << " generations, archive size "
            << result.archive.members.size() << ", best rul_mse "
            << format_double(best.objectives.rul_mse) << '\n';
}

}  // namespace

void cmd_extract(const RunConfig& config,
                 const std::filesystem::path& data_dir,
                 const std::filesystem::path& out_csv,
                 const std::optional<std::filesystem::path>& export_masks_dir) {
  validate(config);
  const RunToFailureRecord record = load_run(data_dir, config.operating);
  for (const std::string& warning : record.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }

  const IndicatorTrajectory trajectory = compute_trajectory(
      record, config.bearing, config.receptive_field, config.expansion,
      config.window, config.threads);
  {
    auto out = open_output(out_csv);
    write_trajectory_csv(out, trajectory);
  }

  if (export_masks_dir) {
    const FrequencyGrid grid =
        snapshot_grid(config.operating.sampling_frequency_hz,
                      record.snapshots.front().sample_count());
    const MaskBank bank =
        build_mask_bank(config.bearing, config.operating,
                        config.receptive_field, config.expansion, grid);
    for (std::size_t m = 0; m < kFaultModes.size(); ++m) {
      const auto path =
          *export_masks_dir /
          ("mask_" + std::string(fault_mode_name(kFaultModes[m])) + ".csv");
      auto out = open_output(path);
      write_mask_csv(out, grid, bank.masks[m].signed_gains);
    }
  }

  std::cout << trajectory.size() << " snapshots, " << kSfrfCount
            << " features\n";
  for (std::size_t j = 0; j < kSfrfCount; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : trajectory.rows) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    std::cout << kSfrfColumnNames[j] << ": min " << format_double(lo)
              << ", max " << format_double(hi) << '\n';
  }
}

void cmd_optimize(const RunConfig& config,
                  const std::filesystem::path& data_dir,
                  const std::filesystem::path& out_dir, bool per_mode) {
  validate(config);
  const std::uint64_t seed = require_seed(config);
  const RunToFailureRecord record = load_run(data_dir, config.operating);

  if (!per_mode) {
    run_one_optimization(config, record, config.surrogate(), seed, out_dir,
                         "");
    return;
  }
  // Independent optimizations, one per fault mode, each scoring only that
  // mode's horizontal/vertical columns.
  for (std::size_t m = 0; m < kFaultModes.size(); ++m) {
    SurrogateConfig surrogate = config.surrogate();
    surrogate.feature_columns = {static_cast<int>(m),
                                 static_cast<int>(m + 4)};
    run_one_optimization(config, record, surrogate,
                         derive_seed(seed, m), out_dir,
                         "_" + std::string(fault_mode_name(kFaultModes[m])));
  }
}

void cmd_predict(const RunConfig& config,
                 const std::filesystem::path& trajectory_csv,
                 const std::vector<int>& orders, int repeats,
                 const std::filesystem::path& out_dir) {
  validate(config);
  const std::uint64_t seed = require_seed(config);
  if (orders.empty()) {
    fail(ErrorKind::Config, "predict: no orders given");
  }
  if (repeats < 1) {
    fail(ErrorKind::Config, "predict: repeats must be >= 1");
  }

  std::ifstream in(trajectory_csv);
  if (!in) {
    fail(ErrorKind::Data,
         "cannot open trajectory file: " + trajectory_csv.string());
  }
  const IndicatorTrajectory trajectory =
      read_trajectory_csv(in, trajectory_csv.string());

  const int k = static_cast<int>(trajectory.size());
  std::vector<std::vector<std::vector<double>>> rows_per_order;
  for (int order : orders) {
    if (order < 0 || order >= k) {
      fail(ErrorKind::Config,
           "predict: order " + std::to_string(order) +
               " out of range; the trajectory has " + std::to_string(k) +
               " snapshots, so orders must lie in [0, " +
               std::to_string(k - 1) + "]");
    }
    rows_per_order.push_back(buffered_feature_matrix(trajectory, order));
  }

  const OrderSweepResult sweep =
      order_sweep(rows_per_order, orders, trajectory.rul_labels, repeats,
                  config.regressor, seed, config.threads);
  {
    auto out = open_output(out_dir / "order_sweep.csv");
    write_order_sweep_csv(out, sweep);
  }
  {
    auto out = open_output(out_dir / "order_stats.csv");
    out << "order,min,q1,median,q3,max\n";
    for (const OrderSweepStats& s : sweep.stats) {
      out << s.order << ',' << format_double(s.min) << ','
          << format_double(s.q1) << ',' << format_double(s.median) << ','
          << format_double(s.q3) << ',' << format_double(s.max) << '\n';
    }
  }

  // Per-snapshot predictions at the order with the lowest median loss,
  // refit with the first repeat's seed.
  const OrderSweepStats* best = &sweep.stats.front();
  for (const OrderSweepStats& s : sweep.stats) {
    if (s.median < best->median) best = &s;
  }
  std::size_t best_pos = 0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] == best->order) best_pos = i;
  }
  const auto ensemble = BaggingEnsemble::fit(
      rows_per_order[best_pos], trajectory.rul_labels, config.regressor,
      derive_seed(seed, static_cast<std::uint64_t>(best->order), 0),
      config.threads);
  {
    auto out = open_output(out_dir / "predictions.csv");
    out << "snapshot,rul_true,rul_pred\n";
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
      out << trajectory.snapshot_indices[t] << ','
          << format_double(trajectory.rul_labels[t]) << ','
          << format_double(ensemble.predict(rows_per_order[best_pos][t]))
          << '\n';
    }
  }
  {
    auto out = open_output(out_dir / "model.json");
    ensemble.save_json(out);
  }

  std::cout << "predict: best order " << best->order << " (median loss "
            << format_double(best->median) << ")\n";
}

void cmd_synth(const RunConfig& config, const std::string& stage_spec,
               const std::filesystem::path& out_dir) {
  validate(config);
  const std::uint64_t seed = require_seed(config);
  const auto stages = parse_stage_spec(stage_spec, config.synth.amplitude,
                                       config.synth.noise_floor);
  const RunToFailureRecord record =
      synth_run(stages, config.bearing, config.operating,
                config.synth.n_samples, seed, config.expansion,
                out_dir.filename().string());
  write_run_directory(record, out_dir);
  std::cout << "synth: wrote " << record.snapshots.size()
            << " snapshots to " << out_dir.string() << '\n';
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Spectral fault receptive fields for bearing prognosis"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
  bool dump_config = false;

  app.add_flag("--dump-config", dump_config,
               "Print the effective configuration and exit");

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Configuration file");
    sub->add_option("--seed", seed_override, "Master seed (overrides config)");
    sub->add_option("--threads", threads_override,
                    "Worker thread cap (overrides config; 0 = all cores)");
  };

  auto* extract = app.add_subcommand("extract", "Compute an indicator trajectory");
  std::string extract_data, extract_out, extract_masks;
  extract->add_option("--data", extract_data, "Run directory of <k>.csv snapshots")
      ->required();
  extract->add_option("--out", extract_out, "Output trajectory CSV")->required();
  extract->add_option("--export-masks", extract_masks,
                      "Also write the four filter gain CSVs to this directory");
  add_common(extract);

  auto* optimize =
      app.add_subcommand("optimize", "Evolve receptive-field parameters");
  std::string optimize_data, optimize_out;
  bool per_mode = false;
  optimize->add_option("--data", optimize_data, "Run directory")->required();
  optimize->add_option("--out", optimize_out, "Output directory")->required();
  optimize->add_flag("--per-mode", per_mode,
                     "Run four independent per-fault-mode optimizations");
  add_common(optimize);

  auto* predict = app.add_subcommand(
      "predict", "Sweep buffered-indicator orders and predict RUL");
  std::string predict_trajectory, predict_out, predict_orders = "0,2,10";
  int predict_repeats = 30;
  predict->add_option("--trajectory", predict_trajectory, "Trajectory CSV")
      ->required();
  predict->add_option("--out", predict_out, "Output directory")->required();
  predict->add_option("--orders", predict_orders,
                      "Comma-separated buffer orders");
  predict->add_option("--repeats", predict_repeats, "Fits per order");
  add_common(predict);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic run directory");
  std::string synth_stages, synth_out;
  synth->add_option("--stages", synth_stages,
                    "Stage spec, e.g. '10 healthy,10 outer'")
      ->required();
  synth->add_option("--out", synth_out, "Output run directory")->required();
  add_common(synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    if (seed_override) config.seed = *seed_override;
    if (threads_override) config.threads = *threads_override;

    if (dump_config) {
      std::cout << serialize_config(config);
      return 0;
    }

    if (extract->parsed()) {
      std::optional<std::filesystem::path> masks_dir;
      if (!extract_masks.empty()) masks_dir = extract_masks;
      cmd_extract(config, extract_data, extract_out, masks_dir);
    } else if (optimize->parsed()) {
      cmd_optimize(config, optimize_data, optimize_out, per_mode);
    } else if (predict->parsed()) {
      std::vector<int> orders;
      std::string_view view(predict_orders);
      std::size_t start = 0;
      while (start <= view.size()) {
        std::size_t comma = view.find(',', start);
        if (comma == std::string_view::npos) comma = view.size();
        const auto part = trim(view.substr(start, comma - start));
        start = comma + 1;
        if (part.empty()) continue;
        const auto order = parse_int(part);
        if (!order) {
          fail(ErrorKind::Config,
               "predict: bad order '" + std::string(part) + "'");
        }
        orders.push_back(static_cast<int>(*order));
      }
      cmd_predict(config, predict_trajectory, orders, predict_repeats,
                  predict_out);
    } else if (synth->parsed()) {
      cmd_synth(config, synth_stages, synth_out);
    } else {
      std::cerr << app.help();
      return 2;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Parse:
      case ErrorKind::EmptyRun:
      case ErrorKind::Data:
      case ErrorKind::DegenerateSignal:
        return 3;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sfrf
