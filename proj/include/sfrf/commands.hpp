#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfrf/config.hpp"

namespace sfrf {

// Command implementations behind the CLI; they throw Error and leave exit
// codes to run_cli. Every command is a pure function of (config, inputs,
// seed): reruns write byte-identical files.

void cmd_extract(const RunConfig& config,
                 const std::filesystem::path& data_dir,
                 const std::filesystem::path& out_csv,
                 const std::optional<std::filesystem::path>& export_masks_dir =
                     std::nullopt);

void cmd_optimize(const RunConfig& config,
                  const std::filesystem::path& data_dir,
                  const std::filesystem::path& out_dir, bool per_mode = false);

void cmd_predict(const RunConfig& config,
                 const std::filesystem::path& trajectory_csv,
                 const std::vector<int>& orders, int repeats,
                 const std::filesystem::path& out_dir);

void cmd_synth(const RunConfig& config, const std::string& stage_spec,
               const std::filesystem::path& out_dir);

// Exit codes: 0 success, 2 configuration error, 3 data error. Messages go
// to standard error.
int run_cli(int argc, const char* const* argv);

}  // namespace sfrf
