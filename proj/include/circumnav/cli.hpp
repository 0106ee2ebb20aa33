#pragma once

#include <optional>
#include <string>
#include <vector>

#include "circumnav/config.hpp"

namespace circumnav {

// Command implementations shared by the executable and the test suites.
// Each writes its outputs (resolved config + CSVs + weights) into an output
// directory and returns the process exit code: 0 success, 3 when the run
// finished but some trial diverged. Validation and runtime failures throw.

struct CommonArgs {
  std::string config_path;                 // optional config file
  std::string preset;                      // optional preset name
  std::vector<std::string> overrides;      // section.key=value pairs
  std::string out_dir;                     // empty: timestamped under the output root
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> noise_sigma;
};

// Builds the effective config: defaults -> preset -> config file ->
// overrides -> direct flags.
RunConfig build_config(const CommonArgs& args);

// Resolves the output directory (creating it). Empty explicit_dir picks
// <root>/<command>-<timestamp>; root comes from $CIRCUMNAV_OUT_ROOT or
// ./runs.
std::string resolve_out_dir(const std::string& explicit_dir, const std::string& command);

struct TrainArgs {
  CommonArgs common;
  std::optional<long> iterations;
};

int cmd_train(const TrainArgs& args);

struct SimulateArgs {
  CommonArgs common;
  std::string scenario = "constant:9";  // "fast:" prefix applies the fast profile
  std::string weights_path;             // exclusive with the flags below
  bool use_oracle = false;
  bool use_hold_initial = false;
  std::optional<long> steps;
};

int cmd_simulate(const SimulateArgs& args);

struct SweepArgs {
  CommonArgs common;
  std::string name;          // constant-velocity | circle | nonholonomic | noise | fast
  std::string weights_path;  // single-model sweeps
  bool use_oracle = false;
  bool use_hold_initial = false;
  std::optional<long> trials;            // nonholonomic override
  std::string weights_pattern;           // noise sweep; must contain {sigma}
  std::vector<double> sigmas{0.0, 0.1, 0.2, 0.3};
  bool write_trial_logs = true;
};

int cmd_sweep(const SweepArgs& args);

int cmd_inspect_weights(const std::string& path);

}  // namespace circumnav
