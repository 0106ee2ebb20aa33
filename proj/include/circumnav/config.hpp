#pragma once

#include <cstdint>
#include <string>

#include "circumnav/training.hpp"

namespace circumnav {

// Full run configuration. Defaults equal the "paper" profile; presets bundle
// coherent overrides ("desk" shrinks everything to laptop scale and turns on
// input/output scaling). Serialized as flat key = value lines grouped into
// [section] headers; unknown keys are rejected.
struct RunConfig {
  std::string preset = "paper";

  // [controller]
  double k_t = 60.0;
  double k_r = 10.0;
  double d_star = 10.0;
  long window = 60;
  double u_max = 0.0;  // command saturation; 0 = unlimited

  // [sim]
  double frequency = 50.0;
  double abort_radius = 500.0;
  long steps = 1000;

  // [agent]
  Vec2 agent_start{15.0, 0.0};
  Vec2 initial_target_estimate{5.0, 0.0};

  // [model]
  long hidden = 512;
  double input_vel_scale = 1.0;
  double target_scale = 1.0;
  bool window_plus_one = false;

  // [noise]
  double noise_sigma = 0.0;
  bool renormalize_bearing = true;

  // [training]
  long iterations = 50;
  long samples_per_iteration = 100000;
  long epochs = 30;
  long batch_size = 64;
  double lr = 0.001;
  long episode_steps = 1000;
  double grad_clip = 5.0;

  // [trajectory]
  TrajectoryMix mix;

  // [run]
  std::uint64_t seed = 1;
  int workers = 0;  // 0: logical cores
  long nonholonomic_trials = 1000;
  double settle_override = -2.0;

  double dt() const { return 1.0 / frequency; }
  ControllerGains gains() const { return {k_t, k_r, d_star, window, u_max}; }
  NoiseModel noise() const { return {noise_sigma, renormalize_bearing}; }
  TrainingConfig training() const;
  int effective_workers() const;

  void validate() const;
};

// Apply a named preset's bundled overrides.
void apply_preset(RunConfig& cfg, const std::string& name);

// Parse/emit the flat key-value format. Parsing starts from the given base
// config (so file values override preset values, and CLI flags override
// both).
RunConfig parse_config_text(const std::string& text, RunConfig base);
RunConfig load_config_file(const std::string& path, RunConfig base);
std::string serialize_config(const RunConfig& cfg);

}  // namespace circumnav
