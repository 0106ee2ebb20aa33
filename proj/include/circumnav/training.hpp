#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "circumnav/estimator.hpp"
#include "circumnav/evaluation.hpp"
#include "circumnav/lstm.hpp"
#include "circumnav/scenario.hpp"

namespace circumnav {

// Switching threshold s = -(2/I) i + 1; ground truth is consumed with
// probability clamp(s, 0, 1) at iteration i.
inline double switching_threshold(long i, long total_iterations) {
  return 1.0 - 2.0 * static_cast<double>(i) / static_cast<double>(total_iterations);
}

// Distribution over trajectory families and their parameter ranges used
// during data collection. Evaluation grid points are excluded so the test
// parameters stay out of the training set.
struct TrajectoryMix {
  double weight_constant = 1.0;
  double weight_circle = 1.0;
  double weight_nonholonomic = 1.0;

  double const_v_min = 1.0;
  double const_v_max = 15.0;
  double const_v_exclusion = 0.05;  // half-width around the 15 test speeds

  double circle_r_min = 10.0;
  double circle_r_max = 30.0;
  double circle_omega_min = 0.05;
  double circle_omega_max = 0.4;
  double circle_omega_exclusion = 0.005;  // applies when r falls near the test radius

  NonholonomicBounds bounds;
  long resample_period = 75;

  // Agent starting ring, randomized per episode.
  double agent_radius_min = 10.0;
  double agent_radius_max = 20.0;
};

Scenario draw_scenario(const TrajectoryMix& mix, Rng& rng);

struct TrainingConfig {
  long iterations = 50;  // I; the loop visits i = 0..I inclusive
  long samples_per_iteration = 100000;
  long epochs = 30;
  long batch_size = 64;
  double lr = 0.001;
  long hidden = 512;
  ControllerGains gains;  // gains.window is the horizon l
  long window_extra = 0;  // 1 reproduces the l+1 window reading
  double noise_sigma = 0.0;
  std::uint64_t master_seed = 1;
  TrajectoryMix mix;
  long episode_steps = 1000;
  double abort_radius = 500.0;
  double input_vel_scale = 1.0;
  double target_scale = 1.0;
  double grad_clip = 5.0;
  int workers = 1;

  long model_window() const { return gains.window + window_extra; }
};

// One supervised pair: the scaled input window and the physical ground
// truth [d, v_T] at the window's final step.
struct Sample {
  std::vector<Vec4> inputs;
  Vec4 target;
};

struct CollectionStats {
  long iteration = 0;
  double gt_fraction = 0.0;  // decisions where the controller consumed ground truth
  long decisions = 0;
  long episodes = 0;
  long divergent_retries = 0;
  double mean_episode_control_error = 0.0;
};

struct Dataset {
  std::vector<Sample> samples;
  CollectionStats stats;
};

// Closed-loop scheduled-sampling collection for iteration i: per decision
// the controller consumes ground truth when r < s, the model estimate
// otherwise; the stored sample target is ground truth either way.
Dataset collect_iteration_dataset(const TrainingConfig& cfg, const LstmModel& model, long i);

struct EpochRow {
  long iteration = 0;
  long epoch = 0;
  double mean_loss = 0.0;
  double gt_fraction = 0.0;
  double wallclock_s = 0.0;
};

// Epochs of shuffled minibatch Adam on the dataset. Gradient reduction uses
// fixed-size chunks so results do not depend on the worker count. Returns
// the updated parameters.
LstmParams train_iteration(const LstmParams& params, const std::vector<Sample>& dataset,
                           const TrainingConfig& cfg, long iteration,
                           std::vector<EpochRow>* rows);

struct TrainingResult {
  LstmModel model;
  std::vector<EpochRow> report;
  std::vector<CollectionStats> iterations;
};

// Full pipeline: alternate collection and supervised training for
// i = 0..I. checkpoint_cb (optional) runs after each iteration.
TrainingResult run_training(const TrainingConfig& cfg,
                            const std::function<void(long, const LstmModel&)>& checkpoint_cb = {});

void write_training_report_csv(const std::string& path, const std::vector<EpochRow>& rows,
                               bool include_wallclock = true);

}  // namespace circumnav
