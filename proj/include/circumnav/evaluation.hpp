#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "circumnav/estimator.hpp"
#include "circumnav/scenario.hpp"
#include "circumnav/sensing.hpp"

namespace circumnav {

// Orbit-radius deviation and target-position error.
inline double control_error(Vec2 d, double d_star) { return std::abs(d.norm() - d_star); }

inline double estimation_error(Vec2 p_target, Vec2 p_target_estimate) {
  return (p_target - p_target_estimate).norm();
}

struct TrialConfig {
  Scenario scenario;
  ControllerGains gains;
  long steps = 1000;
  double dt = 0.02;
  // Observations kept in the rolling buffer; 0 means gains.window. Set
  // larger when the estimator consumes more than the gate length.
  long window_capacity = 0;
  NoiseModel noise;
  Vec2 agent_start{15.0, 0.0};
  Vec2 initial_target_estimate{5.0, 0.0};
  double abort_radius = 500.0;  // [m] range beyond which the trial counts as diverged
  std::uint64_t traj_seed = 1;
  std::uint64_t noise_seed = 2;
};

struct TrialStep {
  double t = 0.0;
  Vec2 p_target, p_agent, v_target, u, bearing, d_hat, v_hat;
  double control_error = 0.0;
  double estimation_error = 0.0;
};

struct TrialLog {
  std::vector<TrialStep> steps;
  bool diverged = false;
  long first_divergence_step = -1;
};

// Closed loop at the configured rate: observe, estimate (once the window is
// full), control, step the agent, step the target. Before the gate opens the
// estimation error is logged against the constant initial target estimate.
TrialLog run_trial(const TrialConfig& cfg, Estimator& estimator);

struct AggregateErrors {
  double mean_control = 0.0;
  double mean_estimation = 0.0;
};

// Means over the final `window_seconds` of the trial; window_seconds <= 0
// averages the whole trial. Throws TrialTooShort if the trial has fewer
// samples than the window.
AggregateErrors aggregate(const TrialLog& log, double window_seconds, double dt);

struct TrialSummary {
  long index = 0;
  std::string family;
  double param = 0.0;        // swept parameter (v, omega, or seed index)
  double speed_ratio = 0.0;  // max |v_T| / k_t
  double mean_control = 0.0;
  double mean_estimation = 0.0;
  bool diverged = false;
};

struct SweepResult {
  std::string name;
  std::vector<TrialSummary> trials;
  long diverged_count = 0;
  // Aggregates over non-diverged trials (sample standard deviation).
  double mean_control = 0.0, std_control = 0.0;
  double mean_estimation = 0.0, std_estimation = 0.0;
};

struct SweepOptions {
  ControllerGains gains;
  NoiseModel noise;
  double dt = 0.02;
  long window_capacity = 0;  // see TrialConfig
  std::uint64_t master_seed = 1;
  int workers = 1;
  long nonholonomic_trials = 1000;
  // Aggregation window in seconds; <= 0 means the whole trial. Sweeps that
  // do not set an explicit value use their published defaults.
  double settle_override = -2.0;  // -2: use per-sweep default
  Vec2 agent_start{15.0, 0.0};
  Vec2 initial_target_estimate{5.0, 0.0};
  double abort_radius = 500.0;
  // Called per trial (from worker threads) with the full log, e.g. to write
  // per-trial CSVs. Indexed deterministically.
  std::function<void(long, const TrialConfig&, const TrialLog&)> trial_sink;
};

// 15 trials, v evenly spaced over [1, 15] m/s, 1000 steps each.
SweepResult sweep_constant_velocity(Estimator& estimator, const SweepOptions& opt);

// 15 trials, r = 20 m, omega evenly spaced over [0.05, 0.4] rad/s, 750 steps.
SweepResult sweep_circle(Estimator& estimator, const SweepOptions& opt);

// n random double-integrator trials of 1000 steps.
SweepResult sweep_nonholonomic(Estimator& estimator, const SweepOptions& opt);

// Per-sigma runs over identical target trajectories; 500 trials x 500 steps
// of the double-integrator family per sigma. estimators[k] is evaluated with
// noise sigmas[k] applied to its observations.
std::vector<SweepResult> sweep_noise(const std::vector<double>& sigmas,
                                     const std::vector<Estimator*>& estimators,
                                     const SweepOptions& opt);

// Fast-target study: constant velocity 1..24 m/s, circle omega 0.1..1.2
// rad/s, fixed-speed nonholonomic 1..20 m/s; 15 trials x 500 steps per
// family, keyed by speed ratio max|v_T|/k_t.
SweepResult sweep_fast_target(Estimator& estimator, const SweepOptions& opt);

void write_trial_csv(const std::string& path, const TrialLog& log);
void write_sweep_summary_csv(const std::string& path, const SweepResult& result);
void write_sweep_aggregate_csv(const std::string& path, const SweepResult& result);

}  // namespace circumnav
