#include "circumnav/evaluation.hpp"

#include <cmath>
#include <fstream>

#include "circumnav/csv.hpp"
#include "circumnav/parallel.hpp"

namespace circumnav {

namespace {

// Stream tags for deriving independent per-trial RNG streams. Trajectory
// and noise use separate streams so noise sweeps see identical target
// trajectories at every sigma.
constexpr std::uint64_t kTrajStream = 0x7472616a;   // "traj"
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;  // "nois"

Bearing control_bearing_from(const Observation& obs) {
  double norm = obs.bearing.norm();
  if (norm < kZeroRangeThreshold) throw DegenerateBearing();
  return Bearing{obs.bearing * (1.0 / norm)};
}

}  // namespace

TrialLog run_trial(const TrialConfig& cfg, Estimator& estimator) {
  if (cfg.steps <= 0) throw ValidationError("trial needs at least one step");
  if (cfg.gains.window < 1) throw ValidationError("window must be >= 1");

  TargetRunner target(cfg.scenario, cfg.dt, cfg.traj_seed);
  Rng noise_rng(cfg.noise_seed);
  AgentState agent{cfg.agent_start, {0.0, 0.0}};
  long capacity = cfg.window_capacity > 0 ? cfg.window_capacity : cfg.gains.window;
  ObservationWindow window(static_cast<std::size_t>(capacity));
  SimClock clock{0, cfg.dt};

  TrialLog log;
  log.steps.reserve(static_cast<std::size_t>(cfg.steps));

  for (; clock.step_index < cfg.steps; ++clock.step_index) {
    long k = clock.step_index;
    Vec2 p_target = target.pos();
    Vec2 v_target = target.vel();
    Vec2 d = displacement(p_target, agent.pos);

    Observation obs = observe(p_target, agent, cfg.noise, noise_rng);
    window.push(obs);
    Bearing bearing = control_bearing_from(obs);

    std::optional<TargetEstimate> estimate;
    Vec2 p_target_estimate;
    if (k >= cfg.gains.window) {
      EstimateContext ctx{window, d, v_target, agent.pos, cfg.initial_target_estimate};
      estimate = estimator.estimate(ctx);
      p_target_estimate = agent.pos + estimate->d_hat;
    } else {
      // Pre-gate: the initial target guess is held constant.
      p_target_estimate = cfg.initial_target_estimate;
    }

    Vec2 u = control(k, bearing, estimate, cfg.gains);

    TrialStep row;
    row.t = clock.time();
    row.p_target = p_target;
    row.p_agent = agent.pos;
    row.v_target = v_target;
    row.u = u;
    row.bearing = obs.bearing;
    row.d_hat = estimate ? estimate->d_hat : p_target_estimate - agent.pos;
    row.v_hat = estimate ? estimate->v_hat : Vec2{0.0, 0.0};
    row.control_error = control_error(d, cfg.gains.d_star);
    row.estimation_error = estimation_error(p_target, p_target_estimate);
    log.steps.push_back(row);

    if (!log.diverged && d.norm() > cfg.abort_radius) {
      log.diverged = true;
      log.first_divergence_step = k;
    }

    agent = agent_step(agent, u, cfg.dt);
    target.advance();
  }
  return log;
}

AggregateErrors aggregate(const TrialLog& log, double window_seconds, double dt) {
  std::size_t n = log.steps.size();
  std::size_t count = n;
  if (window_seconds > 0.0) {
    count = static_cast<std::size_t>(std::llround(window_seconds / dt));
    if (count > n) throw TrialTooShort();
  }
  if (count == 0) throw TrialTooShort();

  AggregateErrors out;
  for (std::size_t k = n - count; k < n; ++k) {
    out.mean_control += log.steps[k].control_error;
    out.mean_estimation += log.steps[k].estimation_error;
  }
  out.mean_control /= static_cast<double>(count);
  out.mean_estimation /= static_cast<double>(count);
  return out;
}

namespace {

struct PlannedTrial {
  TrialConfig cfg;
  std::string family;
  double param = 0.0;
  double ratio_hint = -1.0;  // < 0: derive from the log's peak target speed
  double settle_seconds = -1.0;
};

SweepResult run_planned(const std::string& name, const std::vector<PlannedTrial>& plan,
                        Estimator& estimator, const SweepOptions& opt) {
  SweepResult result;
  result.name = name;
  result.trials.resize(plan.size());

  parallel_for(plan.size(), opt.workers, [&](std::size_t idx) {
    const PlannedTrial& pt = plan[idx];
    TrialLog log = run_trial(pt.cfg, estimator);

    double settle =
        opt.settle_override > -1.5 ? opt.settle_override : pt.settle_seconds;
    AggregateErrors errs = aggregate(log, settle, pt.cfg.dt);

    double ratio = pt.ratio_hint;
    if (ratio < 0.0) {
      double peak = 0.0;
      for (const TrialStep& s : log.steps) peak = std::max(peak, s.v_target.norm());
      ratio = peak / pt.cfg.gains.k_t;
    }

    TrialSummary& sum = result.trials[idx];
    sum.index = static_cast<long>(idx);
    sum.family = pt.family;
    sum.param = pt.param;
    sum.speed_ratio = ratio;
    sum.mean_control = errs.mean_control;
    sum.mean_estimation = errs.mean_estimation;
    sum.diverged = log.diverged;

    if (opt.trial_sink) opt.trial_sink(static_cast<long>(idx), pt.cfg, log);
  });

  // Aggregate over non-diverged trials, accumulated in index order.
  double sc = 0.0, se = 0.0;
  long n = 0;
  for (const TrialSummary& t : result.trials) {
    if (t.diverged) {
      ++result.diverged_count;
      continue;
    }
    sc += t.mean_control;
    se += t.mean_estimation;
    ++n;
  }
  if (n > 0) {
    result.mean_control = sc / static_cast<double>(n);
    result.mean_estimation = se / static_cast<double>(n);
    double vc = 0.0, ve = 0.0;
    for (const TrialSummary& t : result.trials) {
      if (t.diverged) continue;
      vc += (t.mean_control - result.mean_control) * (t.mean_control - result.mean_control);
      ve += (t.mean_estimation - result.mean_estimation) *
            (t.mean_estimation - result.mean_estimation);
    }
    if (n > 1) {
      result.std_control = std::sqrt(vc / static_cast<double>(n - 1));
      result.std_estimation = std::sqrt(ve / static_cast<double>(n - 1));
    }
  }
  return result;
}

TrialConfig base_trial(const SweepOptions& opt, std::uint64_t trial_index) {
  TrialConfig cfg;
  cfg.gains = opt.gains;
  cfg.dt = opt.dt;
  cfg.window_capacity = opt.window_capacity;
  cfg.noise = opt.noise;
  cfg.agent_start = opt.agent_start;
  cfg.initial_target_estimate = opt.initial_target_estimate;
  cfg.abort_radius = opt.abort_radius;
  cfg.traj_seed = Rng::derive(opt.master_seed, trial_index, kTrajStream);
  cfg.noise_seed = Rng::derive(opt.master_seed, trial_index, kNoiseStream);
  return cfg;
}

double spaced(double lo, double hi, long i, long n) {
  if (n == 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

SweepResult sweep_constant_velocity(Estimator& estimator, const SweepOptions& opt) {
  std::vector<PlannedTrial> plan;
  for (long i = 0; i < 15; ++i) {
    PlannedTrial pt;
    pt.cfg = base_trial(opt, static_cast<std::uint64_t>(i));
    pt.cfg.scenario.family = Scenario::Family::kConstant;
    pt.cfg.scenario.v = spaced(1.0, 15.0, i, 15);
    pt.cfg.steps = 1000;
    pt.family = "constant";
    pt.param = pt.cfg.scenario.v;
    pt.ratio_hint = pt.cfg.scenario.v / opt.gains.k_t;
    pt.settle_seconds = 5.0;
    plan.push_back(pt);
  }
  return run_planned("constant-velocity", plan, estimator, opt);
}

SweepResult sweep_circle(Estimator& estimator, const SweepOptions& opt) {
  std::vector<PlannedTrial> plan;
  for (long i = 0; i < 15; ++i) {
    PlannedTrial pt;
    pt.cfg = base_trial(opt, static_cast<std::uint64_t>(i));
    pt.cfg.scenario.family = Scenario::Family::kCircle;
    pt.cfg.scenario.r = 20.0;
    pt.cfg.scenario.omega = spaced(0.05, 0.4, i, 15);
    pt.cfg.steps = 750;
    pt.family = "circle";
    pt.param = pt.cfg.scenario.omega;
    pt.ratio_hint = pt.cfg.scenario.r * pt.cfg.scenario.omega / opt.gains.k_t;
    pt.settle_seconds = 5.0;
    plan.push_back(pt);
  }
  return run_planned("circle", plan, estimator, opt);
}

SweepResult sweep_nonholonomic(Estimator& estimator, const SweepOptions& opt) {
  std::vector<PlannedTrial> plan;
  for (long i = 0; i < opt.nonholonomic_trials; ++i) {
    PlannedTrial pt;
    pt.cfg = base_trial(opt, static_cast<std::uint64_t>(i));
    pt.cfg.scenario.family = Scenario::Family::kNonholonomic;
    pt.cfg.steps = 1000;
    pt.family = "nonholonomic";
    pt.param = static_cast<double>(i);
    pt.settle_seconds = -1.0;  // full-trial mean
    plan.push_back(pt);
  }
  return run_planned("nonholonomic", plan, estimator, opt);
}

std::vector<SweepResult> sweep_noise(const std::vector<double>& sigmas,
                                     const std::vector<Estimator*>& estimators,
                                     const SweepOptions& opt) {
  if (sigmas.size() != estimators.size()) {
    throw ValidationError("sweep_noise needs one estimator per sigma");
  }
  std::vector<SweepResult> results;
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    std::vector<PlannedTrial> plan;
    for (long i = 0; i < 500; ++i) {
      PlannedTrial pt;
      // Identical trajectory and noise-draw streams across sigmas; only the
      // noise magnitude differs per model.
      pt.cfg = base_trial(opt, static_cast<std::uint64_t>(i));
      pt.cfg.noise.sigma = sigmas[s];
      pt.cfg.scenario.family = Scenario::Family::kNonholonomic;
      pt.cfg.steps = 500;
      pt.family = "nonholonomic";
      pt.param = static_cast<double>(i);
      pt.settle_seconds = -1.0;
      plan.push_back(pt);
    }
    char label[32];
    std::snprintf(label, sizeof(label), "noise-%g", sigmas[s]);
    results.push_back(run_planned(label, plan, *estimators[s], opt));
  }
  return results;
}

SweepResult sweep_fast_target(Estimator& estimator, const SweepOptions& opt) {
  std::vector<PlannedTrial> plan;
  std::uint64_t trial_index = 0;
  for (long i = 0; i < 15; ++i, ++trial_index) {
    PlannedTrial pt;
    pt.cfg = base_trial(opt, trial_index);
    pt.cfg.scenario.family = Scenario::Family::kConstant;
    pt.cfg.scenario.v = spaced(1.0, 24.0, i, 15);
    pt.cfg.steps = 500;
    pt.family = "constant";
    pt.param = pt.cfg.scenario.v;
    pt.ratio_hint = pt.cfg.scenario.v / opt.gains.k_t;
    pt.settle_seconds = 5.0;
    plan.push_back(pt);
  }
  for (long i = 0; i < 15; ++i, ++trial_index) {
    PlannedTrial pt;
    pt.cfg = base_trial(opt, trial_index);
    pt.cfg.scenario.family = Scenario::Family::kCircle;
    pt.cfg.scenario.r = 20.0;
    pt.cfg.scenario.omega = spaced(0.1, 1.2, i, 15);
    pt.cfg.steps = 500;
    pt.family = "circle";
    pt.param = pt.cfg.scenario.omega;
    pt.ratio_hint = pt.cfg.scenario.r * pt.cfg.scenario.omega / opt.gains.k_t;
    pt.settle_seconds = 5.0;
    plan.push_back(pt);
  }
  for (long i = 0; i < 15; ++i, ++trial_index) {
    PlannedTrial pt;
    pt.cfg = base_trial(opt, trial_index);
    pt.cfg.scenario.family = Scenario::Family::kFixedSpeedNonholonomic;
    pt.cfg.scenario.fixed_speed = spaced(1.0, 20.0, i, 15);
    pt.cfg.steps = 500;
    pt.family = "fixed-speed";
    pt.param = pt.cfg.scenario.fixed_speed;
    pt.ratio_hint = pt.cfg.scenario.fixed_speed / opt.gains.k_t;
    pt.settle_seconds = 5.0;
    plan.push_back(pt);
  }
  return run_planned("fast-target", plan, estimator, opt);
}

void write_trial_csv(const std::string& path, const TrialLog& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out << "t,p_T_x,p_T_y,p_A_x,p_A_y,v_T_x,v_T_y,u_x,u_y,phi_x,phi_y,"
         "d_hat_x,d_hat_y,v_hat_x,v_hat_y,control_error,estimation_error\n";
  for (const TrialStep& s : log.steps) {
    out << format_time(s.t) << ',' << format_double(s.p_target.x) << ','
        << format_double(s.p_target.y) << ',' << format_double(s.p_agent.x) << ','
        << format_double(s.p_agent.y) << ',' << format_double(s.v_target.x) << ','
        << format_double(s.v_target.y) << ',' << format_double(s.u.x) << ','
        << format_double(s.u.y) << ',' << format_double(s.bearing.x) << ','
        << format_double(s.bearing.y) << ',' << format_double(s.d_hat.x) << ','
        << format_double(s.d_hat.y) << ',' << format_double(s.v_hat.x) << ','
        << format_double(s.v_hat.y) << ',' << format_double(s.control_error) << ','
        << format_double(s.estimation_error) << '\n';
  }
  if (!out.good()) throw IoError("write failed: " + path);
}

void write_sweep_summary_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out << "trial,family,param,speed_ratio,mean_control_error,mean_estimation_error,diverged\n";
  for (const TrialSummary& t : result.trials) {
    out << t.index << ',' << t.family << ',' << format_double(t.param) << ','
        << format_double(t.speed_ratio) << ',' << format_double(t.mean_control) << ','
        << format_double(t.mean_estimation) << ',' << (t.diverged ? 1 : 0) << '\n';
  }
  if (!out.good()) throw IoError("write failed: " + path);
}

void write_sweep_aggregate_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out << "sweep,trials,diverged,mean_control_error,std_control_error,"
         "mean_estimation_error,std_estimation_error\n";
  out << result.name << ',' << result.trials.size() << ',' << result.diverged_count << ','
      << format_double(result.mean_control) << ',' << format_double(result.std_control) << ','
      << format_double(result.mean_estimation) << ',' << format_double(result.std_estimation)
      << '\n';
  if (!out.good()) throw IoError("write failed: " + path);
}

}  // namespace circumnav
