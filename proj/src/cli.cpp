#include "circumnav/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "circumnav/csv.hpp"
#include "circumnav/evaluation.hpp"
#include "circumnav/profiles.hpp"
#include "circumnav/training.hpp"

namespace fs = std::filesystem;

namespace circumnav {

namespace {

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out << text;
  if (!out.good()) throw IoError("write failed: " + path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  std::size_t eq = assignment.find('=');
  std::size_t dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
  }
  std::string text = "[" + assignment.substr(0, dot) + "]\n" +
                     assignment.substr(dot + 1, eq - dot - 1) + " = " +
                     assignment.substr(eq + 1) + "\n";
  cfg = parse_config_text(text, cfg);
}

}  // namespace

RunConfig build_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.preset.empty()) apply_preset(cfg, args.preset);
  if (!args.config_path.empty()) cfg = load_config_file(args.config_path, cfg);
  for (const std::string& o : args.overrides) apply_override(cfg, o);
  if (args.seed) cfg.seed = *args.seed;
  if (args.workers) cfg.workers = *args.workers;
  if (args.noise_sigma) cfg.noise_sigma = *args.noise_sigma;
  return cfg;
}

std::string resolve_out_dir(const std::string& explicit_dir, const std::string& command) {
  fs::path dir;
  if (!explicit_dir.empty()) {
    dir = explicit_dir;
  } else {
    const char* root = std::getenv("CIRCUMNAV_OUT_ROOT");
    fs::path base = root != nullptr ? fs::path(root) : fs::path("runs");
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", &tm);
    dir = base / (command + "-" + stamp);
    int n = 1;
    while (fs::exists(dir)) dir = base / (command + "-" + std::string(stamp) + "-" +
                                          std::to_string(n++));
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  return dir.string();
}

int cmd_train(const TrainArgs& args) {
  RunConfig cfg = build_config(args.common);
  if (args.iterations) cfg.iterations = *args.iterations;
  cfg.validate();

  std::string out = resolve_out_dir(args.common.out_dir, "train");
  write_text_file(out + "/resolved.cfg", serialize_config(cfg));

  TrainingConfig tc = cfg.training();
  TrainingResult result = run_training(tc, [&](long i, const LstmModel& model) {
    char name[64];
    std::snprintf(name, sizeof(name), "checkpoint_%03ld.weights", i);
    save_weights(model, out + "/" + name);
  });

  save_weights(result.model, out + "/weights.bin");
  write_training_report_csv(out + "/training.csv", result.report);

  std::ofstream iters(out + "/iterations.csv", std::ios::trunc);
  iters << "iteration,gt_fraction,decisions,episodes,divergent_retries,"
           "mean_episode_control_error\n";
  for (const CollectionStats& st : result.iterations) {
    iters << st.iteration << ',' << format_double(st.gt_fraction) << ',' << st.decisions << ','
          << st.episodes << ',' << st.divergent_retries << ','
          << format_double(st.mean_episode_control_error) << '\n';
  }
  iters.close();

  std::cout << "trained " << (cfg.iterations + 1) << " iterations; weights at " << out
            << "/weights.bin\n";
  return 0;
}

namespace {

struct EstimatorChoice {
  std::unique_ptr<Estimator> estimator;
  std::optional<LstmModel> model;
};

EstimatorChoice pick_estimator(const std::string& weights_path, bool oracle, bool hold) {
  int picked = static_cast<int>(!weights_path.empty()) + static_cast<int>(oracle) +
               static_cast<int>(hold);
  if (picked == 0) {
    throw ValidationError("pass --weights <file>, --oracle, or --hold-initial");
  }
  if (picked > 1) throw ValidationError("--weights, --oracle and --hold-initial are exclusive");

  EstimatorChoice out;
  if (oracle) {
    out.estimator = std::make_unique<OracleEstimator>();
  } else if (hold) {
    out.estimator = std::make_unique<HoldInitialEstimator>();
  } else {
    out.model = load_weights(weights_path);
    out.estimator = std::make_unique<LstmEstimator>(*out.model);
  }
  return out;
}

// When a trained model drives the run, the gate and buffer sizes come from
// the weight file so a desk-scale model "just works" without config edits.
void sync_window_with_model(RunConfig& cfg, const std::optional<LstmModel>& model,
                            long* window_capacity) {
  *window_capacity = 0;
  if (!model) return;
  long gate = model->window - (cfg.window_plus_one ? 1 : 0);
  if (gate < 1) throw ValidationError("model window too short for window_plus_one mode");
  cfg.window = gate;
  cfg.hidden = static_cast<long>(model->params.hidden);
  cfg.input_vel_scale = model->input_vel_scale;
  cfg.target_scale = model->target_scale;
  *window_capacity = model->window;
}

}  // namespace

int cmd_simulate(const SimulateArgs& args) {
  std::string scenario_text = args.scenario;
  CommonArgs common = args.common;
  if (scenario_text.rfind("fast:", 0) == 0) {
    if (common.preset.empty()) common.preset = "fast";
    scenario_text = scenario_text.substr(5);
  }

  RunConfig cfg = build_config(common);
  EstimatorChoice choice =
      pick_estimator(args.weights_path, args.use_oracle, args.use_hold_initial);
  long window_capacity = 0;
  sync_window_with_model(cfg, choice.model, &window_capacity);
  if (args.steps) cfg.steps = *args.steps;
  cfg.validate();

  TrialConfig trial;
  trial.scenario = parse_scenario(scenario_text);
  trial.gains = cfg.gains();
  trial.steps = cfg.steps;
  trial.dt = cfg.dt();
  trial.window_capacity = window_capacity;
  trial.noise = cfg.noise();
  trial.agent_start = cfg.agent_start;
  trial.initial_target_estimate = cfg.initial_target_estimate;
  trial.abort_radius = cfg.abort_radius;
  trial.traj_seed = Rng::derive(cfg.seed, 0x7472616a);
  trial.noise_seed = Rng::derive(cfg.seed, 0x6e6f6973);

  std::string out = resolve_out_dir(common.out_dir, "simulate");
  write_text_file(out + "/resolved.cfg", serialize_config(cfg));

  TrialLog log = run_trial(trial, *choice.estimator);
  write_trial_csv(out + "/trial.csv", log);

  double settle = cfg.settle_override > -1.5 ? cfg.settle_override : 5.0;
  if (settle > static_cast<double>(cfg.steps) * trial.dt) settle = -1.0;  // whole trial
  AggregateErrors errs = aggregate(log, settle, trial.dt);
  std::cout << "scenario " << scenario_text << " (" << choice.estimator->name() << "): "
            << log.steps.size() << " steps, mean control error "
            << format_double(errs.mean_control) << " m, mean estimation error "
            << format_double(errs.mean_estimation) << " m"
            << (log.diverged ? ", DIVERGED" : "") << "\n";
  return log.diverged ? 3 : 0;
}

namespace {

void write_sweep_outputs(const std::string& dir, const SweepResult& result) {
  write_sweep_summary_csv(dir + "/summary.csv", result);
  write_sweep_aggregate_csv(dir + "/aggregate.csv", result);
}

SweepOptions sweep_options(const RunConfig& cfg, const std::string& out_dir,
                           bool write_trial_logs, long window_capacity) {
  SweepOptions opt;
  opt.gains = cfg.gains();
  opt.noise = cfg.noise();
  opt.dt = cfg.dt();
  opt.window_capacity = window_capacity;
  opt.master_seed = cfg.seed;
  opt.workers = cfg.effective_workers();
  opt.nonholonomic_trials = cfg.nonholonomic_trials;
  opt.settle_override = cfg.settle_override;
  opt.agent_start = cfg.agent_start;
  opt.initial_target_estimate = cfg.initial_target_estimate;
  opt.abort_radius = cfg.abort_radius;
  if (write_trial_logs) {
    opt.trial_sink = [out_dir](long idx, const TrialConfig&, const TrialLog& log) {
      char name[64];
      std::snprintf(name, sizeof(name), "trial_%04ld.csv", idx);
      write_trial_csv(out_dir + "/" + name, log);
    };
  }
  return opt;
}

std::string sigma_dir_name(double sigma) { return "sigma_" + format_double(sigma); }

std::string pattern_path(const std::string& pattern, double sigma) {
  const std::string token = "{sigma}";
  std::size_t pos = pattern.find(token);
  if (pos == std::string::npos) {
    throw ValidationError("--weights-pattern must contain {sigma}");
  }
  std::string path = pattern;
  path.replace(pos, token.size(), format_double(sigma));
  return path;
}

}  // namespace

int cmd_sweep(const SweepArgs& args) {
  CommonArgs common = args.common;
  if (args.name == "fast" && common.preset.empty()) common.preset = "fast";

  RunConfig cfg = build_config(common);
  std::string out = resolve_out_dir(common.out_dir, "sweep-" + args.name);

  if (args.name == "noise") {
    if (args.weights_pattern.empty()) {
      throw MissingModel("noise sweep needs --weights-pattern with {sigma}; required sigmas: " +
                         [&] {
                           std::string s;
                           for (double v : args.sigmas) s += format_double(v) + " ";
                           return s;
                         }());
    }
    std::string missing;
    for (double sigma : args.sigmas) {
      std::string path = pattern_path(args.weights_pattern, sigma);
      if (!fs::exists(path)) missing += format_double(sigma) + " (" + path + ") ";
    }
    if (!missing.empty()) {
      throw MissingModel("no weight file for sigma " + missing);
    }

    std::vector<LstmModel> models;
    std::vector<std::unique_ptr<LstmEstimator>> owners;
    std::vector<Estimator*> estimators;
    long window_capacity = 0;
    for (double sigma : args.sigmas) {
      models.push_back(load_weights(pattern_path(args.weights_pattern, sigma)));
      std::optional<LstmModel> m = models.back();
      sync_window_with_model(cfg, m, &window_capacity);
      owners.push_back(std::make_unique<LstmEstimator>(models.back()));
      estimators.push_back(owners.back().get());
    }
    cfg.validate();
    write_text_file(out + "/resolved.cfg", serialize_config(cfg));

    bool any_diverged = false;
    std::vector<SweepResult> results;
    for (std::size_t k = 0; k < args.sigmas.size(); ++k) {
      std::string sub = out + "/" + sigma_dir_name(args.sigmas[k]);
      fs::create_directories(sub);
      RunConfig sweep_cfg = cfg;
      sweep_cfg.noise_sigma = args.sigmas[k];
      SweepOptions opt = sweep_options(sweep_cfg, sub, args.write_trial_logs, window_capacity);
      std::vector<double> one_sigma{args.sigmas[k]};
      std::vector<Estimator*> one_est{estimators[k]};
      SweepResult res = sweep_noise(one_sigma, one_est, opt).front();
      write_sweep_outputs(sub, res);
      any_diverged = any_diverged || res.diverged_count > 0;
      results.push_back(std::move(res));
    }

    std::ofstream agg(out + "/aggregate.csv", std::ios::trunc);
    agg << "sweep,trials,diverged,mean_control_error,std_control_error,"
           "mean_estimation_error,std_estimation_error\n";
    for (const SweepResult& r : results) {
      agg << r.name << ',' << r.trials.size() << ',' << r.diverged_count << ','
          << format_double(r.mean_control) << ',' << format_double(r.std_control) << ','
          << format_double(r.mean_estimation) << ',' << format_double(r.std_estimation) << '\n';
      std::cout << r.name << ": control " << format_double(r.mean_control) << " +- "
                << format_double(r.std_control) << " m, estimation "
                << format_double(r.mean_estimation) << " +- " << format_double(r.std_estimation)
                << " m, diverged " << r.diverged_count << "\n";
    }
    return any_diverged ? 3 : 0;
  }

  EstimatorChoice choice =
      pick_estimator(args.weights_path, args.use_oracle, args.use_hold_initial);
  long window_capacity = 0;
  sync_window_with_model(cfg, choice.model, &window_capacity);
  if (args.trials) cfg.nonholonomic_trials = *args.trials;
  cfg.validate();
  write_text_file(out + "/resolved.cfg", serialize_config(cfg));

  SweepOptions opt = sweep_options(cfg, out, args.write_trial_logs, window_capacity);

  SweepResult result;
  if (args.name == "constant-velocity") {
    result = sweep_constant_velocity(*choice.estimator, opt);
  } else if (args.name == "circle") {
    result = sweep_circle(*choice.estimator, opt);
  } else if (args.name == "nonholonomic") {
    result = sweep_nonholonomic(*choice.estimator, opt);
  } else if (args.name == "fast") {
    result = sweep_fast_target(*choice.estimator, opt);
  } else {
    throw ValidationError("unknown sweep '" + args.name +
                          "' (constant-velocity, circle, nonholonomic, noise, fast)");
  }

  write_sweep_outputs(out, result);
  std::cout << result.name << ": " << result.trials.size() << " trials, control "
            << format_double(result.mean_control) << " +- " << format_double(result.std_control)
            << " m, estimation " << format_double(result.mean_estimation) << " +- "
            << format_double(result.std_estimation) << " m, diverged " << result.diverged_count
            << "\n";
  return result.diverged_count > 0 ? 3 : 0;
}

int cmd_inspect_weights(const std::string& path) {
  WeightFileInfo info = inspect_weights(path);
  std::cout << "version " << info.version << "\nhidden " << info.hidden << "\nwindow "
            << info.window << "\ninput_vel_scale " << format_double(info.input_vel_scale)
            << "\ntarget_scale " << format_double(info.target_scale) << "\nparameters "
            << info.parameter_count << "\nchecksum " << std::hex << info.checksum << std::dec
            << "\n";
  return 0;
}

}  // namespace circumnav
