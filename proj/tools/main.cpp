#include <iostream>

#include <CLI11.hpp>

#include "circumnav/cli.hpp"
#include "circumnav/errors.hpp"

namespace {

struct CommonBuf {
  std::uint64_t seed = 0;
  int workers = 0;
  double sigma = 0.0;
};

void add_common(CLI::App* cmd, circumnav::CommonArgs& common, CommonBuf& buf) {
  cmd->add_option("--config", common.config_path, "config file (flat key = value with sections)");
  cmd->add_option("--preset", common.preset, "preset: paper, desk, fast");
  cmd->add_option("--set", common.overrides, "override, e.g. --set training.epochs=3")
      ->take_all();
  cmd->add_option("--out", common.out_dir, "output directory (default: timestamped under runs/)");
  cmd->add_option("--seed", buf.seed, "master seed");
  cmd->add_option("--workers", buf.workers, "worker threads (default: logical cores)");
  cmd->add_option("--noise-sigma", buf.sigma, "observation noise standard deviation");
}

void finish_common(CLI::App* cmd, circumnav::CommonArgs& common, const CommonBuf& buf) {
  if (cmd->count("--seed") > 0) common.seed = buf.seed;
  if (cmd->count("--workers") > 0) common.workers = buf.workers;
  if (cmd->count("--noise-sigma") > 0) common.noise_sigma = buf.sigma;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bearing-only target circumnavigation: simulation, training, evaluation"};
  app.require_subcommand(1);

  circumnav::TrainArgs train;
  CommonBuf train_buf;
  long train_iterations = 0;
  CLI::App* train_cmd = app.add_subcommand("train", "run the full training pipeline");
  add_common(train_cmd, train.common, train_buf);
  train_cmd->add_option("--iterations", train_iterations, "override iteration count I");

  circumnav::SimulateArgs sim;
  CommonBuf sim_buf;
  long sim_steps = 0;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run one closed-loop trial");
  add_common(sim_cmd, sim.common, sim_buf);
  sim_cmd->add_option("--scenario", sim.scenario,
                      "constant:<v>, circle:<omega>[:<r>], nonholonomic, fixed:<speed>; "
                      "prefix fast: applies the fast profile");
  sim_cmd->add_option("--weights", sim.weights_path, "trained estimator weights");
  sim_cmd->add_flag("--oracle", sim.use_oracle, "use the ground-truth oracle estimator");
  sim_cmd->add_flag("--hold-initial", sim.use_hold_initial,
                    "use the hold-initial-guess baseline estimator");
  sim_cmd->add_option("--steps", sim_steps, "trial length in steps");

  circumnav::SweepArgs sweep;
  CommonBuf sweep_buf;
  long sweep_trials = 0;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run an experiment sweep");
  sweep_cmd->add_option("name", sweep.name,
                        "constant-velocity, circle, nonholonomic, noise, fast")
      ->required();
  add_common(sweep_cmd, sweep.common, sweep_buf);
  sweep_cmd->add_option("--weights", sweep.weights_path, "trained estimator weights");
  sweep_cmd->add_flag("--oracle", sweep.use_oracle, "use the ground-truth oracle estimator");
  sweep_cmd->add_flag("--hold-initial", sweep.use_hold_initial,
                      "use the hold-initial-guess baseline estimator");
  sweep_cmd->add_option("--trials", sweep_trials, "trial count for the nonholonomic sweep");
  sweep_cmd->add_option("--weights-pattern", sweep.weights_pattern,
                        "noise sweep weights path containing {sigma}");
  sweep_cmd->add_option("--sigmas", sweep.sigmas, "noise sweep sigma set")->delimiter(',');
  sweep_cmd->add_flag("!--no-trial-logs", sweep.write_trial_logs, "skip per-trial CSV logs");

  std::string inspect_path;
  CLI::App* inspect_cmd = app.add_subcommand("inspect-weights", "print a weight file header");
  inspect_cmd->add_option("path", inspect_path, "weight file")->required();

  try {
    app.parse(argc, argv);
    finish_common(train_cmd, train.common, train_buf);
    finish_common(sim_cmd, sim.common, sim_buf);
    finish_common(sweep_cmd, sweep.common, sweep_buf);
    if (train_cmd->count("--iterations") > 0) train.iterations = train_iterations;
    if (sim_cmd->count("--steps") > 0) sim.steps = sim_steps;
    if (sweep_cmd->count("--trials") > 0) sweep.trials = sweep_trials;

    if (*train_cmd) return circumnav::cmd_train(train);
    if (*sim_cmd) return circumnav::cmd_simulate(sim);
    if (*sweep_cmd) return circumnav::cmd_sweep(sweep);
    if (*inspect_cmd) return circumnav::cmd_inspect_weights(inspect_path);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const circumnav::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const circumnav::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
