#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "circumnav/cli.hpp"
#include "circumnav/lstm.hpp"

using namespace circumnav;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "circumnav_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::string> micro_training_overrides() {
  return {
      "model.hidden=6",      "controller.window=8",   "training.iterations=1",
      "training.epochs=1",   "training.batch_size=16", "training.samples_per_iteration=120",
      "training.episode_steps=60",
  };
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("train rejects invalid configs before running") {
  TrainArgs args;
  args.common.out_dir = fresh_dir("train_invalid").string();
  args.iterations = 0;
  CHECK_THROWS_AS(cmd_train(args), ConfigError);
}

TEST_CASE("micro train produces loadable weights, checkpoints and reports") {
  TrainArgs args;
  args.common.out_dir = fresh_dir("train_micro").string();
  args.common.overrides = micro_training_overrides();
  args.common.seed = 5;
  args.common.workers = 2;
  CHECK(cmd_train(args) == 0);

  fs::path out(args.common.out_dir);
  LstmModel model = load_weights((out / "weights.bin").string());
  CHECK(model.params.hidden == 6);
  CHECK(model.window == 8);
  CHECK(fs::exists(out / "checkpoint_000.weights"));
  CHECK(fs::exists(out / "checkpoint_001.weights"));  // iterations 0..I inclusive
  CHECK(fs::exists(out / "training.csv"));
  CHECK(fs::exists(out / "iterations.csv"));

  // resolved config reparses and reproduces the run settings
  RunConfig cfg = load_config_file((out / "resolved.cfg").string(), RunConfig{});
  CHECK(cfg.hidden == 6);
  CHECK(cfg.seed == 5);
}

TEST_CASE("train twice with one seed: byte-identical weights, workers-independent") {
  TrainArgs a;
  a.common.out_dir = fresh_dir("train_det_a").string();
  a.common.overrides = micro_training_overrides();
  a.common.seed = 7;
  a.common.workers = 1;
  REQUIRE(cmd_train(a) == 0);

  TrainArgs b = a;
  b.common.out_dir = fresh_dir("train_det_b").string();
  b.common.workers = 4;
  REQUIRE(cmd_train(b) == 0);

  CHECK(slurp(fs::path(a.common.out_dir) / "weights.bin") ==
        slurp(fs::path(b.common.out_dir) / "weights.bin"));
  CHECK(slurp(fs::path(a.common.out_dir) / "iterations.csv") ==
        slurp(fs::path(b.common.out_dir) / "iterations.csv"));
}

TEST_CASE("simulate validations") {
  SimulateArgs args;
  args.common.out_dir = fresh_dir("sim_invalid").string();
  CHECK_THROWS_AS(cmd_simulate(args), ValidationError);  // no estimator picked

  args.use_oracle = true;
  args.scenario = "warp:9";
  CHECK_THROWS_AS(cmd_simulate(args), ValidationError);

  args.scenario = "constant:9";
  args.weights_path = "whatever.bin";  // both oracle and weights
  CHECK_THROWS_AS(cmd_simulate(args), ValidationError);
}

TEST_CASE("simulate with the oracle writes the trial CSV") {
  SimulateArgs args;
  args.common.out_dir = fresh_dir("sim_oracle").string();
  args.use_oracle = true;
  args.scenario = "constant:9";
  args.steps = 400;
  CHECK(cmd_simulate(args) == 0);

  std::string csv = slurp(fs::path(args.common.out_dir) / "trial.csv");
  CHECK(csv.rfind("t,p_T_x,p_T_y", 0) == 0);
  long rows = std::count(csv.begin(), csv.end(), '\n') - 1;
  CHECK(rows == 400);
}

TEST_CASE("simulate with trained weights syncs the window from the model") {
  TrainArgs train;
  train.common.out_dir = fresh_dir("sim_weights_train").string();
  train.common.overrides = micro_training_overrides();
  REQUIRE(cmd_train(train) == 0);

  SimulateArgs sim;
  sim.common.out_dir = fresh_dir("sim_weights_run").string();
  sim.weights_path = (fs::path(train.common.out_dir) / "weights.bin").string();
  sim.scenario = "circle:0.4";
  sim.steps = 300;
  int code = cmd_simulate(sim);
  CHECK((code == 0 || code == 3));  // a micro model may or may not hold the orbit

  RunConfig resolved =
      load_config_file((fs::path(sim.common.out_dir) / "resolved.cfg").string(), RunConfig{});
  CHECK(resolved.window == 8);
  CHECK(resolved.hidden == 6);
}

TEST_CASE("unknown sweep name and missing noise models") {
  SweepArgs args;
  args.common.out_dir = fresh_dir("sweep_invalid").string();
  args.use_oracle = true;
  args.name = "spiral";
  CHECK_THROWS_AS(cmd_sweep(args), ValidationError);

  SweepArgs noise;
  noise.common.out_dir = fresh_dir("sweep_noise_missing").string();
  noise.name = "noise";
  CHECK_THROWS_AS(cmd_sweep(noise), MissingModel);

  noise.weights_pattern = (fs::temp_directory_path() / "nope_{sigma}.bin").string();
  try {
    cmd_sweep(noise);
    FAIL("expected MissingModel");
  } catch (const MissingModel& e) {
    CHECK(std::string(e.what()).find("0.2") != std::string::npos);
  }
}

TEST_CASE("oracle sweep outputs are byte-identical across worker counts") {
  SweepArgs a;
  a.common.out_dir = fresh_dir("sweep_det_a").string();
  a.name = "constant-velocity";
  a.use_oracle = true;
  a.common.seed = 3;
  a.common.workers = 1;
  REQUIRE(cmd_sweep(a) == 0);

  SweepArgs b = a;
  b.common.out_dir = fresh_dir("sweep_det_b").string();
  b.common.workers = 4;
  REQUIRE(cmd_sweep(b) == 0);

  for (const char* name : {"summary.csv", "aggregate.csv", "trial_0007.csv"}) {
    CHECK(slurp(fs::path(a.common.out_dir) / name) == slurp(fs::path(b.common.out_dir) / name));
  }
}

TEST_CASE("window-plus-one round trip through train and simulate") {
  TrainArgs train;
  train.common.out_dir = fresh_dir("wp1_train").string();
  train.common.overrides = micro_training_overrides();
  train.common.overrides.push_back("model.window_plus_one=true");
  REQUIRE(cmd_train(train) == 0);

  LstmModel model = load_weights((fs::path(train.common.out_dir) / "weights.bin").string());
  CHECK(model.window == 9);  // horizon 8 + 1

  SimulateArgs sim;
  sim.common.out_dir = fresh_dir("wp1_sim").string();
  sim.common.overrides = {"model.window_plus_one=true"};
  sim.weights_path = (fs::path(train.common.out_dir) / "weights.bin").string();
  sim.scenario = "constant:4";
  sim.steps = 120;
  int code = cmd_simulate(sim);
  CHECK((code == 0 || code == 3));
  RunConfig resolved =
      load_config_file((fs::path(sim.common.out_dir) / "resolved.cfg").string(), RunConfig{});
  CHECK(resolved.window == 8);  // gate stays at the horizon
}

TEST_CASE("inspect-weights prints the header") {
  fs::path dir = fresh_dir("inspect");
  LstmModel model;
  model.params = init_params(4, 9);
  model.window = 12;
  save_weights(model, (dir / "w.bin").string());
  CHECK(cmd_inspect_weights((dir / "w.bin").string()) == 0);
  CHECK_THROWS_AS(cmd_inspect_weights((dir / "missing.bin").string()), IoError);
}

}  // TEST_SUITE
