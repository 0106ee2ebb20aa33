#include "circumnav/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "circumnav/csv.hpp"
#include "circumnav/parallel.hpp"

namespace circumnav {

namespace {

constexpr std::uint64_t kScenarioStream = 0x7363656e;  // "scen"
constexpr std::uint64_t kTrajStream = 0x7472616a;
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;
constexpr std::uint64_t kDecisionStream = 0x64656373;
constexpr std::uint64_t kShuffleStream = 0x73687566;
constexpr std::uint64_t kInitStream = 0x696e6974;

// Episodes are simulated in fixed-size waves and merged in index order, so
// the dataset is identical for any worker count.
constexpr std::size_t kEpisodeWave = 8;
// Fixed reduction chunk for minibatch gradients, for the same reason.
constexpr std::size_t kGradChunk = 8;

bool near_grid(double v, double lo, double hi, long n, double halfwidth) {
  if (n <= 1) return std::abs(v - lo) <= halfwidth;
  double spacing = (hi - lo) / static_cast<double>(n - 1);
  double k = std::round((v - lo) / spacing);
  if (k < 0 || k >= static_cast<double>(n)) return false;
  return std::abs(v - (lo + k * spacing)) <= halfwidth;
}

}  // namespace

Scenario draw_scenario(const TrajectoryMix& mix, Rng& rng) {
  double total = mix.weight_constant + mix.weight_circle + mix.weight_nonholonomic;
  if (total <= 0.0) throw ValidationError("trajectory mix has no positive weights");
  double pick = rng.uniform(0.0, total);

  Scenario sc;
  if (pick < mix.weight_constant) {
    sc.family = Scenario::Family::kConstant;
    do {
      sc.v = rng.uniform(mix.const_v_min, mix.const_v_max);
    } while (near_grid(sc.v, 1.0, 15.0, 15, mix.const_v_exclusion));
  } else if (pick < mix.weight_constant + mix.weight_circle) {
    sc.family = Scenario::Family::kCircle;
    sc.r = rng.uniform(mix.circle_r_min, mix.circle_r_max);
    bool near_test_radius = std::abs(sc.r - 20.0) < 0.1;
    do {
      sc.omega = rng.uniform(mix.circle_omega_min, mix.circle_omega_max);
    } while (near_test_radius &&
             near_grid(sc.omega, 0.05, 0.4, 15, mix.circle_omega_exclusion));
  } else {
    sc.family = Scenario::Family::kNonholonomic;
    sc.bounds = mix.bounds;
    sc.resample_period = mix.resample_period;
  }
  return sc;
}

namespace {

struct EpisodeOutput {
  std::vector<Sample> samples;
  long gt_decisions = 0;
  long decisions = 0;
  long retries = 0;
  double mean_control_error = 0.0;
};

// One closed-loop collection episode. Throws EpisodeDivergence when the
// range exceeds the abort radius; the caller retries with a fresh stream.
EpisodeOutput simulate_episode_once(const TrainingConfig& cfg, const LstmModel& model, double s,
                                    std::uint64_t iter, std::uint64_t episode,
                                    std::uint64_t retry) {
  double dt = 0.02;
  Rng scen_rng(Rng::derive(cfg.master_seed, iter, episode, retry, kScenarioStream));
  Rng noise_rng(Rng::derive(cfg.master_seed, iter, episode, retry, kNoiseStream));
  Rng decision_rng(Rng::derive(cfg.master_seed, iter, episode, retry, kDecisionStream));

  Scenario scenario = draw_scenario(cfg.mix, scen_rng);
  double start_radius = scen_rng.uniform(cfg.mix.agent_radius_min, cfg.mix.agent_radius_max);
  double start_angle = scen_rng.uniform(-M_PI, M_PI);

  TargetRunner target(scenario, dt,
                      Rng::derive(cfg.master_seed, iter, episode, retry, kTrajStream));
  AgentState agent{{start_radius * std::cos(start_angle), start_radius * std::sin(start_angle)},
                   {0.0, 0.0}};
  NoiseModel noise{cfg.noise_sigma, true};
  long gate = cfg.gains.window;
  ObservationWindow window(static_cast<std::size_t>(cfg.model_window()));

  EpisodeOutput out;
  out.samples.reserve(static_cast<std::size_t>(std::max<long>(0, cfg.episode_steps - gate)));
  double control_error_sum = 0.0;

  for (long k = 0; k < cfg.episode_steps; ++k) {
    Vec2 p_target = target.pos();
    Vec2 v_target = target.vel();
    Vec2 d = displacement(p_target, agent.pos);
    if (d.norm() > cfg.abort_radius) throw EpisodeDivergence(d.norm());

    Observation obs = observe(p_target, agent, noise, noise_rng);
    window.push(obs);
    double bn = obs.bearing.norm();
    if (bn < kZeroRangeThreshold) throw DegenerateBearing();
    Bearing bearing{obs.bearing * (1.0 / bn)};

    std::optional<TargetEstimate> estimate;
    if (k >= gate) {
      double r = decision_rng.uniform01();
      out.decisions += 1;
      if (r < s) {
        estimate = TargetEstimate{d, v_target};
        out.gt_decisions += 1;
      } else {
        Vec4 y = model_forward(window.to_inputs(model.input_vel_scale), model.params);
        estimate = TargetEstimate{{y[0] * model.target_scale, y[1] * model.target_scale},
                                  {y[2] * model.target_scale, y[3] * model.target_scale}};
      }
      // The stored pair is always ground truth, whichever branch drove the
      // controller.
      Sample sample;
      sample.inputs = window.to_inputs(cfg.input_vel_scale);
      sample.target = {d.x, d.y, v_target.x, v_target.y};
      out.samples.push_back(std::move(sample));
    }

    Vec2 u = control(k, bearing, estimate, cfg.gains);
    control_error_sum += control_error(d, cfg.gains.d_star);
    agent = agent_step(agent, u, dt);
    target.advance();
  }

  out.mean_control_error = control_error_sum / static_cast<double>(cfg.episode_steps);
  return out;
}

EpisodeOutput simulate_episode(const TrainingConfig& cfg, const LstmModel& model, double s,
                               std::uint64_t iter, std::uint64_t episode) {
  for (std::uint64_t retry = 0;; ++retry) {
    if (retry > 64) throw RuntimeError("episode diverged 64 times in a row; check the config");
    try {
      EpisodeOutput out = simulate_episode_once(cfg, model, s, iter, episode, retry);
      out.retries = static_cast<long>(retry);
      return out;
    } catch (const EpisodeDivergence&) {
      continue;
    }
  }
}

}  // namespace

Dataset collect_iteration_dataset(const TrainingConfig& cfg, const LstmModel& model, long i) {
  if (cfg.samples_per_iteration < 1) throw ValidationError("samples_per_iteration must be >= 1");
  if (cfg.episode_steps <= cfg.gains.window) {
    throw ValidationError("episodes must be longer than the window");
  }

  double s = switching_threshold(i, cfg.iterations);
  Dataset ds;
  ds.stats.iteration = i;
  ds.samples.reserve(static_cast<std::size_t>(cfg.samples_per_iteration));

  double episode_err_sum = 0.0;
  std::uint64_t next_episode = 0;
  while (ds.samples.size() < static_cast<std::size_t>(cfg.samples_per_iteration)) {
    std::vector<EpisodeOutput> wave(kEpisodeWave);
    parallel_for(kEpisodeWave, cfg.workers, [&](std::size_t w) {
      wave[w] = simulate_episode(cfg, model, s, static_cast<std::uint64_t>(i),
                                 next_episode + w);
    });
    for (EpisodeOutput& ep : wave) {
      ds.stats.episodes += 1;
      ds.stats.divergent_retries += ep.retries;
      ds.stats.gt_fraction += static_cast<double>(ep.gt_decisions);
      ds.stats.decisions += ep.decisions;
      episode_err_sum += ep.mean_control_error;
      for (Sample& sample : ep.samples) {
        if (ds.samples.size() >= static_cast<std::size_t>(cfg.samples_per_iteration)) break;
        ds.samples.push_back(std::move(sample));
      }
    }
    next_episode += kEpisodeWave;
  }

  ds.stats.gt_fraction =
      ds.stats.decisions > 0 ? ds.stats.gt_fraction / static_cast<double>(ds.stats.decisions)
                             : 1.0;
  ds.stats.mean_episode_control_error =
      episode_err_sum / static_cast<double>(ds.stats.episodes);
  return ds;
}

namespace {

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t k = idx.size(); k > 1; --k) {
    auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(k));
    if (j >= k) j = k - 1;
    std::swap(idx[k - 1], idx[j]);
  }
}

void add_gradients(Gradients& into, const Gradients& from) {
  std::vector<std::pair<double*, std::size_t>> dst;
  into.for_each_tensor([&](double* d, std::size_t n) { dst.push_back({d, n}); });
  std::size_t t = 0;
  from.for_each_tensor([&](const double* d, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) dst[t].first[k] += d[k];
    ++t;
  });
}

void scale_gradients(Gradients& g, double s) {
  g.for_each_tensor([&](double* d, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) d[k] *= s;
  });
}

}  // namespace

LstmParams train_iteration(const LstmParams& params, const std::vector<Sample>& dataset,
                           const TrainingConfig& cfg, long iteration,
                           std::vector<EpochRow>* rows) {
  if (dataset.empty()) throw ValidationError("training dataset is empty");
  LstmParams p = params;
  if (cfg.epochs == 0) return p;

  std::size_t hidden = p.hidden;
  AdamState opt(hidden);
  AdamConfig adam;
  adam.lr = cfg.lr;

  std::size_t n = dataset.size();
  std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  std::size_t max_chunks = (batch + kGradChunk - 1) / kGradChunk;

  std::vector<Gradients> chunk_grads(max_chunks);
  for (auto& g : chunk_grads) g.resize(hidden);
  std::vector<double> chunk_loss(max_chunks);
  std::vector<ForwardCache> caches(max_chunks);
  std::vector<BackwardScratch> scratches(max_chunks);

  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;

  auto t0 = std::chrono::steady_clock::now();
  for (long epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(Rng::derive(cfg.master_seed, kShuffleStream,
                                static_cast<std::uint64_t>(iteration),
                                static_cast<std::uint64_t>(epoch)));
    shuffle_indices(order, shuffle_rng);

    double epoch_loss = 0.0;
    std::size_t epoch_samples = 0;
    long batch_id = 0;
    for (std::size_t start = 0; start < n; start += batch, ++batch_id) {
      std::size_t b = std::min(batch, n - start);
      std::size_t chunks = (b + kGradChunk - 1) / kGradChunk;

      parallel_for(chunks, cfg.workers, [&](std::size_t ci) {
        Gradients& g = chunk_grads[ci];
        g.for_each_tensor([](double* d, std::size_t m) { std::fill(d, d + m, 0.0); });
        double loss = 0.0;
        std::size_t lo = ci * kGradChunk;
        std::size_t hi = std::min(lo + kGradChunk, b);
        for (std::size_t k = lo; k < hi; ++k) {
          const Sample& sample = dataset[order[start + k]];
          Vec4 pred = model_forward_cached(sample.inputs, p, caches[ci]);
          Vec4 target_scaled{sample.target[0] / cfg.target_scale,
                             sample.target[1] / cfg.target_scale,
                             sample.target[2] / cfg.target_scale,
                             sample.target[3] / cfg.target_scale};
          MseResult mse = mse_loss(pred, target_scaled);
          loss += mse.loss;
          model_backward_acc(caches[ci], p, mse.grad, g, scratches[ci]);
        }
        chunk_loss[ci] = loss;
      });

      Gradients& total = chunk_grads[0];
      double batch_loss = chunk_loss[0];
      for (std::size_t ci = 1; ci < chunks; ++ci) {
        add_gradients(total, chunk_grads[ci]);
        batch_loss += chunk_loss[ci];
      }
      if (!std::isfinite(batch_loss)) {
        double pnorm = 0.0;
        p.for_each_tensor([&](const double* d, std::size_t m) {
          for (std::size_t j = 0; j < m; ++j) pnorm += d[j] * d[j];
        });
        throw NonFiniteLoss("iteration " + std::to_string(iteration) + ", epoch " +
                            std::to_string(epoch) + ", batch " + std::to_string(batch_id) +
                            ", param norm " + std::to_string(std::sqrt(pnorm)) +
                            " (last checkpoint on disk is the usable snapshot)");
      }
      scale_gradients(total, 1.0 / static_cast<double>(b));
      clip_global_norm(total, cfg.grad_clip);
      adam_step(p, total, opt, adam);

      epoch_loss += batch_loss;
      epoch_samples += b;
    }

    if (rows != nullptr) {
      auto t1 = std::chrono::steady_clock::now();
      EpochRow row;
      row.iteration = iteration;
      row.epoch = epoch;
      row.mean_loss = epoch_loss / static_cast<double>(epoch_samples);
      row.wallclock_s = std::chrono::duration<double>(t1 - t0).count();
      rows->push_back(row);
    }
  }
  return p;
}

TrainingResult run_training(const TrainingConfig& cfg,
                            const std::function<void(long, const LstmModel&)>& checkpoint_cb) {
  if (cfg.iterations < 1) throw ValidationError("iterations must be >= 1");
  if (cfg.hidden < 1) throw ValidationError("hidden size must be >= 1");
  if (cfg.gains.window < 1) throw ValidationError("window must be >= 1");
  if (cfg.batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (cfg.lr <= 0.0) throw ValidationError("learning rate must be positive");
  if (cfg.input_vel_scale <= 0.0 || cfg.target_scale <= 0.0) {
    throw ValidationError("scales must be positive");
  }

  TrainingResult result;
  result.model.params =
      init_params(static_cast<std::size_t>(cfg.hidden), Rng::derive(cfg.master_seed, kInitStream));
  result.model.window = cfg.model_window();
  result.model.input_vel_scale = cfg.input_vel_scale;
  result.model.target_scale = cfg.target_scale;

  for (long i = 0; i <= cfg.iterations; ++i) {
    Dataset ds = collect_iteration_dataset(cfg, result.model, i);

    std::vector<EpochRow> rows;
    result.model.params = train_iteration(result.model.params, ds.samples, cfg, i, &rows);
    for (EpochRow& row : rows) {
      row.gt_fraction = ds.stats.gt_fraction;
      result.report.push_back(row);
    }
    result.iterations.push_back(ds.stats);
    if (checkpoint_cb) checkpoint_cb(i, result.model);
  }
  return result;
}

void write_training_report_csv(const std::string& path, const std::vector<EpochRow>& rows,
                               bool include_wallclock) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out << (include_wallclock ? "iteration,epoch,loss,gt_fraction,wallclock\n"
                            : "iteration,epoch,loss,gt_fraction\n");
  for (const EpochRow& r : rows) {
    out << r.iteration << ',' << r.epoch << ',' << format_double(r.mean_loss) << ','
        << format_double(r.gt_fraction);
    if (include_wallclock) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", r.wallclock_s);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out.good()) throw IoError("write failed: " + path);
}

}  // namespace circumnav
