#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "circumnav/controller.hpp"
#include "circumnav/dynamics.hpp"
#include "circumnav/lstm.hpp"
#include "circumnav/sensing.hpp"

namespace circumnav {

// Rolling buffer of the most recent observations, oldest first.
class ObservationWindow {
 public:
  explicit ObservationWindow(std::size_t capacity) : capacity_(capacity) {}

  void push(const Observation& obs) {
    buf_.push_back(obs);
    if (buf_.size() > capacity_) buf_.pop_front();
  }

  bool full() const { return buf_.size() == capacity_; }
  std::size_t size() const { return buf_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Observation& at(std::size_t k) const { return buf_[k]; }

  // Model inputs [bearing, velocity / vel_scale], oldest first.
  std::vector<Vec4> to_inputs(double vel_scale) const {
    std::vector<Vec4> xs;
    xs.reserve(buf_.size());
    for (const Observation& o : buf_) {
      xs.push_back({o.bearing.x, o.bearing.y, o.agent_vel.x / vel_scale,
                    o.agent_vel.y / vel_scale});
    }
    return xs;
  }

 private:
  std::size_t capacity_;
  std::deque<Observation> buf_;
};

// Everything an estimator may look at when producing an estimate.
// Ground truth is only consumed by the oracle (and training's scheduled
// sampling); the learned estimator sees the window alone.
struct EstimateContext {
  const ObservationWindow& window;
  Vec2 true_displacement;       // d(t) = p_T - p_A
  Vec2 true_target_vel;         // v_T(t)
  Vec2 agent_pos;
  Vec2 initial_target_estimate; // configured p_hat_T(0)
};

class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual TargetEstimate estimate(const EstimateContext& ctx) = 0;
  virtual const char* name() const = 0;
};

// Ground-truth oracle: test double for controller verification and the
// early scheduled-sampling iterations.
class OracleEstimator final : public Estimator {
 public:
  TargetEstimate estimate(const EstimateContext& ctx) override {
    return {ctx.true_displacement, ctx.true_target_vel};
  }
  const char* name() const override { return "oracle"; }
};

// Ablation baseline: never updates the initial target guess and assumes a
// stationary target.
class HoldInitialEstimator final : public Estimator {
 public:
  TargetEstimate estimate(const EstimateContext& ctx) override {
    return {ctx.initial_target_estimate - ctx.agent_pos, {0.0, 0.0}};
  }
  const char* name() const override { return "hold-initial"; }
};

// Learned estimator: feeds the observation window through the LSTM.
class LstmEstimator final : public Estimator {
 public:
  explicit LstmEstimator(LstmModel model) : model_(std::move(model)) {}

  TargetEstimate estimate(const EstimateContext& ctx) override {
    if (ctx.window.size() != static_cast<std::size_t>(model_.window)) {
      throw WrongWindowLength(ctx.window.size(), static_cast<std::size_t>(model_.window));
    }
    Vec4 y = model_forward(ctx.window.to_inputs(model_.input_vel_scale), model_.params);
    double s = model_.target_scale;
    return {{y[0] * s, y[1] * s}, {y[2] * s, y[3] * s}};
  }

  const LstmModel& model() const { return model_; }
  const char* name() const override { return "lstm"; }

 private:
  LstmModel model_;
};

}  // namespace circumnav
