#pragma once

#include <cstdint>
#include <string>

#include "circumnav/dynamics.hpp"
#include "circumnav/rng.hpp"

namespace circumnav {

// One target trajectory instance. The target always starts at the origin;
// families differ in how the motion evolves.
struct Scenario {
  enum class Family { kConstant, kCircle, kNonholonomic, kFixedSpeedNonholonomic };

  Family family = Family::kConstant;

  double v = 9.0;  // constant family speed [m/s]

  double r = 20.0;     // circle radius [m]
  double omega = 0.4;  // circle angular rate [rad/s]

  NonholonomicBounds bounds;
  long resample_period = 75;   // [steps]
  double init_speed = 0.0;     // nonholonomic initial v_t [m/s]
  double fixed_speed = 10.0;   // fixed-speed variant [m/s]
  bool random_heading = true;  // draw initial heading from the trajectory stream
};

// Steps a scenario's target forward and reports its true state. Owns the
// trajectory RNG stream so that identical (scenario, seed) pairs replay
// bit-identically regardless of what else the caller draws.
class TargetRunner {
 public:
  TargetRunner(const Scenario& sc, double dt, std::uint64_t traj_seed)
      : scenario_(sc), dt_(dt), rng_(traj_seed) {
    switch (sc.family) {
      case Scenario::Family::kConstant:
        constant_ = ConstantVelocityTarget{{0.0, 0.0}, sc.v};
        break;
      case Scenario::Family::kCircle:
        circle_ = CircleTarget{sc.r, sc.omega};  // closed form, no mutable state
        break;
      case Scenario::Family::kNonholonomic:
        nonholo_.bounds = sc.bounds;
        nonholo_.resample_period = sc.resample_period;
        nonholo_.v = sc.init_speed;
        nonholo_.heading = sc.random_heading ? rng_.uniform(-M_PI, M_PI) : 0.0;
        nonholo_ = resample_nonholonomic_inputs(nonholo_, rng_);  // trial-start draw
        break;
      case Scenario::Family::kFixedSpeedNonholonomic:
        nonholo_.bounds = sc.bounds;
        nonholo_.resample_period = sc.resample_period;
        nonholo_.v = sc.fixed_speed;
        nonholo_.heading = sc.random_heading ? rng_.uniform(-M_PI, M_PI) : 0.0;
        nonholo_ = resample_fixed_speed_inputs(nonholo_, rng_);
        break;
    }
  }

  Vec2 pos() const {
    switch (scenario_.family) {
      case Scenario::Family::kConstant: return constant_.pos;
      case Scenario::Family::kCircle:
        return circle_.at(static_cast<double>(steps_) * dt_).pos;
      default: return nonholo_.pos;
    }
  }

  Vec2 vel() const {
    switch (scenario_.family) {
      case Scenario::Family::kConstant: return constant_.velocity();
      case Scenario::Family::kCircle:
        return circle_.at(static_cast<double>(steps_) * dt_).vel;
      default: return nonholo_.velocity();
    }
  }

  // Advance one timestep. Nonholonomic families redraw their inputs at
  // steps resample_period, 2*resample_period, ... (never at step 0).
  void advance() {
    switch (scenario_.family) {
      case Scenario::Family::kConstant:
        constant_ = constant_velocity_step(constant_, dt_);
        break;
      case Scenario::Family::kCircle:
        break;  // position is a function of the step count
      case Scenario::Family::kNonholonomic:
        if (steps_ > 0 && steps_ % scenario_.resample_period == 0) {
          nonholo_ = resample_nonholonomic_inputs(nonholo_, rng_);
        }
        nonholo_ = nonholonomic_step(nonholo_, dt_);
        break;
      case Scenario::Family::kFixedSpeedNonholonomic:
        if (steps_ > 0 && steps_ % scenario_.resample_period == 0) {
          nonholo_ = resample_fixed_speed_inputs(nonholo_, rng_);
        }
        nonholo_ = nonholonomic_step(nonholo_, dt_);
        break;
    }
    ++steps_;
  }

  long steps_taken() const { return steps_; }

 private:
  Scenario scenario_;
  double dt_;
  Rng rng_;
  long steps_ = 0;
  ConstantVelocityTarget constant_;
  CircleTarget circle_;
  NonholonomicTarget nonholo_;
};

std::string family_name(Scenario::Family family);

// Parses "constant:9", "circle:0.4", "nonholonomic", "fast-nonholonomic:12".
Scenario parse_scenario(const std::string& text);

}  // namespace circumnav
