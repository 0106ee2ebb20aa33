#pragma once

#include <cmath>

#include "circumnav/errors.hpp"
#include "circumnav/geometry.hpp"
#include "circumnav/rng.hpp"

namespace circumnav {

struct SimClock {
  long step_index = 0;
  double dt = 0.02;  // [s], 1/frequency; default 50 Hz

  double time() const { return static_cast<double>(step_index) * dt; }
};

// Target moving at a fixed speed along +x.
struct ConstantVelocityTarget {
  Vec2 pos{0.0, 0.0};
  double v = 0.0;  // [m/s]

  Vec2 velocity() const { return {v, 0.0}; }
};

inline ConstantVelocityTarget constant_velocity_step(ConstantVelocityTarget state, double dt) {
  state.pos.x += state.v * dt;
  return state;
}

// Closed-form circular trajectory: starts at the origin, circles the
// center [0, r] at constant angular rate omega.
//   pos(t) = [r cos(wt - pi/2), r sin(wt - pi/2) + r]
struct CirclePoint {
  Vec2 pos;
  Vec2 vel;
};

inline CirclePoint circle_position(double t, double r, double omega) {
  double a = omega * t - M_PI / 2.0;
  return {{r * std::cos(a), r * std::sin(a) + r},
          {-r * omega * std::sin(a), r * omega * std::cos(a)}};
}

struct CircleTarget {
  double r = 20.0;      // [m], > 0
  double omega = 0.4;   // [rad/s]

  CirclePoint at(double t) const { return circle_position(t, r, omega); }
  Vec2 center() const { return {0.0, r}; }
};

// Double-integrator nonholonomic target: accelerations (a, alpha) drive
// speed and yaw rate, which are clamped to bounds after every update.
struct NonholonomicBounds {
  double v_min = 0.0;
  double v_max = 20.0;        // [m/s]
  double omega_min = -M_PI / 2.0;
  double omega_max = M_PI / 2.0;   // [rad/s]
  double a_min = -5.0;
  double a_max = 5.0;         // [m/s^2]
  double alpha_min = -M_PI / 2.0;
  double alpha_max = M_PI / 2.0;   // [rad/s^2]
};

struct NonholonomicTarget {
  Vec2 pos{0.0, 0.0};
  double heading = 0.0;  // [rad]
  double v = 0.0;        // [m/s]
  double omega = 0.0;    // [rad/s]
  double a = 0.0;        // [m/s^2]
  double alpha = 0.0;    // [rad/s^2]
  long resample_period = 75;  // [steps]
  NonholonomicBounds bounds;

  Vec2 velocity() const { return {v * std::cos(heading), v * std::sin(heading)}; }
};

inline double clamp(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

// Explicit Euler update, in this order: accelerations, clamp, position,
// heading. Clamping right after the velocity update keeps every discrete
// state within bounds.
inline NonholonomicTarget nonholonomic_step(NonholonomicTarget s, double dt) {
  s.v += s.a * dt;
  s.omega += s.alpha * dt;
  s.v = clamp(s.v, s.bounds.v_min, s.bounds.v_max);
  s.omega = clamp(s.omega, s.bounds.omega_min, s.bounds.omega_max);
  s.pos.x += s.v * std::cos(s.heading) * dt;
  s.pos.y += s.v * std::sin(s.heading) * dt;
  s.heading += s.omega * dt;
  return s;
}

// Draw fresh accelerations; yaw rate resets to zero so trajectories do not
// spiral for the whole trial. Speed, heading and position are untouched.
inline NonholonomicTarget resample_nonholonomic_inputs(NonholonomicTarget s, Rng& rng) {
  s.a = rng.uniform(s.bounds.a_min, s.bounds.a_max);
  s.alpha = rng.uniform(s.bounds.alpha_min, s.bounds.alpha_max);
  s.omega = 0.0;
  return s;
}

// Fixed-speed variant: accelerations stay zero, speed is pinned per trial,
// and the yaw rate itself is redrawn each period.
inline NonholonomicTarget resample_fixed_speed_inputs(NonholonomicTarget s, Rng& rng) {
  s.a = 0.0;
  s.alpha = 0.0;
  s.omega = rng.uniform(s.bounds.omega_min, s.bounds.omega_max);
  return s;
}

// Velocity-commanded single-integrator agent.
struct AgentState {
  Vec2 pos{0.0, 0.0};
  Vec2 vel{0.0, 0.0};  // equals the most recent command
};

inline AgentState agent_step(AgentState state, Vec2 u, double dt) {
  if (!u.finite()) throw NonFiniteCommand();
  state.pos += u * dt;
  state.vel = u;
  return state;
}

}  // namespace circumnav
