#pragma once

#include "circumnav/dynamics.hpp"
#include "circumnav/geometry.hpp"
#include "circumnav/rng.hpp"

namespace circumnav {

// One timestep of estimator input: the bearing toward the target and the
// agent's own velocity.
struct Observation {
  Vec2 bearing;    // unit norm unless renormalization is disabled
  Vec2 agent_vel;  // [m/s]
};

// Zero-mean Gaussian perturbation applied to all four observation
// components. The same sigma covers the (unitless) bearing components and
// the (m/s) velocity components.
struct NoiseModel {
  double sigma = 0.0;
  // The perturbed bearing is renormalized to unit length by default; the
  // raw-perturbed reading is available for experiments.
  bool renormalize_bearing = true;
};

// Additive noise draws for one observation, in component order
// [bearing.x, bearing.y, vel.x, vel.y].
struct NoiseDraw {
  double b_x = 0.0, b_y = 0.0, v_x = 0.0, v_y = 0.0;
};

inline NoiseDraw draw_noise(const NoiseModel& noise, Rng& rng) {
  if (noise.sigma <= 0.0) return {};
  NoiseDraw n;
  n.b_x = rng.normal(0.0, noise.sigma);
  n.b_y = rng.normal(0.0, noise.sigma);
  n.v_x = rng.normal(0.0, noise.sigma);
  n.v_y = rng.normal(0.0, noise.sigma);
  return n;
}

// Applies a concrete noise draw to a clean observation. Split out from
// observe() so the degenerate-bearing guard is reachable in tests.
inline Observation perturb_observation(Observation clean, const NoiseDraw& n,
                                       bool renormalize_bearing) {
  Observation out;
  out.bearing = {clean.bearing.x + n.b_x, clean.bearing.y + n.b_y};
  out.agent_vel = {clean.agent_vel.x + n.v_x, clean.agent_vel.y + n.v_y};
  if (renormalize_bearing) {
    double norm = out.bearing.norm();
    if (norm < kZeroRangeThreshold) throw DegenerateBearing();
    out.bearing = out.bearing * (1.0 / norm);
  }
  return out;
}

// Produce the estimator input for the current step, with noise per the
// model. sigma = 0 is an exact pass-through of the true bearing.
inline Observation observe(Vec2 target_pos, const AgentState& agent, const NoiseModel& noise,
                           Rng& rng) {
  Observation clean{unit_bearing(target_pos, agent.pos).dir, agent.vel};
  if (noise.sigma <= 0.0) return clean;
  return perturb_observation(clean, draw_noise(noise, rng), noise.renormalize_bearing);
}

}  // namespace circumnav
