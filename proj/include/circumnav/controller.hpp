#pragma once

#include <optional>

#include "circumnav/errors.hpp"
#include "circumnav/geometry.hpp"

namespace circumnav {

struct ControllerGains {
  double k_t = 60.0;    // tangential gain [m/s]
  double k_r = 10.0;    // radial gain [1/s]
  double d_star = 10.0; // desired circumnavigation radius [m]
  long window = 60;     // estimator window length l [steps]
  double u_max = 0.0;   // command-norm saturation [m/s]; 0 = unlimited
};

// Estimator output: relative displacement toward the target and the
// target's velocity.
struct TargetEstimate {
  Vec2 d_hat;  // [m]
  Vec2 v_hat;  // [m/s]
};

// Two-phase circumnavigation law. Before the estimator has a full window
// (step < l) the agent moves purely tangentially; afterwards a radial
// correction and the target-velocity feedforward are added:
//   u = k_t*perp(phi)                                   step <  l
//   u = k_t*perp(phi) + k_r*(|d_hat| - d*)*phi + v_hat  step >= l
inline Vec2 saturate_command(Vec2 u, double u_max) {
  if (u_max <= 0.0) return u;
  double norm = u.norm();
  return norm > u_max ? u * (u_max / norm) : u;
}

inline Vec2 control(long step, Bearing bearing, const std::optional<TargetEstimate>& estimate,
                    const ControllerGains& gains) {
  Vec2 tangential = perpendicular_cw(bearing).dir * gains.k_t;
  if (step < gains.window) return saturate_command(tangential, gains.u_max);
  if (!estimate.has_value()) throw MissingEstimate();
  if (!estimate->d_hat.finite() || !estimate->v_hat.finite()) throw NonFiniteEstimate();
  double radial_error = estimate->d_hat.norm() - gains.d_star;
  Vec2 u = tangential + bearing.dir * (gains.k_r * radial_error) + estimate->v_hat;
  return saturate_command(u, gains.u_max);
}

}  // namespace circumnav
