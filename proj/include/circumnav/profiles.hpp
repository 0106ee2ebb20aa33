#pragma once

#include <cstdint>
#include <string>

#include "circumnav/controller.hpp"
#include "circumnav/geometry.hpp"

namespace circumnav {

// Frozen constant sets for the published experiment setups. Tests pin a
// checksum of these values so accidental edits fail loudly.
struct Profile {
  std::string name;
  ControllerGains gains;            // k_t, k_r, d*, window l
  double frequency = 50.0;          // [Hz]
  Vec2 target_start{0.0, 0.0};
  Vec2 agent_start{15.0, 0.0};
  Vec2 initial_target_estimate{5.0, 0.0};
  long hidden = 512;
  double lr = 0.001;
  long iterations = 50;
  long epochs = 30;
  long batch_size = 64;
  long dataset_size = 100000;
};

// Registered names: "paper" (k_t=60, k_r=10) and "fast" (k_t=25, k_r=4,
// everything else inherited). Throws UnknownProfile otherwise.
const Profile& profile(const std::string& name);

// Canonical serialization of a profile's numeric content, hashed by tests.
std::uint64_t profile_checksum(const Profile& p);

}  // namespace circumnav
