#include "circumnav/profiles.hpp"

#include <cstdio>

#include "circumnav/errors.hpp"

namespace circumnav {

namespace {

Profile make_paper() {
  Profile p;
  p.name = "paper";
  p.gains = ControllerGains{60.0, 10.0, 10.0, 60};
  return p;
}

Profile make_fast() {
  Profile p = make_paper();
  p.name = "fast";
  p.gains.k_t = 25.0;
  p.gains.k_r = 4.0;
  return p;
}

}  // namespace

const Profile& profile(const std::string& name) {
  static const Profile paper = make_paper();
  static const Profile fast = make_fast();
  if (name == "paper") return paper;
  if (name == "fast") return fast;
  throw UnknownProfile(name);
}

std::uint64_t profile_checksum(const Profile& p) {
  char buf[512];
  int n = std::snprintf(
      buf, sizeof(buf),
      "kt=%.9g;kr=%.9g;dstar=%.9g;l=%ld;freq=%.9g;pt0=%.9g,%.9g;pa0=%.9g,%.9g;"
      "phat0=%.9g,%.9g;H=%ld;lr=%.9g;I=%ld;epochs=%ld;batch=%ld;dataset=%ld",
      p.gains.k_t, p.gains.k_r, p.gains.d_star, p.gains.window, p.frequency, p.target_start.x,
      p.target_start.y, p.agent_start.x, p.agent_start.y, p.initial_target_estimate.x,
      p.initial_target_estimate.y, p.hidden, p.lr, p.iterations, p.epochs, p.batch_size,
      p.dataset_size);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int k = 0; k < n; ++k) {
    h ^= static_cast<unsigned char>(buf[k]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace circumnav
