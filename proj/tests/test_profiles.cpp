#include <doctest.h>

#include "circumnav/profiles.hpp"

using namespace circumnav;

TEST_SUITE("profiles") {

TEST_CASE("paper profile values") {
  const Profile& p = profile("paper");
  CHECK(p.gains.k_t == 60.0);
  CHECK(p.gains.k_r == 10.0);
  CHECK(p.gains.d_star == 10.0);
  CHECK(p.gains.window == 60);
  CHECK(p.frequency == 50.0);
  CHECK(p.target_start.x == 0.0);
  CHECK(p.target_start.y == 0.0);
  CHECK(p.agent_start.x == 15.0);
  CHECK(p.agent_start.y == 0.0);
  CHECK(p.initial_target_estimate.x == 5.0);
  CHECK(p.initial_target_estimate.y == 0.0);
  CHECK(p.hidden == 512);
  CHECK(p.lr == 0.001);
  CHECK(p.iterations == 50);
  CHECK(p.epochs == 30);
  CHECK(p.batch_size == 64);
  CHECK(p.dataset_size == 100000);
}

TEST_CASE("fast profile inherits everything but the gains") {
  const Profile& f = profile("fast");
  CHECK(f.gains.k_t == 25.0);
  CHECK(f.gains.k_r == 4.0);
  CHECK(f.gains.d_star == 10.0);
  CHECK(f.hidden == 512);
  CHECK(f.iterations == 50);
}

TEST_CASE("unknown profile is rejected") {
  CHECK_THROWS_AS(profile("bogus"), UnknownProfile);
}

TEST_CASE("pinned checksums catch accidental edits") {
  CHECK(profile_checksum(profile("paper")) == 0xe17e0bc74d581aa5ULL);
  CHECK(profile_checksum(profile("fast")) == 0xc79aafa90254635dULL);
}

}  // TEST_SUITE
