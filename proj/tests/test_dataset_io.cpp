#include <doctest.h>

#include <stdexcept>
#include <string>

#include "sril/core_types.hpp"
#include "sril/dataset_io.hpp"
#include "sril/rng.hpp"

using namespace sril;

namespace {

Dataset random_dataset(std::uint64_t seed, int n_traj, int frames) {
  Rng rng(seed);
  Dataset ds;
  ds.meta["task"] = "test";
  ds.meta["seed"] = std::to_string(seed);
  for (int n = 0; n < n_traj; ++n) {
    Trajectory traj;
    traj.id = "demo-" + std::to_string(n);
    traj.fs_hz = 50.0;
    traj.layout = {{"cube_pos", 0, 2}, {"held", 2, 2}};
    for (int i = 0; i < frames; ++i) {
      Frame fr;
      fr.t = i;
      fr.obs.features = {rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0, 1.0};
      for (int j = 0; j < 8; ++j) fr.state.qpos.push_back(rng.gaussian(0, 1));
      for (int j = 0; j < 8; ++j) fr.state.qvel.push_back(rng.gaussian(0, 1));
      fr.state.eeft = {rng.uniform(0, 10), rng.uniform(0, 10)};
      for (int j = 0; j < 8; ++j) fr.action.target_pos.push_back(rng.gaussian(0, 1));
      for (int j = 0; j < 8; ++j) fr.action.target_vel.push_back(rng.gaussian(0, 1));
      traj.frames.push_back(std::move(fr));
    }
    ds.trajectories.push_back(std::move(traj));
  }
  return ds;
}

}  // namespace

TEST_SUITE("dataset_io") {

TEST_CASE("round trip is the identity on random datasets") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Dataset ds = random_dataset(seed, 3, 17);
    Dataset back = decode_dataset(encode_dataset(ds));
    CHECK(back == ds);
  }
}

TEST_CASE("header fields reproduced exactly") {
  Dataset ds = random_dataset(42, 1, 4);
  std::string bytes = encode_dataset(ds);
  std::string header = bytes.substr(0, bytes.find('\n'));
  CHECK(header.find("\"format\":\"sril-ds\"") != std::string::npos);
  CHECK(header.find("\"version\":1") != std::string::npos);
  CHECK(header.find("\"J\":8") != std::string::npos);
  CHECK(header.find("\"G\":2") != std::string::npos);
}

TEST_CASE("encode is deterministic") {
  Dataset ds = random_dataset(5, 2, 9);
  CHECK(encode_dataset(ds) == encode_dataset(ds));
}

TEST_CASE("truncated stream names the last complete record") {
  Dataset ds = random_dataset(9, 3, 5);
  std::string bytes = encode_dataset(ds);
  // Cut in the middle of the final trajectory line.
  std::string truncated = bytes.substr(0, bytes.size() - 40);
  try {
    decode_dataset(truncated);
    FAIL("expected decode error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("last complete record: trajectory 'demo-1'") != std::string::npos);
  }
}

TEST_CASE("version mismatch names expected and found versions") {
  Dataset ds = random_dataset(1, 1, 2);
  std::string bytes = encode_dataset(ds);
  std::string bumped = bytes;
  auto pos = bumped.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  bumped.replace(pos, 11, "\"version\":7");
  try {
    decode_dataset(bumped);
    FAIL("expected version error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("expected 1") != std::string::npos);
    CHECK(msg.find("found 7") != std::string::npos);
  }
}

TEST_CASE("malformed field reports line and field path") {
  Dataset ds = random_dataset(2, 2, 3);
  std::string bytes = encode_dataset(ds);
  auto pos = bytes.find("\"qvel\"");
  REQUIRE(pos != std::string::npos);
  std::string broken = bytes;
  broken.replace(pos, 6, "\"qvXl\"");
  try {
    decode_dataset(broken);
    FAIL("expected decode error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("qvel") != std::string::npos);
  }
}

}  // TEST_SUITE
