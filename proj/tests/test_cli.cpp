#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sril/cli_commands.hpp"
#include "sril/dataset_io.hpp"
#include "sril/regressor.hpp"

using namespace sril;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "sril-cli-test";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Per-episode rows and the aggregate line, with the config header
/// stripped (configs legitimately differ between equivalent invocations).
std::string report_body(const std::string& path) {
  std::istringstream in(slurp(path));
  std::string line, body;
  while (std::getline(in, line)) {
    if (line.rfind("# sril", 0) == 0 || line.rfind("# config", 0) == 0) continue;
    body += line + "\n";
  }
  return body;
}

GenDemosOptions small_demo_opts(const TempDir& tmp, const std::string& name, int n = 3) {
  GenDemosOptions opts;
  opts.task = "cube_transfer";
  opts.n = n;
  opts.seed = 0;
  opts.out = tmp.file(name);
  return opts;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen-demos writes a loadable dataset and reruns byte-identically") {
  TempDir tmp;
  cmd_gen_demos(small_demo_opts(tmp, "demos.ndjson"));
  const Dataset ds = load_dataset(tmp.file("demos.ndjson"));
  CHECK(ds.trajectories.size() == 3);
  CHECK(ds.meta.at("task") == "cube_transfer");
  const std::string first = slurp(tmp.file("demos.ndjson"));

  cmd_gen_demos(small_demo_opts(tmp, "demos2.ndjson"));
  CHECK(slurp(tmp.file("demos2.ndjson")) == first);

  GenDemosOptions bad = small_demo_opts(tmp, "never.ndjson", 0);
  CHECK_THROWS_WITH_AS(cmd_gen_demos(bad), "n must be positive", std::runtime_error);
}

TEST_CASE("downsample compresses, reports, and is the identity on a still dataset") {
  TempDir tmp;
  cmd_gen_demos(small_demo_opts(tmp, "demos.ndjson"));

  DownsampleOptions ds;
  ds.in = tmp.file("demos.ndjson");
  ds.out = tmp.file("ds.ndjson");
  ds.report = tmp.file("report.csv");
  cmd_downsample(ds);

  const Dataset in = load_dataset(ds.in);
  const Dataset out = load_dataset(ds.out);
  REQUIRE(out.trajectories.size() == in.trajectories.size());
  std::size_t in_frames = 0, out_frames = 0;
  for (const auto& t : in.trajectories) in_frames += t.frames.size();
  for (const auto& t : out.trajectories) out_frames += t.frames.size();
  CHECK(out_frames < in_frames);
  CHECK(out.meta.at("downsample.fm_hz") == "10");

  const std::string report = slurp(ds.report);
  CHECK(report.find("# config") != std::string::npos);
  CHECK(report.find("# stride_histogram") != std::string::npos);
  CHECK(report.find("demo-0,") != std::string::npos);

  // Zero-velocity dataset with fm = fs: nothing is important, nothing is
  // dropped.
  Dataset still;
  Trajectory traj;
  traj.id = "still";
  traj.fs_hz = 50.0;
  traj.layout = {{"x", 0, 1}};
  for (int i = 0; i < 40; ++i) {
    Frame fr;
    fr.t = i;
    fr.obs.features = {0.0};
    fr.state.qpos = {0.1, 0.2, 0.0, 0.3, 0.4, 0.0};
    fr.state.qvel.assign(6, 0.0);
    fr.state.eeft = {0.0, 0.0};
    fr.action.target_pos = fr.state.qpos;
    fr.action.target_vel.assign(6, 0.0);
    traj.frames.push_back(fr);
  }
  still.trajectories.push_back(traj);
  save_dataset(still, tmp.file("still.ndjson"));

  DownsampleOptions identity;
  identity.in = tmp.file("still.ndjson");
  identity.out = tmp.file("still-ds.ndjson");
  identity.fm_hz = 50.0;
  cmd_downsample(identity);
  const Dataset still_out = load_dataset(identity.out);
  CHECK(still_out.trajectories[0].frames.size() == 40);
}

TEST_CASE("train writes a checkpoint and a loss curve of the requested length") {
  TempDir tmp;
  cmd_gen_demos(small_demo_opts(tmp, "demos.ndjson", 2));

  TrainCmdOptions tr;
  tr.in = tmp.file("demos.ndjson");
  tr.out = tmp.file("policy.json");
  tr.hidden = 8;
  tr.epochs = 4;
  tr.batch = 128;
  tr.chunk = 5;
  tr.loss_curve = tmp.file("loss.txt");
  cmd_train(tr);

  const RegressorModel model = load_checkpoint(tr.out);
  CHECK(model.K == 5);
  CHECK(model.hidden == 8);
  CHECK(model.J == 6);

  std::istringstream curve(slurp(tr.loss_curve));
  std::string line;
  int rows = 0, headers = 0;
  while (std::getline(curve, line)) {
    if (line.rfind("#", 0) == 0) {
      ++headers;
    } else {
      ++rows;
    }
  }
  CHECK(rows == 4);
  CHECK(headers == 2);

  const std::string bytes = slurp(tr.out);
  cmd_train(tr);
  CHECK(slurp(tr.out) == bytes);  // deterministic retrain
}

TEST_CASE("rollout accounting and the no-offload equivalence") {
  TempDir tmp;
  cmd_gen_demos(small_demo_opts(tmp, "demos.ndjson", 2));

  {
    std::ofstream env(tmp.file("env.cfg"));
    env << "step_limit = 220\n";
  }

  TrainCmdOptions tr;
  tr.in = tmp.file("demos.ndjson");
  tr.out = tmp.file("policy.json");
  tr.hidden = 16;
  tr.epochs = 8;
  tr.chunk = 5;
  cmd_train(tr);

  RolloutOptions base;
  base.checkpoint = tr.out;
  base.episodes = 2;
  base.env_config = tmp.file("env.cfg");

  RolloutOptions no_offload = base;
  no_offload.no_offload = true;
  no_offload.out = tmp.file("baseline.csv");
  cmd_rollout(no_offload);

  RolloutOptions never_skip = base;
  never_skip.cot = -1.0;
  never_skip.out = tmp.file("never-skip.csv");
  cmd_rollout(never_skip);

  CHECK(report_body(no_offload.out) == report_body(never_skip.out));

  // cost identity per row: cost = 100*inferences + 20*steps
  std::istringstream rows(report_body(no_offload.out));
  std::string line;
  std::getline(rows, line);  // header
  int parsed = 0;
  while (std::getline(rows, line) && line.rfind("#", 0) != 0) {
    std::uint64_t seed;
    int success;
    std::int64_t steps, inf, skips;
    double cost;
    char c;
    std::istringstream row(line);
    row >> seed >> c >> success >> c >> steps >> c >> inf >> c >> skips >> c >> cost;
    CHECK(cost == doctest::Approx(100.0 * inf + 20.0 * steps));
    CHECK(skips == 0);
    ++parsed;
  }
  CHECK(parsed == 2);
}

TEST_CASE("single-cell sweep matches the rollout aggregate") {
  TempDir tmp;
  cmd_gen_demos(small_demo_opts(tmp, "demos.ndjson", 2));
  {
    std::ofstream env(tmp.file("env.cfg"));
    env << "step_limit = 220\n";
  }

  TrainCmdOptions tr;
  tr.in = tmp.file("demos.ndjson");
  tr.out = tmp.file("policy.json");
  tr.hidden = 16;
  tr.epochs = 8;
  tr.chunk = 5;
  cmd_train(tr);

  SweepOptions sw;
  sw.checkpoint = tr.out;
  sw.episodes = 2;
  sw.cot_grid = "0.3";
  sw.mcod_grid = "4";
  sw.out = tmp.file("sweep.csv");
  sw.env_config = tmp.file("env.cfg");
  cmd_sweep(sw);

  RolloutOptions ro;
  ro.checkpoint = tr.out;
  ro.episodes = 2;
  ro.cot = 0.3;
  ro.mcod = 4;
  ro.out = tmp.file("rollout.csv");
  ro.env_config = tmp.file("env.cfg");
  cmd_rollout(ro);

  // Pull the sweep's single data row and the rollout's aggregate line.
  std::istringstream sweep_rows(report_body(sw.out));
  std::string header, row;
  REQUIRE(std::getline(sweep_rows, header));
  REQUIRE(std::getline(sweep_rows, row));
  // mcod,cot,episodes,success_rate,mean_cost_ms,mean_inference,mean_skip_fraction
  std::string cells[7];
  std::istringstream split(row);
  for (auto& cell : cells) std::getline(split, cell, ',');

  const std::string rollout = slurp(ro.out);
  const auto agg_pos = rollout.find("# aggregate ");
  REQUIRE(agg_pos != std::string::npos);
  const std::string agg = rollout.substr(agg_pos);
  CHECK(agg.find("\"success_rate\":" + cells[3]) != std::string::npos);
  CHECK(agg.find("\"mean_inference\":" + cells[5]) != std::string::npos);

  CHECK_THROWS(cmd_sweep([&] {
    SweepOptions bad = sw;
    bad.cot_grid = " ";
    return bad;
  }()));
}

}  // TEST_SUITE
