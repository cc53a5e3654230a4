#include "sril/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sril {

using nlohmann::json;

namespace {

json vec_to_json(const std::vector<double>& v) { return json(v); }

std::vector<double> json_to_vec(const json& j, const std::string& path) {
  if (!j.is_array()) throw std::runtime_error("field '" + path + "' is not an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw std::runtime_error("field '" + path + "' has a non-numeric entry");
    out.push_back(x.get<double>());
  }
  return out;
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw std::runtime_error("missing field '" + where + "." + key + "'");
  return *it;
}

json encode_trajectory(const Trajectory& traj) {
  json rec;
  rec["id"] = traj.id;
  rec["fs_hz"] = traj.fs_hz;
  json layout = json::array();
  for (const LayoutField& f : traj.layout) layout.push_back({f.name, f.offset, f.length});
  rec["layout"] = layout;
  json frames = json::array();
  for (const Frame& fr : traj.frames) {
    json jf;
    jf["t"] = fr.t;
    jf["obs"] = vec_to_json(fr.obs.features);
    jf["qpos"] = vec_to_json(fr.state.qpos);
    jf["qvel"] = vec_to_json(fr.state.qvel);
    jf["eeft"] = vec_to_json(fr.state.eeft);
    jf["action_pos"] = vec_to_json(fr.action.target_pos);
    jf["action_vel"] = vec_to_json(fr.action.target_vel);
    frames.push_back(std::move(jf));
  }
  rec["frames"] = std::move(frames);
  return rec;
}

Trajectory decode_trajectory(const json& rec) {
  Trajectory traj;
  traj.id = require(rec, "id", "trajectory").get<std::string>();
  traj.fs_hz = require(rec, "fs_hz", "trajectory").get<double>();
  for (const auto& f : require(rec, "layout", "trajectory")) {
    if (!f.is_array() || f.size() != 3)
      throw std::runtime_error("field 'trajectory.layout' entries must be [name, offset, len]");
    traj.layout.push_back({f[0].get<std::string>(), f[1].get<int>(), f[2].get<int>()});
  }
  std::size_t idx = 0;
  for (const auto& jf : require(rec, "frames", "trajectory")) {
    const std::string where = "frames[" + std::to_string(idx) + "]";
    Frame fr;
    fr.t = require(jf, "t", where).get<std::int64_t>();
    fr.obs.features = json_to_vec(require(jf, "obs", where), where + ".obs");
    fr.state.qpos = json_to_vec(require(jf, "qpos", where), where + ".qpos");
    fr.state.qvel = json_to_vec(require(jf, "qvel", where), where + ".qvel");
    fr.state.eeft = json_to_vec(require(jf, "eeft", where), where + ".eeft");
    fr.action.target_pos = json_to_vec(require(jf, "action_pos", where), where + ".action_pos");
    fr.action.target_vel = json_to_vec(require(jf, "action_vel", where), where + ".action_vel");
    traj.frames.push_back(std::move(fr));
    ++idx;
  }
  return traj;
}

}  // namespace

std::string encode_dataset(const Dataset& ds) {
  std::ostringstream out;
  json header;
  header["format"] = "sril-ds";
  header["version"] = kDatasetFormatVersion;
  std::size_t J = 0, G = 0;
  if (!ds.trajectories.empty()) {
    J = joint_dim(ds.trajectories.front());
    G = gripper_dim(ds.trajectories.front());
  }
  header["J"] = J;
  header["G"] = G;
  header["meta"] = ds.meta;
  out << header.dump() << '\n';
  for (const Trajectory& traj : ds.trajectories) out << encode_trajectory(traj).dump() << '\n';
  return out.str();
}

Dataset decode_dataset(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string line;
  int line_no = 0;
  std::string last_complete = "<none>";
  int last_complete_line = 0;

  auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("dataset decode error at line " + std::to_string(line_no) + ": " +
                              what + "; last complete record: " + last_complete + " (line " +
                              std::to_string(last_complete_line) + ")");
  };

  if (!std::getline(in, line)) {
    line_no = 1;
    throw fail("empty input, expected header");
  }
  line_no = 1;
  Dataset ds;
  std::size_t J = 0, G = 0;
  try {
    json header = json::parse(line);
    const std::string fmt = require(header, "format", "header").get<std::string>();
    if (fmt != "sril-ds") throw std::runtime_error("unknown format '" + fmt + "'");
    const int version = require(header, "version", "header").get<int>();
    if (version != kDatasetFormatVersion)
      throw std::runtime_error("version mismatch: expected " +
                               std::to_string(kDatasetFormatVersion) + ", found " +
                               std::to_string(version));
    J = require(header, "J", "header").get<std::size_t>();
    G = require(header, "G", "header").get<std::size_t>();
    for (const auto& [k, v] : require(header, "meta", "header").items())
      ds.meta[k] = v.get<std::string>();
  } catch (const std::exception& e) {
    throw fail(e.what());
  }
  last_complete = "header";
  last_complete_line = 1;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Trajectory traj;
    try {
      traj = decode_trajectory(json::parse(line));
    } catch (const std::exception& e) {
      throw fail(e.what());
    }
    if (!traj.frames.empty()) {
      if (joint_dim(traj) != J)
        throw fail("trajectory '" + traj.id + "' joint dimension " +
                   std::to_string(joint_dim(traj)) + " does not match header J " +
                   std::to_string(J));
      if (gripper_dim(traj) != G)
        throw fail("trajectory '" + traj.id + "' eeft dimension " +
                   std::to_string(gripper_dim(traj)) + " does not match header G " +
                   std::to_string(G));
    }
    last_complete = "trajectory '" + traj.id + "'";
    last_complete_line = line_no;
    ds.trajectories.push_back(std::move(traj));
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << encode_dataset(ds);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_dataset(buf.str());
}

}  // namespace sril
