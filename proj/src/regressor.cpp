#include "sril/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sril/rng.hpp"

namespace sril {

using nlohmann::json;

namespace {

void standardize(std::vector<double>& x, const std::vector<double>& mu,
                 const std::vector<double>& sigma) {
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = sigma[i] > 0.0 ? (x[i] - mu[i]) / sigma[i] : 0.0;
}

void column_stats(const std::vector<double>& rows, std::size_t count, std::size_t dim,
                  std::vector<double>& mu, std::vector<double>& sigma) {
  mu.assign(dim, 0.0);
  sigma.assign(dim, 0.0);
  if (count == 0) return;
  for (std::size_t s = 0; s < count; ++s)
    for (std::size_t d = 0; d < dim; ++d) mu[d] += rows[s * dim + d];
  for (std::size_t d = 0; d < dim; ++d) mu[d] /= static_cast<double>(count);
  for (std::size_t s = 0; s < count; ++s)
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = rows[s * dim + d] - mu[d];
      sigma[d] += v * v;
    }
  for (std::size_t d = 0; d < dim; ++d)
    sigma[d] = std::sqrt(sigma[d] / static_cast<double>(count));
}

struct AdamState {
  std::vector<double> m, v;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_update(std::vector<double>& w, const std::vector<double>& g, AdamState& st,
                 double lr, int t) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < w.size(); ++i) {
    st.m[i] = b1 * st.m[i] + (1.0 - b1) * g[i];
    st.v[i] = b2 * st.v[i] + (1.0 - b2) * g[i] * g[i];
    w[i] -= lr * (st.m[i] / c1) / (std::sqrt(st.v[i] / c2) + eps);
  }
}

void sgd_update(std::vector<double>& w, const std::vector<double>& g, double lr) {
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
}

json doubles_to_json(const std::vector<double>& v) { return json(v); }

std::vector<double> doubles_from_json(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

std::vector<double> assemble_input(const PolicyInput& input) {
  std::vector<double> x;
  x.reserve(input.obs.features.size() + input.state.qpos.size() + input.state.qvel.size() +
            input.state.eeft.size());
  x.insert(x.end(), input.obs.features.begin(), input.obs.features.end());
  x.insert(x.end(), input.state.qpos.begin(), input.state.qpos.end());
  x.insert(x.end(), input.state.qvel.begin(), input.state.qvel.end());
  x.insert(x.end(), input.state.eeft.begin(), input.state.eeft.end());
  return x;
}

std::vector<double> RegressorModel::forward(const std::vector<double>& input) const {
  if (static_cast<int>(input.size()) != in_dim())
    throw std::runtime_error("regressor: input dimension " + std::to_string(input.size()) +
                             " does not match expected " + std::to_string(in_dim()));
  std::vector<double> x = input;
  standardize(x, in_mu, in_sigma);

  std::vector<double> h(static_cast<std::size_t>(hidden));
  for (int i = 0; i < hidden; ++i) {
    double acc = b1[i];
    const double* row = &w1[static_cast<std::size_t>(i) * in_dim()];
    for (int d = 0; d < in_dim(); ++d) acc += row[d] * x[d];
    h[i] = std::tanh(acc);
  }
  std::vector<double> y(static_cast<std::size_t>(out_dim()));
  for (int o = 0; o < out_dim(); ++o) {
    double acc = b2[o];
    const double* row = &w2[static_cast<std::size_t>(o) * hidden];
    for (int i = 0; i < hidden; ++i) acc += row[i] * h[i];
    y[o] = acc * out_sigma[o] + out_mu[o];
  }
  return y;
}

ActionChunk RegressorModel::predict_chunk(const PolicyInput& input, std::int64_t t) const {
  if (static_cast<int>(input.state.qpos.size()) != J)
    throw std::runtime_error("regressor: expected J=" + std::to_string(J) + ", got " +
                             std::to_string(input.state.qpos.size()));
  const std::vector<double> y = forward(assemble_input(input));
  ActionChunk chunk;
  chunk.issued_at = t;
  chunk.actions.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    Action& a = chunk.actions[static_cast<std::size_t>(k)];
    const std::size_t base = static_cast<std::size_t>(k) * 2 * J;
    a.target_pos.assign(y.begin() + base, y.begin() + base + J);
    a.target_vel.assign(y.begin() + base + J, y.begin() + base + 2 * J);
  }
  return chunk;
}

TrainingSet build_training_set(const Dataset& ds, int K) {
  if (K <= 0) throw std::runtime_error("build_training_set: K must be positive");
  if (ds.trajectories.empty()) throw std::runtime_error("build_training_set: empty dataset");

  TrainingSet set;
  const Trajectory& first = ds.trajectories.front();
  if (first.frames.empty()) throw std::runtime_error("build_training_set: empty trajectory");
  set.obs_dim = static_cast<int>(first.frames.front().obs.features.size());
  set.J = static_cast<int>(joint_dim(first));
  set.G = static_cast<int>(gripper_dim(first));
  set.K = K;

  const std::size_t in_dim = static_cast<std::size_t>(set.obs_dim + 2 * set.J + set.G);
  const std::size_t out_dim = static_cast<std::size_t>(K * 2 * set.J);

  for (const Trajectory& traj : ds.trajectories) {
    const std::size_t T = traj.frames.size();
    for (std::size_t i = 0; i < T; ++i) {
      const Frame& fr = traj.frames[i];
      const std::vector<double> x = assemble_input({fr.obs, fr.state});
      if (x.size() != in_dim)
        throw std::runtime_error("build_training_set: inconsistent frame dimensions");
      set.inputs.insert(set.inputs.end(), x.begin(), x.end());
      for (int k = 1; k <= K; ++k) {
        // Targets past the trajectory tail repeat the final action.
        const Frame& target = traj.frames[std::min(i + static_cast<std::size_t>(k), T - 1)];
        set.targets.insert(set.targets.end(), target.action.target_pos.begin(),
                           target.action.target_pos.end());
        set.targets.insert(set.targets.end(), target.action.target_vel.begin(),
                           target.action.target_vel.end());
      }
      ++set.count;
    }
  }
  if (set.targets.size() != set.count * out_dim)
    throw std::runtime_error("build_training_set: inconsistent action dimensions");
  return set;
}

double loss_and_gradient(const RegressorModel& model, const std::vector<double>& inputs,
                         const std::vector<double>& targets, std::size_t count,
                         std::vector<double>& gw1, std::vector<double>& gb1,
                         std::vector<double>& gw2, std::vector<double>& gb2,
                         ParallelMode mode) {
  const int in_dim = model.in_dim();
  const int out_dim = model.out_dim();
  const int hidden = model.hidden;
  if (inputs.size() != count * static_cast<std::size_t>(in_dim) ||
      targets.size() != count * static_cast<std::size_t>(out_dim))
    throw std::runtime_error("loss_and_gradient: shape mismatch");
  if (count == 0) throw std::runtime_error("loss_and_gradient: empty batch");

  gw1.assign(model.w1.size(), 0.0);
  gb1.assign(model.b1.size(), 0.0);
  gw2.assign(model.w2.size(), 0.0);
  gb2.assign(model.b2.size(), 0.0);

  // Per-sample scratch. Stage one fills disjoint rows (sample-parallel);
  // stage two reduces over samples in fixed index order per output row,
  // so the result is bitwise identical for any thread count.
  std::vector<double> xs(count * static_cast<std::size_t>(in_dim));
  std::vector<double> hs(count * static_cast<std::size_t>(hidden));
  std::vector<double> d2(count * static_cast<std::size_t>(out_dim));
  std::vector<double> d1(count * static_cast<std::size_t>(hidden));
  std::vector<double> sample_loss(count, 0.0);

  const double norm = 1.0 / (static_cast<double>(count) * static_cast<double>(out_dim));

  const auto stage_one = [&](std::size_t s) {
    double* x = &xs[s * in_dim];
    for (int d = 0; d < in_dim; ++d) {
      const double v = inputs[s * in_dim + d];
      x[d] = model.in_sigma[d] > 0.0 ? (v - model.in_mu[d]) / model.in_sigma[d] : 0.0;
    }
    double* h = &hs[s * hidden];
    for (int i = 0; i < hidden; ++i) {
      double acc = model.b1[i];
      const double* row = &model.w1[static_cast<std::size_t>(i) * in_dim];
      for (int d = 0; d < in_dim; ++d) acc += row[d] * x[d];
      h[i] = std::tanh(acc);
    }
    double* dd2 = &d2[s * out_dim];
    double loss = 0.0;
    for (int o = 0; o < out_dim; ++o) {
      double acc = model.b2[o];
      const double* row = &model.w2[static_cast<std::size_t>(o) * hidden];
      for (int i = 0; i < hidden; ++i) acc += row[i] * h[i];
      const double y = acc * model.out_sigma[o] + model.out_mu[o];
      const double err = y - targets[s * out_dim + o];
      loss += err * err;
      dd2[o] = 2.0 * err * model.out_sigma[o] * norm;
    }
    sample_loss[s] = loss;
    double* dd1 = &d1[s * hidden];
    for (int i = 0; i < hidden; ++i) {
      double acc = 0.0;
      for (int o = 0; o < out_dim; ++o)
        acc += dd2[o] * model.w2[static_cast<std::size_t>(o) * hidden + i];
      dd1[i] = acc * (1.0 - h[i] * h[i]);
    }
  };

  const auto reduce_w2_row = [&](int o) {
    double* grow = &gw2[static_cast<std::size_t>(o) * hidden];
    double gb = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      const double delta = d2[s * out_dim + o];
      const double* h = &hs[s * hidden];
      for (int i = 0; i < hidden; ++i) grow[i] += delta * h[i];
      gb += delta;
    }
    gb2[o] = gb;
  };

  const auto reduce_w1_row = [&](int i) {
    double* grow = &gw1[static_cast<std::size_t>(i) * in_dim];
    double gb = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      const double delta = d1[s * hidden + i];
      const double* x = &xs[s * in_dim];
      for (int d = 0; d < in_dim; ++d) grow[d] += delta * x[d];
      gb += delta;
    }
    gb1[i] = gb;
  };

  if (mode == ParallelMode::OpenMp) {
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(count); ++s)
      stage_one(static_cast<std::size_t>(s));
#pragma omp parallel for schedule(static)
    for (int o = 0; o < out_dim; ++o) reduce_w2_row(o);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < hidden; ++i) reduce_w1_row(i);
  } else {
    for (std::size_t s = 0; s < count; ++s) stage_one(s);
    for (int o = 0; o < out_dim; ++o) reduce_w2_row(o);
    for (int i = 0; i < hidden; ++i) reduce_w1_row(i);
  }

  double total = 0.0;
  for (std::size_t s = 0; s < count; ++s) total += sample_loss[s];
  return total * norm;
}

double batch_loss(const RegressorModel& model, const std::vector<double>& inputs,
                  const std::vector<double>& targets, std::size_t count) {
  const int in_dim = model.in_dim();
  const int out_dim = model.out_dim();
  double total = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const std::vector<double> x(inputs.begin() + s * in_dim, inputs.begin() + (s + 1) * in_dim);
    const std::vector<double> y = model.forward(x);
    for (int o = 0; o < out_dim; ++o) {
      const double err = y[o] - targets[s * out_dim + o];
      total += err * err;
    }
  }
  return total / (static_cast<double>(count) * static_cast<double>(out_dim));
}

TrainResult train_regressor(const Dataset& ds, const TrainOptions& opts) {
  if (opts.K <= 0) throw std::runtime_error("train_regressor: K must be positive");
  if (opts.hidden <= 0) throw std::runtime_error("train_regressor: hidden width must be positive");
  const TrainingSet set = build_training_set(ds, opts.K);

  RegressorModel model;
  model.obs_dim = set.obs_dim;
  model.J = set.J;
  model.G = set.G;
  model.K = set.K;
  model.hidden = opts.hidden;
  model.layout = ds.trajectories.front().layout;
  model.action_stats = compute_action_stats(ds);

  const std::size_t in_dim = static_cast<std::size_t>(model.in_dim());
  const std::size_t out_dim = static_cast<std::size_t>(model.out_dim());
  column_stats(set.inputs, set.count, in_dim, model.in_mu, model.in_sigma);
  column_stats(set.targets, set.count, out_dim, model.out_mu, model.out_sigma);

  Rng rng(opts.seed);
  const double a1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
  const double a2 = 1.0 / std::sqrt(static_cast<double>(model.hidden));
  model.w1.resize(static_cast<std::size_t>(model.hidden) * in_dim);
  model.b1.assign(static_cast<std::size_t>(model.hidden), 0.0);
  model.w2.resize(out_dim * static_cast<std::size_t>(model.hidden));
  model.b2.assign(out_dim, 0.0);
  for (double& w : model.w1) w = rng.uniform(-a1, a1);
  for (double& w : model.w2) w = rng.uniform(-a2, a2);

  const std::size_t batch =
      opts.batch <= 0 ? set.count : std::min<std::size_t>(set.count, opts.batch);

  std::vector<std::size_t> order(set.count);
  for (std::size_t i = 0; i < set.count; ++i) order[i] = i;

  std::vector<double> bin(batch * in_dim), btgt(batch * out_dim);
  std::vector<double> gw1, gb1, gw2, gb2;
  AdamState aw1(model.w1.size()), ab1(model.b1.size()), aw2(model.w2.size()),
      ab2(model.b2.size());
  int step = 0;

  TrainResult result;
  result.loss_curve.reserve(static_cast<std::size_t>(opts.epochs));
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (std::size_t i = set.count; i > 1; --i) {
      const std::size_t j = rng.next_below(i);
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t epoch_samples = 0;
    for (std::size_t start = 0; start < set.count; start += batch) {
      const std::size_t n = std::min(batch, set.count - start);
      bin.resize(n * in_dim);
      btgt.resize(n * out_dim);
      for (std::size_t s = 0; s < n; ++s) {
        const std::size_t src = order[start + s];
        std::copy_n(&set.inputs[src * in_dim], in_dim, &bin[s * in_dim]);
        std::copy_n(&set.targets[src * out_dim], out_dim, &btgt[s * out_dim]);
      }
      const double loss =
          loss_and_gradient(model, bin, btgt, n, gw1, gb1, gw2, gb2, opts.mode);
      ++step;
      if (opts.optimizer == Optimizer::Adam) {
        adam_update(model.w1, gw1, aw1, opts.learning_rate, step);
        adam_update(model.b1, gb1, ab1, opts.learning_rate, step);
        adam_update(model.w2, gw2, aw2, opts.learning_rate, step);
        adam_update(model.b2, gb2, ab2, opts.learning_rate, step);
      } else {
        sgd_update(model.w1, gw1, opts.learning_rate);
        sgd_update(model.b1, gb1, opts.learning_rate);
        sgd_update(model.w2, gw2, opts.learning_rate);
        sgd_update(model.b2, gb2, opts.learning_rate);
      }
      epoch_loss += loss * static_cast<double>(n);
      epoch_samples += n;
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(epoch_samples));
  }

  model.meta["hidden"] = std::to_string(opts.hidden);
  model.meta["epochs"] = std::to_string(opts.epochs);
  model.meta["batch"] = std::to_string(opts.batch);
  model.meta["K"] = std::to_string(opts.K);
  model.meta["seed"] = std::to_string(opts.seed);
  model.meta["optimizer"] = opts.optimizer == Optimizer::Adam ? "adam" : "sgd";
  {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", opts.learning_rate);
    model.meta["learning_rate"] = buf;
  }
  result.model = std::move(model);
  return result;
}

std::string encode_checkpoint(const RegressorModel& model) {
  json j;
  j["format"] = "sril-policy";
  j["version"] = 1;
  j["obs_dim"] = model.obs_dim;
  j["J"] = model.J;
  j["G"] = model.G;
  j["K"] = model.K;
  j["hidden"] = model.hidden;
  j["activation"] = "tanh";
  j["w1"] = doubles_to_json(model.w1);
  j["b1"] = doubles_to_json(model.b1);
  j["w2"] = doubles_to_json(model.w2);
  j["b2"] = doubles_to_json(model.b2);
  j["in_mu"] = doubles_to_json(model.in_mu);
  j["in_sigma"] = doubles_to_json(model.in_sigma);
  j["out_mu"] = doubles_to_json(model.out_mu);
  j["out_sigma"] = doubles_to_json(model.out_sigma);
  j["action_mu"] = doubles_to_json(model.action_stats.mu);
  j["action_sigma"] = doubles_to_json(model.action_stats.sigma);
  json layout = json::array();
  for (const LayoutField& f : model.layout) layout.push_back({f.name, f.offset, f.length});
  j["layout"] = layout;
  j["meta"] = model.meta;
  return j.dump() + "\n";
}

RegressorModel decode_checkpoint(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("checkpoint decode error: ") + e.what());
  }
  if (j.value("format", "") != "sril-policy")
    throw std::runtime_error("checkpoint decode error: unknown format");
  const int version = j.value("version", -1);
  if (version != 1)
    throw std::runtime_error("checkpoint decode error: version mismatch: expected 1, found " +
                             std::to_string(version));
  RegressorModel m;
  m.obs_dim = j.at("obs_dim").get<int>();
  m.J = j.at("J").get<int>();
  m.G = j.at("G").get<int>();
  m.K = j.at("K").get<int>();
  m.hidden = j.at("hidden").get<int>();
  m.w1 = doubles_from_json(j.at("w1"));
  m.b1 = doubles_from_json(j.at("b1"));
  m.w2 = doubles_from_json(j.at("w2"));
  m.b2 = doubles_from_json(j.at("b2"));
  m.in_mu = doubles_from_json(j.at("in_mu"));
  m.in_sigma = doubles_from_json(j.at("in_sigma"));
  m.out_mu = doubles_from_json(j.at("out_mu"));
  m.out_sigma = doubles_from_json(j.at("out_sigma"));
  m.action_stats.mu = doubles_from_json(j.at("action_mu"));
  m.action_stats.sigma = doubles_from_json(j.at("action_sigma"));
  for (const auto& f : j.at("layout"))
    m.layout.push_back({f[0].get<std::string>(), f[1].get<int>(), f[2].get<int>()});
  for (const auto& [k, v] : j.at("meta").items()) m.meta[k] = v.get<std::string>();
  if (m.w1.size() != static_cast<std::size_t>(m.hidden) * m.in_dim() ||
      m.w2.size() != static_cast<std::size_t>(m.out_dim()) * m.hidden)
    throw std::runtime_error("checkpoint decode error: weight shapes do not match dimensions");
  return m;
}

void save_checkpoint(const RegressorModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << encode_checkpoint(model);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

RegressorModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace sril
