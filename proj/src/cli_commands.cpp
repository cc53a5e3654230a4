#include "sril/cli_commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sril/dataset_io.hpp"
#include "sril/downsampler.hpp"
#include "sril/evaluation.hpp"
#include "sril/executor.hpp"
#include "sril/expert.hpp"
#include "sril/regressor.hpp"
#include "sril/simenv.hpp"

namespace sril {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> parts;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

NormalizationMode parse_normalization(const std::string& s) {
  if (s == "min_max") return NormalizationMode::MinMax;
  if (s == "z_score") return NormalizationMode::ZScore;
  throw std::runtime_error("unknown normalization '" + s + "' (min_max or z_score)");
}

AggregationMode parse_aggregation(const std::string& s) {
  if (s == "per_trajectory") return AggregationMode::PerTrajectory;
  if (s == "aligned_mean") return AggregationMode::AlignedMean;
  throw std::runtime_error("unknown aggregation '" + s + "' (per_trajectory or aligned_mean)");
}

PredicateMode parse_predicate(const std::string& s) {
  if (s == "agreement_gated") return PredicateMode::AgreementGated;
  if (s == "literal") return PredicateMode::Literal;
  throw std::runtime_error("unknown predicate '" + s + "' (agreement_gated or literal)");
}

struct EnvSetup {
  TaskSpec task;
  SimParams params;
};

EnvSetup make_env(const std::string& task_name, const std::string& env_config, double fs_hz) {
  EnvSetup setup;
  setup.task = TaskSpec::make(parse_task_name(task_name));
  setup.params = SimParams::defaults();
  setup.params.fs_hz = fs_hz;
  if (!env_config.empty()) apply_env_config(env_config, setup.task, setup.params);
  return setup;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  for (const std::string& item : split_csv(csv)) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  for (const std::string& item : split_csv(csv)) out.push_back(std::stoi(item));
  return out;
}

void cmd_gen_demos(const GenDemosOptions& opts) {
  if (opts.n <= 0) throw std::runtime_error("n must be positive");
  if (opts.out.empty()) throw std::runtime_error("--out is required");
  const EnvSetup env = make_env(opts.task, opts.env_config, opts.fs_hz);

  Dataset ds = generate_demo_dataset(env.task, env.params, opts.n, opts.seed);
  save_dataset(ds, opts.out);

  std::size_t frames = 0;
  for (const auto& traj : ds.trajectories) frames += traj.frames.size();
  std::cout << "wrote " << ds.trajectories.size() << " demos (" << frames << " frames, task "
            << opts.task << ", seeds " << opts.seed << ".." << opts.seed + opts.n - 1
            << ") to " << opts.out << "\n";
}

void cmd_downsample(const DownsampleOptions& opts) {
  if (opts.in.empty() || opts.out.empty())
    throw std::runtime_error("--in and --out are required");
  const Dataset ds = load_dataset(opts.in);
  if (ds.trajectories.empty()) throw std::runtime_error("input dataset is empty");

  const std::size_t J = joint_dim(ds.trajectories.front());
  const std::size_t G = gripper_dim(ds.trajectories.front());

  SpamConfig spam;
  spam.normalization = parse_normalization(opts.normalization);
  spam.aggregation = parse_aggregation(opts.aggregation);
  if (opts.weights == "manipulator") {
    spam.weights = SpamConfig::manipulator_weights(J, G);
  } else if (opts.weights == "uniform") {
    spam.weights = SpamConfig::uniform_weights(J, G);
  } else {
    spam.weights = parse_double_list(opts.weights);
    double sum = 0.0;
    for (double w : spam.weights) sum += w;
    if (sum <= 0.0) throw std::runtime_error("weights must have a positive sum");
    for (double& w : spam.weights) w /= sum;
  }

  FilterConfig filter{opts.filter_order, opts.cutoff_hz, opts.zero_phase};
  const double fd = ds.trajectories.front().fs_hz;
  if (!(opts.fm_hz > 0.0) || opts.fm_hz > fd)
    throw std::runtime_error("fm must satisfy 0 < fm <= dataset sampling rate");
  SampleConfig sample{fd, opts.fm_hz};

  DownsampleReport report;
  const Dataset out = downsample_dataset(ds, spam, filter, sample, ParallelMode::OpenMp, &report);
  save_dataset(out, opts.out);

  json cfg;
  cfg["command"] = "downsample";
  cfg["in"] = opts.in;
  cfg["fm_hz"] = opts.fm_hz;
  cfg["filter_order"] = opts.filter_order;
  cfg["cutoff_hz"] = opts.cutoff_hz;
  cfg["zero_phase"] = opts.zero_phase;
  cfg["normalization"] = opts.normalization;
  cfg["aggregation"] = opts.aggregation;
  cfg["weights"] = spam.weights;

  if (!opts.report.empty()) {
    std::ofstream rep = open_out(opts.report);
    rep << "# sril-downsample-report v1\n";
    rep << "# config " << cfg.dump() << "\n";
    rep << "id,original_frames,retained_frames,retained_fraction,mean_stride\n";
    for (const auto& st : report.per_trajectory) {
      rep << st.id << "," << st.original_frames << "," << st.retained_frames << ","
          << fmt(static_cast<double>(st.retained_frames) /
                 static_cast<double>(st.original_frames))
          << "," << fmt(st.mean_stride) << "\n";
    }
    rep << "# stride_histogram";
    for (const auto& [gap, count] : report.stride_histogram)
      rep << " " << gap << ":" << count;
    rep << "\n";
    rep << "# overall retained " << report.total_retained << "/" << report.total_original
        << " = " << fmt(report.retained_fraction()) << "\n";
  }

  std::cout << "retained " << report.total_retained << "/" << report.total_original
            << " frames (" << fmt(report.retained_fraction()) << ") -> " << opts.out << "\n";
}

void cmd_train(const TrainCmdOptions& opts) {
  if (opts.in.empty() || opts.out.empty())
    throw std::runtime_error("--in and --out are required");
  const Dataset ds = load_dataset(opts.in);

  TrainOptions train;
  train.hidden = opts.hidden;
  train.epochs = opts.epochs;
  train.batch = opts.batch;
  train.K = opts.chunk;
  train.learning_rate = opts.learning_rate;
  train.seed = opts.seed;
  if (opts.optimizer == "adam") {
    train.optimizer = Optimizer::Adam;
  } else if (opts.optimizer == "sgd") {
    train.optimizer = Optimizer::Sgd;
  } else {
    throw std::runtime_error("unknown optimizer '" + opts.optimizer + "' (adam or sgd)");
  }

  TrainResult result = train_regressor(ds, train);
  result.model.meta["source_dataset"] = opts.in;
  save_checkpoint(result.model, opts.out);

  if (!opts.loss_curve.empty()) {
    json cfg;
    cfg["command"] = "train";
    cfg["in"] = opts.in;
    cfg["hidden"] = opts.hidden;
    cfg["epochs"] = opts.epochs;
    cfg["batch"] = opts.batch;
    cfg["chunk"] = opts.chunk;
    cfg["learning_rate"] = opts.learning_rate;
    cfg["seed"] = opts.seed;
    cfg["optimizer"] = opts.optimizer;
    std::ofstream curve = open_out(opts.loss_curve);
    curve << "# sril-loss-curve v1\n";
    curve << "# config " << cfg.dump() << "\n";
    for (std::size_t e = 0; e < result.loss_curve.size(); ++e)
      curve << e << " " << fmt(result.loss_curve[e]) << "\n";
  }

  std::cout << "trained " << result.model.hidden << "-unit regressor (K=" << result.model.K
            << ") on " << ds.trajectories.size() << " trajectories; loss "
            << fmt(result.loss_curve.front()) << " -> " << fmt(result.loss_curve.back())
            << "; checkpoint " << opts.out << "\n";
}

namespace {

json offload_config_json(const RolloutOptions& opts) {
  json cfg;
  cfg["command"] = "rollout";
  cfg["checkpoint"] = opts.checkpoint;
  cfg["task"] = opts.task;
  cfg["episodes"] = opts.episodes;
  cfg["seed"] = opts.seed;
  cfg["no_offload"] = opts.no_offload;
  cfg["cot"] = opts.cot;
  cfg["mced"] = opts.mced;
  cfg["mcod"] = opts.mcod;
  cfg["m"] = opts.m;
  cfg["predicate"] = opts.predicate;
  cfg["l_inf_ms"] = opts.l_inf_ms;
  cfg["l_step_ms"] = opts.l_step_ms;
  return cfg;
}

void write_aggregate(std::ostream& out, const Aggregate& agg) {
  json j;
  j["episodes"] = agg.episodes;
  j["success_rate"] = agg.success_rate;
  if (std::isnan(agg.mean_cost_ms)) {
    j["mean_cost_ms"] = "nan";
  } else {
    j["mean_cost_ms"] = agg.mean_cost_ms;
  }
  j["mean_inference"] = agg.mean_inference;
  j["mean_steps"] = agg.mean_steps;
  j["mean_skip_fraction"] = agg.mean_skip_fraction;
  out << "# aggregate " << j.dump() << "\n";
}

}  // namespace

void cmd_rollout(const RolloutOptions& opts) {
  if (opts.checkpoint.empty()) throw std::runtime_error("--checkpoint is required");
  const RegressorModel model = load_checkpoint(opts.checkpoint);
  const EnvSetup env = make_env(opts.task, opts.env_config, 50.0);

  EvalConfig cfg;
  cfg.task = env.task;
  cfg.params = env.params;
  cfg.episodes = opts.episodes;
  cfg.base_seed = opts.seed;
  cfg.offload = !opts.no_offload;
  cfg.offload_cfg.cot = opts.cot;
  cfg.offload_cfg.mced = opts.mced;
  cfg.offload_cfg.mcod = opts.mcod;
  cfg.offload_cfg.m = opts.m;
  cfg.offload_cfg.predicate = parse_predicate(opts.predicate);
  cfg.latency.l_inf_ms = opts.l_inf_ms;
  cfg.latency.l_step_ms = opts.l_step_ms;
  cfg.episode_options.record_actions = false;
  cfg.episode_options.record_trace = false;
  cfg.episode_options.record_frames = !opts.dump_traces.empty();

  const auto reports = evaluate_episodes(model, model.action_stats, cfg);
  const Aggregate agg = aggregate(reports);

  if (!opts.out.empty()) {
    std::ofstream out = open_out(opts.out);
    out << "# sril-rollout v1\n";
    out << "# config " << offload_config_json(opts).dump() << "\n";
    out << "seed,success,steps,inferences,skips,cost_time_ms\n";
    for (const auto& r : reports) {
      out << r.seed << "," << (r.success ? 1 : 0) << "," << r.step_count << ","
          << r.inference_count << "," << r.skip_count << "," << fmt(r.cost_time_ms) << "\n";
    }
    write_aggregate(out, agg);
  }

  if (!opts.dump_traces.empty()) {
    Dataset traces;
    traces.meta["source"] = "rollout";
    traces.meta["checkpoint"] = opts.checkpoint;
    traces.meta["task"] = opts.task;
    for (const auto& r : reports) {
      Trajectory traj;
      traj.id = "rollout-" + std::to_string(r.seed);
      traj.fs_hz = env.params.fs_hz;
      traj.layout = model.layout;
      traj.frames = r.frames;
      traces.trajectories.push_back(std::move(traj));
    }
    save_dataset(traces, opts.dump_traces);
  }

  std::cout << "episodes " << agg.episodes << "  success " << fmt(agg.success_rate)
            << "  mean_cost_ms " << fmt(agg.mean_cost_ms) << "  mean_inferences "
            << fmt(agg.mean_inference) << "  mean_skip_fraction "
            << fmt(agg.mean_skip_fraction) << "\n";
}

void cmd_sweep(const SweepOptions& opts) {
  if (opts.checkpoint.empty()) throw std::runtime_error("--checkpoint is required");
  if (opts.out.empty()) throw std::runtime_error("--out is required");
  const RegressorModel model = load_checkpoint(opts.checkpoint);
  const EnvSetup env = make_env(opts.task, opts.env_config, 50.0);

  const std::vector<double> cots =
      opts.cot_grid.empty() ? default_cot_grid() : parse_double_list(opts.cot_grid);
  const std::vector<int> mcods =
      opts.mcod_grid.empty() ? default_mcod_grid(model.K) : parse_int_list(opts.mcod_grid);
  if (cots.empty() || mcods.empty()) throw std::runtime_error("parameter grids must be non-empty");

  EvalConfig base;
  base.task = env.task;
  base.params = env.params;
  base.episodes = opts.episodes;
  base.base_seed = opts.seed;
  base.offload_cfg.mced = opts.mced;
  base.offload_cfg.m = opts.m;
  base.offload_cfg.predicate = parse_predicate(opts.predicate);
  base.latency.l_inf_ms = opts.l_inf_ms;
  base.latency.l_step_ms = opts.l_step_ms;
  base.episode_options.record_actions = false;
  base.episode_options.record_trace = false;

  const auto cells = sweep_offload(model, model.action_stats, base, cots, mcods);

  json cfg;
  cfg["command"] = "sweep";
  cfg["checkpoint"] = opts.checkpoint;
  cfg["task"] = opts.task;
  cfg["episodes"] = opts.episodes;
  cfg["seed"] = opts.seed;
  cfg["cot_grid"] = cots;
  cfg["mcod_grid"] = mcods;
  cfg["mced"] = opts.mced;
  cfg["m"] = opts.m;
  cfg["predicate"] = opts.predicate;
  cfg["l_inf_ms"] = opts.l_inf_ms;
  cfg["l_step_ms"] = opts.l_step_ms;

  std::ofstream out = open_out(opts.out);
  out << "# sril-sweep v1\n";
  out << "# config " << cfg.dump() << "\n";
  out << "mcod,cot,episodes,success_rate,mean_cost_ms,mean_inference,mean_skip_fraction\n";
  for (const auto& cell : cells) {
    out << cell.mcod << "," << fmt(cell.cot) << "," << cell.agg.episodes << ","
        << fmt(cell.agg.success_rate) << "," << fmt(cell.agg.mean_cost_ms) << ","
        << fmt(cell.agg.mean_inference) << "," << fmt(cell.agg.mean_skip_fraction) << "\n";
  }

  std::cout << "sweep over " << mcods.size() << " mcod x " << cots.size() << " cot cells, "
            << opts.episodes << " episodes each -> " << opts.out << "\n";
  std::printf("%6s %10s %8s %12s %10s %6s\n", "mcod", "cot", "success", "cost_ms", "infer",
              "skip");
  for (const auto& cell : cells) {
    std::printf("%6d %10.4g %8.2f %12.1f %10.1f %6.2f\n", cell.mcod, cell.cot,
                cell.agg.success_rate, cell.agg.mean_cost_ms, cell.agg.mean_inference,
                cell.agg.mean_skip_fraction);
  }
}

}  // namespace sril
