// Times the OpenMP kernels against their serial reference paths and
// checks that both produce identical results.

#include <chrono>
#include <cstdio>
#include <functional>

#include "sril/downsampler.hpp"
#include "sril/evaluation.hpp"
#include "sril/expert.hpp"
#include "sril/regressor.hpp"

using namespace sril;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  const auto start = clock_type::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto stop = clock_type::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() /
         static_cast<double>(reps);
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-24s serial %9.2f ms   openmp %9.2f ms   speedup %5.2fx   identical: %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "yes" : "NO");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", max_threads());

  const TaskSpec task = TaskSpec::make(TaskName::BimanualRestore);
  const SimParams params = SimParams::defaults();
  const Dataset demos = generate_demo_dataset(task, params, 16, 0);

  // Kernel 1: per-trajectory dataset downsampling.
  {
    SpamConfig spam;
    spam.weights = SpamConfig::manipulator_weights(6, 2);
    Dataset serial_out, parallel_out;
    const double serial_ms = time_ms(
        [&] {
          serial_out = downsample_dataset(demos, spam, FilterConfig{}, SampleConfig{},
                                          ParallelMode::Serial);
        },
        5);
    const double parallel_ms = time_ms(
        [&] {
          parallel_out = downsample_dataset(demos, spam, FilterConfig{}, SampleConfig{},
                                            ParallelMode::OpenMp);
        },
        5);
    report("downsample_dataset", serial_ms, parallel_ms, serial_out == parallel_out);
  }

  // Kernel 2: batch loss/gradient of the chunk regressor.
  {
    TrainOptions init;
    init.hidden = 96;
    init.epochs = 0;  // initialized weights only
    init.K = 20;
    const RegressorModel model = train_regressor(demos, init).model;
    const TrainingSet set = build_training_set(demos, 20);

    std::vector<double> sw1, sb1, sw2, sb2, pw1, pb1, pw2, pb2;
    double serial_loss = 0.0, parallel_loss = 0.0;
    const double serial_ms = time_ms(
        [&] {
          serial_loss = loss_and_gradient(model, set.inputs, set.targets, set.count, sw1, sb1,
                                          sw2, sb2, ParallelMode::Serial);
        },
        3);
    const double parallel_ms = time_ms(
        [&] {
          parallel_loss = loss_and_gradient(model, set.inputs, set.targets, set.count, pw1,
                                            pb1, pw2, pb2, ParallelMode::OpenMp);
        },
        3);
    const bool identical = serial_loss == parallel_loss && sw1 == pw1 && sb1 == pb1 &&
                           sw2 == pw2 && sb2 == pb2;
    report("batch_gradient", serial_ms, parallel_ms, identical);
  }

  // Kernel 3: seeded episode evaluation.
  {
    ScriptedExpert policy(task, params, 20);
    const ActionStats stats = compute_action_stats(demos);
    EvalConfig cfg;
    cfg.task = task;
    cfg.params = params;
    cfg.episodes = 8;
    std::vector<EpisodeReport> serial_reports, parallel_reports;
    const double serial_ms = time_ms(
        [&] { serial_reports = evaluate_episodes(policy, stats, cfg, ParallelMode::Serial); },
        2);
    const double parallel_ms = time_ms(
        [&] { parallel_reports = evaluate_episodes(policy, stats, cfg, ParallelMode::OpenMp); },
        2);
    bool identical = serial_reports.size() == parallel_reports.size();
    for (std::size_t i = 0; identical && i < serial_reports.size(); ++i)
      identical = serial_reports[i].executed == parallel_reports[i].executed &&
                  serial_reports[i].success == parallel_reports[i].success;
    report("evaluate_episodes", serial_ms, parallel_ms, identical);
  }

  return 0;
}
