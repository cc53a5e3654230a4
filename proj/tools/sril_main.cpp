#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "sril/cli_commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sril: importance-driven demo downsampling, chunk-policy training, and a "
               "skip/infer execution engine on a planar dual-arm simulator"};
  app.require_subcommand(1);

  sril::GenDemosOptions gen;
  auto* cmd_gen = app.add_subcommand("gen-demos", "generate scripted expert demonstrations");
  cmd_gen->add_option("--task", gen.task, "cube_transfer or bimanual_restore");
  cmd_gen->add_option("--n", gen.n, "number of demos");
  cmd_gen->add_option("--seed", gen.seed, "first demo seed (demo i uses seed+i)");
  cmd_gen->add_option("--fs", gen.fs_hz, "control rate, Hz");
  cmd_gen->add_option("--out", gen.out, "output dataset file")->required();
  cmd_gen->add_option("--env-config", gen.env_config, "key=value environment overrides");

  sril::DownsampleOptions ds;
  auto* cmd_ds = app.add_subcommand("downsample", "importance-driven trajectory downsampling");
  cmd_ds->add_option("--in", ds.in, "input dataset")->required();
  cmd_ds->add_option("--out", ds.out, "output dataset")->required();
  cmd_ds->add_option("--fm", ds.fm_hz, "target minimum sampling frequency, Hz");
  cmd_ds->add_option("--filter-order", ds.filter_order, "Butterworth order");
  cmd_ds->add_option("--cutoff-hz", ds.cutoff_hz, "Butterworth cutoff, Hz");
  cmd_ds->add_flag("!--no-zero-phase", ds.zero_phase, "single forward pass instead of filtfilt");
  cmd_ds->add_option("--normalization", ds.normalization, "min_max or z_score");
  cmd_ds->add_option("--aggregation", ds.aggregation, "per_trajectory or aligned_mean");
  cmd_ds->add_option("--weights", ds.weights,
                     "'manipulator' (default), 'uniform', or a comma-separated list "
                     "(normalized to sum 1)");
  cmd_ds->add_option("--report", ds.report, "compression report file");

  sril::TrainCmdOptions tr;
  auto* cmd_tr = app.add_subcommand("train", "train the chunk regressor");
  cmd_tr->add_option("--in", tr.in, "training dataset")->required();
  cmd_tr->add_option("--out", tr.out, "checkpoint file")->required();
  cmd_tr->add_option("--hidden", tr.hidden, "hidden width");
  cmd_tr->add_option("--epochs", tr.epochs, "training epochs");
  cmd_tr->add_option("--batch", tr.batch, "mini-batch size (0 = full batch)");
  cmd_tr->add_option("--chunk", tr.chunk, "action chunk length K");
  cmd_tr->add_option("--learning-rate", tr.learning_rate, "step size");
  cmd_tr->add_option("--seed", tr.seed, "initialization/shuffle seed");
  cmd_tr->add_option("--optimizer", tr.optimizer, "adam or sgd");
  cmd_tr->add_option("--loss-curve", tr.loss_curve, "two-column epoch/loss output");

  sril::RolloutOptions ro;
  auto* cmd_ro = app.add_subcommand("rollout", "evaluate a checkpoint over seeded episodes");
  cmd_ro->add_option("--checkpoint", ro.checkpoint, "policy checkpoint")->required();
  cmd_ro->add_option("--task", ro.task, "cube_transfer or bimanual_restore");
  cmd_ro->add_option("--episodes", ro.episodes, "episode count");
  cmd_ro->add_option("--seed", ro.seed, "first episode seed");
  cmd_ro->add_flag("--no-offload", ro.no_offload, "plain chunk-ensemble baseline");
  cmd_ro->add_option("--cot", ro.cot, "cognitive offloading threshold");
  cmd_ro->add_option("--mced", ro.mced, "minimum overlapping predictions before skipping");
  cmd_ro->add_option("--mcod", ro.mcod, "max consecutive skips (0 = chunk length)");
  cmd_ro->add_option("--m", ro.m, "temporal ensemble decay");
  cmd_ro->add_option("--predicate", ro.predicate, "agreement_gated or literal");
  cmd_ro->add_option("--l-inf", ro.l_inf_ms, "modeled inference cost, ms");
  cmd_ro->add_option("--l-step", ro.l_step_ms, "modeled step cost, ms");
  cmd_ro->add_option("--out", ro.out, "per-episode report file");
  cmd_ro->add_option("--dump-traces", ro.dump_traces, "write replay frames as a dataset");
  cmd_ro->add_option("--env-config", ro.env_config, "key=value environment overrides");

  sril::SweepOptions sw;
  auto* cmd_sw = app.add_subcommand("sweep", "COT x MCOD grid evaluation");
  cmd_sw->add_option("--checkpoint", sw.checkpoint, "policy checkpoint")->required();
  cmd_sw->add_option("--task", sw.task, "cube_transfer or bimanual_restore");
  cmd_sw->add_option("--episodes", sw.episodes, "episodes per cell");
  cmd_sw->add_option("--seed", sw.seed, "first episode seed (paired across cells)");
  cmd_sw->add_option("--cot-grid", sw.cot_grid, "comma-separated COT values");
  cmd_sw->add_option("--mcod-grid", sw.mcod_grid, "comma-separated MCOD values");
  cmd_sw->add_option("--mced", sw.mced, "minimum overlapping predictions before skipping");
  cmd_sw->add_option("--m", sw.m, "temporal ensemble decay");
  cmd_sw->add_option("--predicate", sw.predicate, "agreement_gated or literal");
  cmd_sw->add_option("--l-inf", sw.l_inf_ms, "modeled inference cost, ms");
  cmd_sw->add_option("--l-step", sw.l_step_ms, "modeled step cost, ms");
  cmd_sw->add_option("--out", sw.out, "cell table (CSV)")->required();
  cmd_sw->add_option("--env-config", sw.env_config, "key=value environment overrides");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_gen->parsed()) sril::cmd_gen_demos(gen);
    if (cmd_ds->parsed()) sril::cmd_downsample(ds);
    if (cmd_tr->parsed()) sril::cmd_train(tr);
    if (cmd_ro->parsed()) sril::cmd_rollout(ro);
    if (cmd_sw->parsed()) sril::cmd_sweep(sw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
