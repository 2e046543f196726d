// biovolt command-line front-end. All work happens behind the C API; this
// file only parses flags, assembles the configuration and maps statuses to
// exit codes (0 ok, 1 config, 2 I/O, 3 numerical, 4 invalid use, 5 other).

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biovolt/biovolt.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string scenario;
  std::int64_t seed = -1;
  std::string out_dir = "out";
  std::vector<std::string> sets;
  int snapshots = -1;
  bool deterministic = false;  // execution is always serial; kept as a contract flag
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "Configuration file (TOML-style key tree)");
  cmd->add_option("--scenario", o.scenario,
                  "Scenario name (cell-homeostasis, tissue-pattern, heart-recovery)");
  cmd->add_option("--seed", o.seed, "Base random seed");
  cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--set", o.sets, "Override a config key, dotted.path=value (repeatable)");
  cmd->add_option("--snapshots", o.snapshots, "Write a tissue snapshot every k steps");
  cmd->add_flag("--deterministic", o.deterministic,
                "Force fully serial, bit-reproducible execution (the default)");
}

using ConfigPtr = std::unique_ptr<bv_config, decltype(&bv_config_destroy)>;

int fail(bv_status status) {
  std::fprintf(stderr, "error: %s\n", bv_last_error());
  return static_cast<int>(status);
}

/// Precedence, lowest to highest: file, BIOVOLT_* environment, flags, --set.
int build_config(const CommonOpts& o, ConfigPtr& out) {
  bv_config* raw = nullptr;
  bv_status st = o.config_path.empty() ? bv_config_create(&raw)
                                       : bv_config_load(o.config_path.c_str(), &raw);
  if (st != BV_OK) return fail(st);
  out = ConfigPtr(raw, &bv_config_destroy);
  if ((st = bv_config_apply_env(raw)) != BV_OK) return fail(st);
  std::vector<std::string> kvs;
  if (!o.scenario.empty()) kvs.push_back("scenario=" + o.scenario);
  if (o.seed >= 0) kvs.push_back("seed=" + std::to_string(o.seed));
  if (o.snapshots >= 0) kvs.push_back("snapshots=" + std::to_string(o.snapshots));
  kvs.insert(kvs.end(), o.sets.begin(), o.sets.end());
  for (const std::string& kv : kvs) {
    if ((st = bv_config_set(raw, kv.c_str())) != BV_OK) return fail(st);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"biovolt: bioelectric tissue digital twin, RL environment and causal toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bv_version());

  CommonOpts sim_o, train_o, eval_o, causal_o;
  CLI::App* sim = app.add_subcommand("simulate", "Roll out episodes and write logs");
  add_common(sim, sim_o);
  CLI::App* train = app.add_subcommand("train", "Train a policy and write checkpoints");
  add_common(train, train_o);
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval, eval_o);
  std::string checkpoint;
  eval->add_option("--checkpoint", checkpoint, "Policy checkpoint to evaluate");
  CLI::App* causal = app.add_subcommand("causal", "Back-door adjustment over episode logs");
  add_common(causal, causal_o);

  CLI11_PARSE(app, argc, argv);

  ConfigPtr cfg(nullptr, &bv_config_destroy);
  bv_status st = BV_OK;
  if (sim->parsed()) {
    if (int rc = build_config(sim_o, cfg)) return rc;
    st = bv_cmd_simulate(cfg.get(), sim_o.out_dir.c_str());
    if (st == BV_OK) std::printf("wrote episode logs to %s\n", sim_o.out_dir.c_str());
  } else if (train->parsed()) {
    if (int rc = build_config(train_o, cfg)) return rc;
    st = bv_cmd_train(cfg.get(), train_o.out_dir.c_str());
    if (st == BV_OK) std::printf("wrote checkpoints and curves to %s\n", train_o.out_dir.c_str());
  } else if (eval->parsed()) {
    if (int rc = build_config(eval_o, cfg)) return rc;
    double mean_return = 0.0;
    st = bv_cmd_eval(cfg.get(), checkpoint.c_str(), eval_o.out_dir.c_str(), &mean_return);
    if (st == BV_OK) std::printf("mean discounted return: %.17g\n", mean_return);
  } else if (causal->parsed()) {
    if (int rc = build_config(causal_o, cfg)) return rc;
    st = bv_cmd_causal(cfg.get(), causal_o.out_dir.c_str());
    if (st == BV_OK) std::printf("wrote adjustment report to %s\n", causal_o.out_dir.c_str());
  }
  return st == BV_OK ? 0 : fail(st);
}
