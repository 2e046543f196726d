#pragma once

#include <string>

#include "config.hpp"

namespace biovolt {

/// Command drivers shared by the C API and the CLI. Each one reads its
/// settings from the config, writes its artifacts (all carrying the config
/// digest) under out_dir, and throws Error subclasses on failure.

/// Keys: scenario, seed, episodes, snapshots, policy (random | constant |
/// checkpoint), policy.value, policy.checkpoint. Writes one episode log
/// (JSONL) and per-step reward CSV per episode, plus returns.csv.
void run_simulate(const Config& cfg, const std::string& out_dir);

/// Keys: scenario plus train.steps, train.warmup, train.batch, train.kind
/// (td3 | ddpg), train.actor_lr, train.critic_lr, train.tau,
/// train.expl_noise, train.policy_noise, train.noise_clip,
/// train.policy_delay, train.eval_every, train.eval_episodes, train.hidden.
/// Writes best.ckpt, final.ckpt, curve.csv and train_summary.csv.
void run_train(const Config& cfg, const std::string& out_dir);

/// Keys: scenario, seed, eval.episodes, eval.checkpoint (or the explicit
/// argument), eval.strict_digest. Writes eval_report.csv; returns the mean
/// discounted return.
double run_eval(const Config& cfg, const std::string& checkpoint, const std::string& out_dir);

/// Keys: causal.logs (comma-separated JSONL paths), causal.dag (built-in
/// name or edge-list file), causal.x, causal.y, causal.z, and per variable
/// causal.var.<name>.path / causal.var.<name>.edges. Writes adjustment.csv
/// and backdoor_sets.txt.
void run_causal(const Config& cfg, const std::string& out_dir);

} // namespace biovolt
