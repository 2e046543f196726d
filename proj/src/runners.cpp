#include "runners.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "causal.hpp"
#include "env.hpp"
#include "errors.hpp"
#include "learner.hpp"
#include "logio.hpp"

namespace biovolt {

namespace {

std::string prepare_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) throw ConfigError("output directory not set");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
  return out_dir;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::istringstream in(raw);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const std::size_t a = tok.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const std::size_t b = tok.find_last_not_of(" \t");
    out.push_back(tok.substr(a, b - a + 1));
  }
  return out;
}

TrainConfig train_config_from(const Config& cfg) {
  TrainConfig tc;
  const std::string kind = cfg.get_string("train.kind", "td3");
  if (kind == "td3") {
    tc.kind = LearnerKind::Td3;
  } else if (kind == "ddpg") {
    tc.kind = LearnerKind::Ddpg;
  } else {
    throw ConfigError("train.kind must be td3 or ddpg, got: " + kind);
  }
  tc.total_steps = static_cast<int>(cfg.get_int("train.steps", tc.total_steps));
  tc.warmup_steps = static_cast<int>(cfg.get_int("train.warmup", tc.warmup_steps));
  tc.batch_size = static_cast<int>(cfg.get_int("train.batch", tc.batch_size));
  tc.replay_capacity =
      static_cast<std::size_t>(cfg.get_int("train.replay", static_cast<long>(tc.replay_capacity)));
  tc.actor_lr = cfg.get_double("train.actor_lr", tc.actor_lr);
  tc.critic_lr = cfg.get_double("train.critic_lr", tc.critic_lr);
  tc.tau = cfg.get_double("train.tau", tc.tau);
  tc.expl_noise = cfg.get_double("train.expl_noise", tc.expl_noise);
  tc.policy_noise = cfg.get_double("train.policy_noise", tc.policy_noise);
  tc.noise_clip = cfg.get_double("train.noise_clip", tc.noise_clip);
  tc.policy_delay = static_cast<int>(cfg.get_int("train.policy_delay", tc.policy_delay));
  tc.eval_every = static_cast<int>(cfg.get_int("train.eval_every", tc.eval_every));
  tc.eval_episodes = static_cast<int>(cfg.get_int("train.eval_episodes", tc.eval_episodes));
  tc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  tc.eval_seed_base =
      static_cast<std::uint64_t>(cfg.get_int("train.eval_seed_base", 10000));
  const std::vector<double> hidden = cfg.get_doubles("train.hidden", {});
  if (!hidden.empty()) {
    tc.hidden.clear();
    for (double h : hidden) tc.hidden.push_back(static_cast<int>(h));
  }
  return tc;
}

} // namespace

void run_simulate(const Config& cfg, const std::string& out_dir) {
  prepare_out_dir(out_dir);
  const Scenario scenario = scenario_from_config(cfg);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const int episodes = static_cast<int>(cfg.get_int("episodes", 1));
  const int snapshots = static_cast<int>(cfg.get_int("snapshots", 0));
  const std::string policy = cfg.get_string("policy", "constant");

  Agent agent;
  if (policy == "checkpoint") {
    agent = Agent::load(cfg.get_string("policy.checkpoint", ""), 0);
  } else if (policy != "random" && policy != "constant" && policy != "none") {
    throw ConfigError("policy must be random, constant, none or checkpoint, got: " + policy);
  }
  const double constant_v =
      cfg.get_double("policy.value", 0.5 * (scenario.target.v_min + scenario.target.v_max));

  std::ostringstream returns_csv;
  returns_csv << "episode,seed,steps,return\n";
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t ep_seed = seed + static_cast<std::uint64_t>(e);
    Environment env(scenario, ep_seed);
    Rng rng(ep_seed ^ 0x5eedu);
    std::vector<double> obs = env.reset();
    EpisodeLogger logger(scenario.name, ep_seed, cfg.digest(), snapshots);
    std::vector<RewardBreakdown> steps;
    std::vector<double> rewards;
    while (!env.done()) {
      std::vector<double> action(env.action_dim(), constant_v);
      if (policy == "random") {
        for (double& a : action) a = rng.uniform(scenario.target.v_min, scenario.target.v_max);
      } else if (policy == "checkpoint") {
        action = agent.select_action(obs);
      } else if (policy == "none") {
        action.clear();
      }
      StepResult r = policy == "none" ? env.step_unclamped() : env.step(action);
      logger.log_step(env.step_index(), action, r.info, env.tissue());
      steps.push_back(r.info);
      rewards.push_back(r.reward);
      obs = std::move(r.observation);
    }
    const std::string stem = "episode_" + std::to_string(ep_seed);
    logger.write(join(out_dir, stem + ".jsonl"));
    write_text_file(join(out_dir, stem + "_steps.csv"), steps_to_csv(steps));
    returns_csv << e << "," << ep_seed << "," << rewards.size() << ","
                << format_double(discounted_return(rewards, scenario.gamma)) << "\n";
  }
  write_text_file(join(out_dir, "returns.csv"), returns_csv.str());
}

void run_train(const Config& cfg, const std::string& out_dir) {
  prepare_out_dir(out_dir);
  const Scenario scenario = scenario_from_config(cfg);
  const TrainConfig tc = train_config_from(cfg);
  const TrainResult result = train(scenario, tc);
  result.agent.save(join(out_dir, "best.ckpt"), cfg.digest());
  result.final_agent.save(join(out_dir, "final.ckpt"), cfg.digest());
  write_text_file(join(out_dir, "curve.csv"), curve_to_csv(result.curve));
  std::ostringstream summary;
  summary << "config_digest,env_steps,episodes,best_eval\n"
          << std::hex << cfg.digest() << std::dec << "," << result.env_steps << ","
          << result.episodes << "," << format_double(result.best_eval) << "\n";
  write_text_file(join(out_dir, "train_summary.csv"), summary.str());
}

double run_eval(const Config& cfg, const std::string& checkpoint, const std::string& out_dir) {
  prepare_out_dir(out_dir);
  const Scenario scenario = scenario_from_config(cfg);
  std::string path = checkpoint.empty() ? cfg.get_string("eval.checkpoint", "") : checkpoint;
  if (path.empty()) throw ConfigError("eval: no checkpoint given");
  const bool strict = cfg.get_bool("eval.strict_digest", false);
  const Agent agent = Agent::load(path, strict ? cfg.digest() : 0);
  const int episodes = static_cast<int>(cfg.get_int("eval.episodes", 10));
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 10000));
  const double mean_return = evaluate(scenario, agent, episodes, seed);
  std::ostringstream report;
  report << "config_digest,checkpoint,episodes,seed_base,mean_return\n"
         << std::hex << cfg.digest() << std::dec << "," << path << "," << episodes << "," << seed
         << "," << format_double(mean_return) << "\n";
  write_text_file(join(out_dir, "eval_report.csv"), report.str());
  return mean_return;
}

void run_causal(const Config& cfg, const std::string& out_dir) {
  prepare_out_dir(out_dir);
  const std::vector<std::string> log_paths = split_list(cfg.get_string("causal.logs", ""));
  if (log_paths.empty()) throw ConfigError("causal.logs: no episode logs given");
  std::string jsonl;
  for (const auto& p : log_paths) jsonl += read_text_file(p);

  const std::string dag_name = cfg.get_string("causal.dag", "vmem-direct");
  const auto builtins = builtin_dag_names();
  const CausalDag dag = std::find(builtins.begin(), builtins.end(), dag_name) != builtins.end()
                            ? builtin_dag(dag_name)
                            : CausalDag::from_edge_list(read_text_file(dag_name));

  const std::string x = cfg.get_string("causal.x", "");
  const std::string y = cfg.get_string("causal.y", "");
  if (x.empty() || y.empty()) throw ConfigError("causal.x and causal.y are required");
  NodeSet z;
  for (const auto& n : split_list(cfg.get_string("causal.z", ""))) z.insert(n);

  std::vector<std::string> var_names = {x, y};
  var_names.insert(var_names.end(), z.begin(), z.end());
  std::vector<VariableSpec> specs;
  for (const auto& name : var_names) {
    VariableSpec spec;
    spec.name = name;
    spec.path = cfg.get_string("causal.var." + name + ".path", "");
    if (spec.path.empty()) throw ConfigError("causal.var." + name + ".path is required");
    spec.bin_edges = cfg.get_doubles("causal.var." + name + ".edges", {});
    if (spec.bin_edges.size() < 2) {
      throw ConfigError("causal.var." + name + ".edges needs at least two edges");
    }
    specs.push_back(std::move(spec));
  }

  const TrajectoryTable table = extract_table(jsonl, specs);
  const AdjustResult result = adjust(table, dag, x, y, z);
  std::string csv = "# config_digest=" + [&] {
    std::ostringstream h;
    h << std::hex << cfg.digest();
    return h.str();
  }() + "\n" + adjust_to_csv(result);
  write_text_file(join(out_dir, "adjustment.csv"), csv);

  std::ostringstream sets;
  for (const auto& s : backdoor_sets(dag, x, y, static_cast<int>(dag.nodes().size()))) {
    sets << "{";
    bool first = true;
    for (const auto& n : s) {
      sets << (first ? "" : ", ") << n;
      first = false;
    }
    sets << "}\n";
  }
  write_text_file(join(out_dir, "backdoor_sets.txt"), sets.str());
}

} // namespace biovolt
