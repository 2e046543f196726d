#include "learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "errors.hpp"

namespace biovolt {

void ReplayBuffer::add(Transition t) {
  if (capacity_ == 0) return;
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(Rng& rng, std::size_t batch) const {
  std::vector<std::size_t> out(batch);
  for (std::size_t i = 0; i < batch; ++i) out[i] = rng.uniform_index(data_.size());
  return out;
}

namespace {

std::vector<int> net_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes;
  sizes.push_back(in);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

} // namespace

Agent::Agent(int obs_dim, int action_dim, double v_min, double v_max, const TrainConfig& cfg,
             Rng& rng)
    : kind_(cfg.kind),
      v_min_(v_min),
      v_max_(v_max),
      tau_(cfg.tau),
      policy_noise_(cfg.policy_noise),
      noise_clip_(cfg.noise_clip),
      policy_delay_(cfg.kind == LearnerKind::Ddpg ? 1 : cfg.policy_delay) {
  if (v_max_ <= v_min_) throw ConfigError("agent action range is empty");
  actor_ = Mlp(net_sizes(obs_dim, cfg.hidden, action_dim));
  critic1_ = Mlp(net_sizes(obs_dim + action_dim, cfg.hidden, 1));
  critic2_ = Mlp(net_sizes(obs_dim + action_dim, cfg.hidden, 1));
  actor_.init_params(rng, 1.0);
  critic1_.init_params(rng, 1.0);
  critic2_.init_params(rng, 1.0);
  // Near-zero heads: the fresh policy starts at the action-range midpoint
  // instead of a saturated extreme, and early value estimates stay small.
  actor_.scale_output_layer(1e-2);
  critic1_.scale_output_layer(1e-2);
  critic2_.scale_output_layer(1e-2);
  actor_target_ = actor_;
  critic1_target_ = critic1_;
  critic2_target_ = critic2_;
  actor_opt_ = Adam(actor_.param_count(), cfg.actor_lr);
  critic1_opt_ = Adam(critic1_.param_count(), cfg.critic_lr);
  critic2_opt_ = Adam(critic2_.param_count(), cfg.critic_lr);
}

std::vector<double> Agent::squash(const std::vector<double>& pre) const {
  std::vector<double> out(pre.size());
  const double half = 0.5 * (v_max_ - v_min_);
  for (std::size_t i = 0; i < pre.size(); ++i) {
    out[i] = v_min_ + half * (std::tanh(pre[i]) + 1.0);
  }
  return out;
}

std::vector<double> Agent::normalise_action(const std::vector<double>& action) const {
  std::vector<double> out(action.size());
  const double span = v_max_ - v_min_;
  for (std::size_t i = 0; i < action.size(); ++i) {
    out[i] = 2.0 * (action[i] - v_min_) / span - 1.0;
  }
  return out;
}

std::vector<double> Agent::select_action(const std::vector<double>& obs) const {
  return squash(actor_.forward(obs));
}

std::vector<double> Agent::select_action(const std::vector<double>& obs, double noise_scale,
                                         Rng& rng) const {
  std::vector<double> a = select_action(obs);
  const double sigma = noise_scale * 0.5 * (v_max_ - v_min_);
  for (double& v : a) {
    v = std::clamp(v + sigma * rng.normal(), v_min_, v_max_);
  }
  return a;
}

double Agent::critic_value(const std::vector<double>& obs, const std::vector<double>& action) const {
  std::vector<double> input = obs;
  const std::vector<double> na = normalise_action(action);
  input.insert(input.end(), na.begin(), na.end());
  return critic1_.forward(input)[0];
}

Agent::UpdateStats Agent::update(const ReplayBuffer& buffer,
                                 const std::vector<std::size_t>& batch, Rng& rng) {
  UpdateStats stats;
  const std::size_t b = batch.size();
  const int adim = action_dim();
  const bool twin = kind_ == LearnerKind::Td3;

  // Targets: y = r + gamma (1 - done) min_k Qk'(s', clip(pi'(s') + eps)).
  std::vector<double> targets(b);
  std::vector<std::vector<double>> critic_inputs(b);
  for (std::size_t i = 0; i < b; ++i) {
    const Transition& t = buffer.at(batch[i]);
    double target_q = 0.0;
    if (!t.done) {
      std::vector<double> pre = actor_target_.forward(t.next_obs);
      std::vector<double> na(adim);
      for (int k = 0; k < adim; ++k) {
        double n = std::tanh(pre[k]);
        if (twin && policy_noise_ > 0.0) {
          const double eps =
              std::clamp(policy_noise_ * rng.normal(), -noise_clip_, noise_clip_);
          n += eps;
        }
        na[k] = std::clamp(n, -1.0, 1.0);
      }
      std::vector<double> in = t.next_obs;
      in.insert(in.end(), na.begin(), na.end());
      const double q1 = critic1_target_.forward(in)[0];
      target_q = twin ? std::min(q1, critic2_target_.forward(in)[0]) : q1;
    }
    targets[i] = t.reward + gamma_ * (t.done ? 0.0 : target_q);

    critic_inputs[i] = t.obs;
    const std::vector<double> na = normalise_action(t.action);
    critic_inputs[i].insert(critic_inputs[i].end(), na.begin(), na.end());
  }

  // Critic regression step(s).
  const int n_critics = twin ? 2 : 1;
  for (int c = 0; c < n_critics; ++c) {
    Mlp& critic = c == 0 ? critic1_ : critic2_;
    Adam& opt = c == 0 ? critic1_opt_ : critic2_opt_;
    std::vector<double> grad(critic.param_count(), 0.0);
    double loss = 0.0;
    Mlp::Workspace ws;
    for (std::size_t i = 0; i < b; ++i) {
      const double q = critic.forward(critic_inputs[i], ws)[0];
      const double err = q - targets[i];
      loss += err * err / static_cast<double>(b);
      const std::vector<double> dout = {2.0 * err / static_cast<double>(b)};
      critic.backward(ws, dout, grad);
    }
    if (!std::isfinite(loss)) {
      throw NumericalError("NumericalDivergence: critic loss is not finite");
    }
    stats.critic_loss += loss / n_critics;
    opt.step(critic.params(), grad);
  }

  // Delayed policy improvement and target tracking.
  ++update_count_;
  if (update_count_ % policy_delay_ == 0) {
    std::vector<double> agrad(actor_.param_count(), 0.0);
    double aloss = 0.0;
    Mlp::Workspace aws, cws;
    const double inv_b = 1.0 / static_cast<double>(b);
    for (std::size_t i = 0; i < b; ++i) {
      const Transition& t = buffer.at(batch[i]);
      const std::vector<double> pre = actor_.forward(t.obs, aws);
      std::vector<double> na(adim);
      for (int k = 0; k < adim; ++k) na[k] = std::tanh(pre[k]);
      std::vector<double> in = t.obs;
      in.insert(in.end(), na.begin(), na.end());
      const double q = critic1_.forward(in, cws)[0];
      aloss -= q * inv_b;
      // dL/da through the critic, then through tanh into the actor.
      std::vector<double> cgrad_unused(critic1_.param_count(), 0.0);
      const std::vector<double> din = critic1_.backward(cws, {-inv_b}, cgrad_unused);
      std::vector<double> dpre(adim);
      const int obs_len = static_cast<int>(t.obs.size());
      for (int k = 0; k < adim; ++k) {
        dpre[k] = din[obs_len + k] * (1.0 - na[k] * na[k]);
      }
      actor_.backward(aws, dpre, agrad);
    }
    if (!std::isfinite(aloss)) {
      throw NumericalError("NumericalDivergence: actor loss is not finite");
    }
    actor_opt_.step(actor_.params(), agrad);
    stats.actor_loss = aloss;
    stats.actor_updated = true;

    actor_target_.soft_update_from(actor_, tau_);
    critic1_target_.soft_update_from(critic1_, tau_);
    if (twin) critic2_target_.soft_update_from(critic2_, tau_);
  }
  return stats;
}

namespace {

constexpr char kCkptMagic[8] = {'B', 'V', 'C', 'K', 'P', 'T', '0', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_net(std::ofstream& out, const Mlp& net) {
  write_u64(out, net.layer_sizes().size());
  for (int s : net.layer_sizes()) write_u64(out, static_cast<std::uint64_t>(s));
  write_u64(out, net.param_count());
  out.write(reinterpret_cast<const char*>(net.params().data()),
            static_cast<std::streamsize>(net.param_count() * sizeof(double)));
}

Mlp read_net(std::ifstream& in) {
  const std::uint64_t n_sizes = read_u64(in);
  if (!in || n_sizes < 2 || n_sizes > 64) throw IoError("checkpoint: corrupt layer table");
  std::vector<int> sizes(n_sizes);
  for (auto& s : sizes) s = static_cast<int>(read_u64(in));
  Mlp net(sizes);
  const std::uint64_t n_params = read_u64(in);
  if (n_params != net.param_count()) throw IoError("checkpoint: parameter count mismatch");
  in.read(reinterpret_cast<char*>(net.params().data()),
          static_cast<std::streamsize>(n_params * sizeof(double)));
  if (!in) throw IoError("checkpoint: truncated parameter block");
  return net;
}

} // namespace

void Agent::save(const std::string& path, std::uint64_t config_digest) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("checkpoint: cannot write " + path);
  out.write(kCkptMagic, sizeof kCkptMagic);
  write_u64(out, config_digest);
  write_u64(out, kind_ == LearnerKind::Td3 ? 0 : 1);
  double meta[4] = {v_min_, v_max_, gamma_, tau_};
  out.write(reinterpret_cast<const char*>(meta), sizeof meta);
  write_u64(out, static_cast<std::uint64_t>(policy_delay_));
  write_net(out, actor_);
  write_net(out, actor_target_);
  write_net(out, critic1_);
  write_net(out, critic1_target_);
  write_net(out, critic2_);
  write_net(out, critic2_target_);
  if (!out) throw IoError("checkpoint: write failed for " + path);
}

Agent Agent::load(const std::string& path, std::uint64_t expected_digest) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCkptMagic, sizeof magic) != 0) {
    throw IoError("checkpoint: bad magic in " + path);
  }
  const std::uint64_t digest = read_u64(in);
  if (expected_digest != 0 && digest != expected_digest) {
    throw ConfigError("checkpoint: config digest mismatch");
  }
  Agent a;
  a.kind_ = read_u64(in) == 0 ? LearnerKind::Td3 : LearnerKind::Ddpg;
  double meta[4];
  in.read(reinterpret_cast<char*>(meta), sizeof meta);
  a.v_min_ = meta[0];
  a.v_max_ = meta[1];
  a.gamma_ = meta[2];
  a.tau_ = meta[3];
  a.policy_delay_ = static_cast<int>(read_u64(in));
  a.actor_ = read_net(in);
  a.actor_target_ = read_net(in);
  a.critic1_ = read_net(in);
  a.critic1_target_ = read_net(in);
  a.critic2_ = read_net(in);
  a.critic2_target_ = read_net(in);
  a.actor_opt_ = Adam(a.actor_.param_count(), 3e-4);
  a.critic1_opt_ = Adam(a.critic1_.param_count(), 1e-3);
  a.critic2_opt_ = Adam(a.critic2_.param_count(), 1e-3);
  return a;
}

double evaluate_policy(
    const Scenario& scenario,
    const std::function<std::vector<double>(const std::vector<double>&)>& policy, int episodes,
    std::uint64_t seed_base) {
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Environment env(scenario, seed_base + static_cast<std::uint64_t>(e));
    std::vector<double> obs = env.reset();
    std::vector<double> rewards;
    while (!env.done()) {
      StepResult r = env.step(policy(obs));
      rewards.push_back(r.reward);
      obs = std::move(r.observation);
    }
    total += discounted_return(rewards, scenario.gamma);
  }
  return total / episodes;
}

double evaluate(const Scenario& scenario, const Agent& agent, int episodes,
                std::uint64_t seed_base) {
  return evaluate_policy(
      scenario, [&](const std::vector<double>& obs) { return agent.select_action(obs); },
      episodes, seed_base);
}

TrainResult train(const Scenario& scenario, const TrainConfig& cfg, const ProgressFn& progress) {
  Rng rng(cfg.seed);
  Environment env(scenario, rng.derive(1));
  Agent agent(env.obs_dim(), env.action_dim(), scenario.target.v_min, scenario.target.v_max,
              cfg, rng);
  agent.set_gamma(scenario.gamma);
  ReplayBuffer buffer(cfg.replay_capacity);

  TrainResult result;
  Rng episode_rng(rng.derive(2));
  Rng update_rng(rng.derive(3));

  std::vector<double> obs = env.reset(episode_rng.next_u64());
  ++result.episodes;

  for (int step = 1; step <= cfg.total_steps; ++step) {
    std::vector<double> action;
    if (step <= cfg.warmup_steps) {
      action.resize(env.action_dim());
      for (double& a : action) a = rng.uniform(scenario.target.v_min, scenario.target.v_max);
    } else {
      action = agent.select_action(obs, cfg.expl_noise, rng);
    }

    StepResult r = env.step(action);
    Transition t;
    t.obs = obs;
    t.action = action;
    t.next_obs = r.observation;
    t.reward = r.reward;
    // Horizon expiry is not a true terminal state; only extinction is.
    t.done = r.done && env.tissue().live_count() == 0;
    buffer.add(std::move(t));
    obs = std::move(r.observation);
    ++result.env_steps;

    if (r.done) {
      obs = env.reset(episode_rng.next_u64());
      ++result.episodes;
    }

    if (step > cfg.warmup_steps && buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
      const auto batch = buffer.sample_indices(update_rng, cfg.batch_size);
      agent.update(buffer, batch, update_rng);
    }

    if (cfg.eval_every > 0 && step % cfg.eval_every == 0) {
      const double score = evaluate(scenario, agent, cfg.eval_episodes, cfg.eval_seed_base);
      result.curve.emplace_back(step, score);
      if (score > result.best_eval) {
        result.best_eval = score;
        result.agent = agent;
      }
      if (progress) progress(step, score);
    }
  }

  if (result.curve.empty()) {
    result.best_eval = evaluate(scenario, agent, cfg.eval_episodes, cfg.eval_seed_base);
    result.curve.emplace_back(cfg.total_steps, result.best_eval);
    result.agent = agent;
  }
  result.final_agent = agent;
  return result;
}

} // namespace biovolt
