#pragma once

#include <functional>
#include <string>
#include <vector>

#include "env.hpp"
#include "nets.hpp"
#include "rng.hpp"

namespace biovolt {

struct Transition {
  std::vector<double> obs;
  std::vector<double> action;
  std::vector<double> next_obs;
  double reward = 0.0;
  bool done = false;
};

/// Fixed-capacity ring buffer with uniform sampling.
class ReplayBuffer {
public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void add(Transition t);
  std::size_t size() const { return data_.size(); }
  const Transition& at(std::size_t i) const { return data_[i]; }
  std::vector<std::size_t> sample_indices(Rng& rng, std::size_t batch) const;

private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

enum class LearnerKind { Td3, Ddpg };

struct TrainConfig {
  LearnerKind kind = LearnerKind::Td3;
  int total_steps = 20000;
  int warmup_steps = 1000;     // uniform-random actions before learning starts
  int batch_size = 128;
  std::size_t replay_capacity = 200000;
  std::vector<int> hidden = {64, 64};
  double actor_lr = 3e-4;
  double critic_lr = 1e-3;
  double tau = 0.005;          // Polyak coefficient for the target networks
  double expl_noise = 0.15;    // behaviour noise, fraction of half action range
  double policy_noise = 0.2;   // target smoothing noise (normalised units)
  double noise_clip = 0.5;
  int policy_delay = 2;
  int eval_every = 2000;
  int eval_episodes = 3;
  std::uint64_t seed = 1;
  std::uint64_t eval_seed_base = 10000;
};

/// Twin-critic deterministic-policy learner. The actor outputs pre-tanh
/// values; actions are tanh-squashed and affinely mapped to [v_min, v_max].
/// kind == Ddpg drops the second critic, target smoothing and policy delay.
class Agent {
public:
  Agent() = default;
  Agent(int obs_dim, int action_dim, double v_min, double v_max, const TrainConfig& cfg,
        Rng& rng);

  std::vector<double> select_action(const std::vector<double>& obs) const;
  std::vector<double> select_action(const std::vector<double>& obs, double noise_scale,
                                    Rng& rng) const;

  struct UpdateStats {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    bool actor_updated = false;
  };

  /// One gradient step on a sampled batch. rng drives the target policy
  /// smoothing noise. Throws NumericalError ("NumericalDivergence") if a
  /// loss stops being finite.
  UpdateStats update(const ReplayBuffer& buffer, const std::vector<std::size_t>& batch, Rng& rng);

  int obs_dim() const { return actor_.input_dim(); }
  int action_dim() const { return actor_.output_dim(); }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }

  void save(const std::string& path, std::uint64_t config_digest) const;
  /// Throws ConfigError on digest mismatch unless expected_digest == 0.
  static Agent load(const std::string& path, std::uint64_t expected_digest);

private:
  std::vector<double> squash(const std::vector<double>& pre) const;

  LearnerKind kind_ = LearnerKind::Td3;
  double v_min_ = -1.0, v_max_ = 1.0;
  double gamma_ = 0.99;
  double tau_ = 0.005;
  double policy_noise_ = 0.2, noise_clip_ = 0.5;
  int policy_delay_ = 2;
  long update_count_ = 0;

  Mlp actor_, actor_target_;
  Mlp critic1_, critic2_, critic1_target_, critic2_target_;
  Adam actor_opt_, critic1_opt_, critic2_opt_;

public:
  // Exposed for checkpointing and tests.
  Mlp& actor() { return actor_; }
  Mlp& critic1() { return critic1_; }
  Mlp& critic2() { return critic2_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic1() const { return critic1_; }
  const Mlp& critic2() const { return critic2_; }
  void set_gamma(double g) { gamma_ = g; }
  double critic_value(const std::vector<double>& obs, const std::vector<double>& action) const;
  std::vector<double> normalise_action(const std::vector<double>& action) const;
};

struct TrainResult {
  Agent agent;            // best agent seen at evaluation time
  Agent final_agent;
  double best_eval = -1e300;
  std::vector<std::pair<int, double>> curve;  // (env step, mean eval return)
  int env_steps = 0;
  int episodes = 0;
};

using ProgressFn = std::function<void(int step, double eval_return)>;

/// Seeded end-to-end training loop; deterministic in (scenario, cfg).
TrainResult train(const Scenario& scenario, const TrainConfig& cfg,
                  const ProgressFn& progress = nullptr);

/// Mean discounted return of the noise-free policy over fixed-seed episodes.
double evaluate(const Scenario& scenario, const Agent& agent, int episodes,
                std::uint64_t seed_base);

/// Mean discounted return of an arbitrary policy function.
double evaluate_policy(const Scenario& scenario,
                       const std::function<std::vector<double>(const std::vector<double>&)>& policy,
                       int episodes, std::uint64_t seed_base);

} // namespace biovolt
