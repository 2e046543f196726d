#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "metrics.hpp"
#include "tissue.hpp"

namespace biovolt {

enum class RewardKind { Cell, Organ };
enum class ActionMode { Global, Mesh };

/// Complete episodic task description: tissue, optional injury, goal,
/// reward weights, horizon and action encoding.
struct Scenario {
  std::string name = "custom";
  TissueConfig tissue;
  std::optional<InjurySpec> injury;
  TargetSpec target;
  RewardWeights weights;
  RewardKind reward_kind = RewardKind::Cell;

  int horizon = 100;
  double dt = 0.01;      // s of simulated time per environment step
  int substeps = 10;     // internal integrator substeps per environment step
  double gamma = 0.99;
  Scheme scheme = Scheme::RK4;

  ActionMode action_mode = ActionMode::Global;
  std::vector<Point2> electrode_layout;  // mesh mode; world coordinates
  double electrode_footprint = -1.0;     // m; <= 0 covers the whole domain

  std::vector<Ion> obs_ions = {Ion::K};
  double death_penalty = -100.0;  // cell-scenario reward when the cell dies

  int action_dim() const {
    return action_mode == ActionMode::Global ? 1 : static_cast<int>(electrode_layout.size());
  }
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  RewardBreakdown info;
  LifecycleEvents events;
};

/// Episodic RL environment over one tissue. Deterministic in
/// (scenario, seed, action sequence).
class Environment {
public:
  Environment(Scenario scenario, std::uint64_t seed);

  std::vector<double> reset();
  std::vector<double> reset(std::uint64_t seed);

  /// Advance one tick. action has action_dim() entries in [V_min, V_max].
  /// Throws "ActionOutOfRange" for invalid actions and "SteppedAfterDone"
  /// once the episode has terminated.
  StepResult step(const std::vector<double>& action);

  /// Advance one tick with no electrodes applied (all cells unclamped); the
  /// zero-intervention baseline.
  StepResult step_unclamped();

  int obs_dim() const { return obs_dim_; }
  int action_dim() const { return scenario_.action_dim(); }
  int step_index() const { return step_index_; }
  bool done() const { return done_; }
  const Scenario& scenario() const { return scenario_; }
  const Tissue& tissue() const { return tissue_; }

  VoltageMesh action_to_mesh(const std::vector<double>& action) const;
  RewardBreakdown compute_reward() const;

private:
  StepResult step_with_mesh(const VoltageMesh& mesh);
  std::vector<double> build_observation() const;

  Scenario scenario_;
  std::uint64_t seed_;
  Tissue tissue_;
  std::vector<int> obs_sites_;  // allowed sites in row-major order
  int obs_dim_ = 0;
  int step_index_ = 0;
  bool started_ = false;
  bool done_ = false;
};

double discounted_return(const std::vector<double>& rewards, double gamma);

/// Built-in scenarios: cell-homeostasis, tissue-pattern, heart-recovery.
std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name);

/// Scenario from a config: "scenario" names the base (default
/// cell-homeostasis), remaining keys override its fields.
Scenario scenario_from_config(const Config& cfg);

} // namespace biovolt
