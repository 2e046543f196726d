#pragma once

#include <unordered_map>
#include <vector>

#include "tissue.hpp"

namespace biovolt {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Goal description for a scenario: desired morphology, topology, bioelectric
/// field, concentrations and signalling levels with their normalisation
/// scales, proliferation/migration targets, and action/current bounds.
struct TargetSpec {
  std::vector<Point2> target_positions;
  TopologyGraph target_topology;
  std::unordered_map<int, double> target_vfield;  // site index -> V
  double target_vfield_uniform = 0.0;             // used when the map is empty

  IonArray desired_conc{};   // mol/m^3
  IonArray conc_scale{};     // Delta[ion]; <= 0 disables the ion's term
  double desired_ph = 7.4;
  double ph_scale = 1.0;
  double desired_akt = 0.0;
  double akt_scale = 1.0;
  double desired_calcineurin = 0.0;
  double calcineurin_scale = 1.0;

  std::vector<double> desired_genes;
  std::vector<double> gene_scale;

  int n_target = 1;                                  // N_Target
  std::unordered_map<int, GridPos> migration_targets;  // cell index -> site
  double i_max = 1.0;  // A
  double v_min = -0.2;
  double v_max = 0.2;
  double max_morphology_error = 0.0;  // reported for an all-dead tissue
};

struct RewardWeights {
  // Cell-level compound reward.
  double homeostasis = 1.0;
  double signalling = 1.0;
  double efficiency = 1.0;
  // Organ-level compound reward.
  double morph = 1.0;
  double topo = 1.0;
  double bioelec = 1.0;
  double diff = 1.0;
  double prolif = 1.0;
  double apop = 1.0;
  double gene = 1.0;
  double mig = 1.0;
  double eff = 1.0;
};

/// Every reward term, pre-weighted contribution by name, plus the total.
struct RewardBreakdown {
  // Cell-level terms (weighted contributions).
  double homeostasis = 0.0;
  double signalling = 0.0;
  double efficiency = 0.0;
  // Organ-level terms (weighted contributions).
  double morph = 0.0;
  double topo = 0.0;
  double bioelec = 0.0;
  double diff = 0.0;
  double prolif = 0.0;
  double apop = 0.0;
  double gene = 0.0;
  double mig = 0.0;
  double eff = 0.0;
  double total = 0.0;
};

/// Hausdorff distance (max of the two directed sup-inf distances, Euclidean).
/// Throws "EmptySet" for an empty input.
double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b);

/// Volume-weighted discrete quadrature of the squared voltage deviation.
double bioelectric_error(const std::vector<double>& model_field,
                         const std::vector<double>& target_field,
                         const std::vector<double>& cell_volumes);

double homeostasis_reward(const CellState& cell, const TargetSpec& target);
double signalling_reward(const CellState& cell, const TargetSpec& target);

/// Cell-level efficiency penalty: -(sum |I_ion| / I_max)^2.
double efficiency_reward_cell(const CellState& cell, double i_max);
/// Organ-level efficiency penalty (pre-weight): -(sum_cells I_total) / I_max.
double efficiency_reward_organ(const Tissue& tissue, double i_max);

double morphology_error(const Tissue& tissue, const TargetSpec& target);
double topology_error(const TopologyGraph& tissue_graph, const TopologyGraph& target_graph);

double differentiation_reward(const Tissue& tissue);
double proliferation_reward(const Tissue& tissue, const TargetSpec& target);
double apoptosis_reward(const Tissue& tissue);
double gene_reward(const Tissue& tissue, const TargetSpec& target);
double migration_reward(const Tissue& tissue, const TargetSpec& target);

/// Organ-level compound reward over all nine terms.
RewardBreakdown organ_reward(const Tissue& tissue, const TargetSpec& target,
                             const RewardWeights& weights);

/// Cell-level compound reward for a single cell.
RewardBreakdown cell_reward(const CellState& cell, const TargetSpec& target,
                            const RewardWeights& weights);

std::vector<Point2> live_cell_positions(const Tissue& tissue);

} // namespace biovolt
