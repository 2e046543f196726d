#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace biovolt {

namespace {

double sq(double x) { return x * x; }

double dist2(const Point2& a, const Point2& b) { return sq(a.x - b.x) + sq(a.y - b.y); }

// Directed Hausdorff with an early inner break once the running minimum drops
// below the current supremum.
double directed_hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  double worst = 0.0;
  for (const Point2& p : a) {
    double best = dist2(p, b[0]);
    for (std::size_t j = 1; j < b.size() && best > worst; ++j) {
      best = std::min(best, dist2(p, b[j]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

} // namespace

double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  if (a.empty() || b.empty()) throw InvalidArgument("EmptySet: hausdorff of an empty point set");
  return std::sqrt(std::max(directed_hausdorff(a, b), directed_hausdorff(b, a)));
}

double bioelectric_error(const std::vector<double>& model_field,
                         const std::vector<double>& target_field,
                         const std::vector<double>& cell_volumes) {
  if (model_field.size() != target_field.size() || model_field.size() != cell_volumes.size()) {
    throw InvalidArgument("FieldMismatch: bioelectric fields defined on different cell sets");
  }
  double err = 0.0;
  for (std::size_t i = 0; i < model_field.size(); ++i) {
    err += sq(model_field[i] - target_field[i]) * cell_volumes[i];
  }
  return err;
}

double homeostasis_reward(const CellState& cell, const TargetSpec& target) {
  double r = 0.0;
  for (int i = 0; i < kNumIons; ++i) {
    if (target.conc_scale[i] <= 0.0) continue;
    r -= sq((cell.conc_in[i] - target.desired_conc[i]) / target.conc_scale[i]);
  }
  if (target.ph_scale > 0.0) {
    r -= sq((cell.sig.ph_in - target.desired_ph) / target.ph_scale);
  }
  return r;
}

double signalling_reward(const CellState& cell, const TargetSpec& target) {
  double r = 0.0;
  if (target.akt_scale > 0.0) {
    r -= sq((target.desired_akt - cell.sig.akt_active) / target.akt_scale);
  }
  if (target.calcineurin_scale > 0.0) {
    r -= sq((target.desired_calcineurin - cell.sig.calcineurin_active) / target.calcineurin_scale);
  }
  return r;
}

namespace {

double total_current_magnitude(const CellState& cell) {
  double sum = 0.0;
  for (Ion ion : kAllIons) {
    sum += std::abs(ghk_flux(ion, ion_at(cell.perms, ion), cell));
  }
  return sum;
}

} // namespace

double efficiency_reward_cell(const CellState& cell, double i_max) {
  if (i_max <= 0.0) throw InvalidArgument("efficiency_reward: I_max must be positive");
  return -sq(total_current_magnitude(cell) / i_max);
}

double efficiency_reward_organ(const Tissue& tissue, double i_max) {
  if (i_max <= 0.0) throw InvalidArgument("efficiency_reward: I_max must be positive");
  double sum = 0.0;
  for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
    if (!tissue.is_live(i)) continue;
    sum += total_current_magnitude(tissue.cells[i].state);
  }
  return -sum / i_max;
}

std::vector<Point2> live_cell_positions(const Tissue& tissue) {
  std::vector<Point2> pts;
  for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
    if (!tissue.is_live(i)) continue;
    pts.push_back({tissue.world_x(tissue.cells[i]), tissue.world_y(tissue.cells[i])});
  }
  return pts;
}

double morphology_error(const Tissue& tissue, const TargetSpec& target) {
  if (target.target_positions.empty()) {
    throw InvalidArgument("EmptySet: morphology target has no positions");
  }
  const std::vector<Point2> live = live_cell_positions(tissue);
  if (live.empty()) return target.max_morphology_error;
  return hausdorff(live, target.target_positions);
}

double topology_error(const TopologyGraph& tissue_graph, const TopologyGraph& target_graph) {
  const int nt = static_cast<int>(target_graph.nodes.size());
  const int net = static_cast<int>(target_graph.edges.size());
  if (nt == 0) throw InvalidArgument("topology_error: target graph is empty");
  if (tissue_graph.nodes.empty()) return 1.0;

  // Greedy nearest-target matching in tissue-node order, ties by target order.
  std::vector<int> match(tissue_graph.nodes.size(), -1);
  std::vector<bool> used(nt, false);
  for (std::size_t i = 0; i < tissue_graph.nodes.size(); ++i) {
    int best = -1;
    double best_d = 0.0;
    for (int j = 0; j < nt; ++j) {
      if (used[j]) continue;
      const double d = sq(tissue_graph.nodes[i].x - target_graph.nodes[j].x) +
                       sq(tissue_graph.nodes[i].y - target_graph.nodes[j].y);
      if (best < 0 || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best >= 0) {
      match[i] = best;
      used[best] = true;
    }
  }

  int unmatched_targets = 0;
  for (int j = 0; j < nt; ++j) {
    if (!used[j]) ++unmatched_targets;
  }

  std::set<std::pair<int, int>> target_edges(target_graph.edges.begin(), target_graph.edges.end());
  std::set<std::pair<int, int>> mapped_edges;
  int dangling = 0;  // tissue edges with an unmatched endpoint
  for (const auto& [a, b] : tissue_graph.edges) {
    if (match[a] < 0 || match[b] < 0) {
      ++dangling;
      continue;
    }
    mapped_edges.insert({std::min(match[a], match[b]), std::max(match[a], match[b])});
  }
  int edge_mismatches = dangling;
  for (const auto& e : target_edges) {
    if (!mapped_edges.count(e)) ++edge_mismatches;
  }
  for (const auto& e : mapped_edges) {
    if (!target_edges.count(e)) ++edge_mismatches;
  }

  const double err = static_cast<double>(unmatched_targets + edge_mismatches) / (nt + net);
  return std::clamp(err, 0.0, 1.0);
}

namespace {

struct LiveCounts {
  int total = 0;
  int differentiated = 0;
  int apoptotic = 0;
};

LiveCounts count_live(const Tissue& tissue) {
  LiveCounts c;
  for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
    if (!tissue.is_live(i)) continue;
    ++c.total;
    if (tissue.cells[i].phenotype.kind == PhenotypeKind::Differentiated) ++c.differentiated;
    if (tissue.cells[i].phenotype.kind == PhenotypeKind::Apoptotic) ++c.apoptotic;
  }
  return c;
}

} // namespace

double differentiation_reward(const Tissue& tissue) {
  const LiveCounts c = count_live(tissue);
  if (c.total == 0) return 0.0;
  return static_cast<double>(c.differentiated) / c.total;
}

double proliferation_reward(const Tissue& tissue, const TargetSpec& target) {
  const LiveCounts c = count_live(tissue);
  if (c.total == 0) return 0.0;
  return static_cast<double>(c.total - std::abs(c.total - target.n_target)) / c.total;
}

double apoptosis_reward(const Tissue& tissue) {
  const LiveCounts c = count_live(tissue);
  if (c.total == 0) return -1.0;
  return -static_cast<double>(c.apoptotic) / c.total;
}

double gene_reward(const Tissue& tissue, const TargetSpec& target) {
  const LiveCounts c = count_live(tissue);
  if (c.total == 0) return -1.0;
  if (target.desired_genes.empty()) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
    if (!tissue.is_live(i)) continue;
    const std::vector<double>& expr = tissue.cells[i].phenotype.gene_expr;
    for (std::size_t g = 0; g < target.desired_genes.size() && g < expr.size(); ++g) {
      const double scale = g < target.gene_scale.size() ? target.gene_scale[g] : 1.0;
      if (scale <= 0.0) continue;
      sum += sq((target.desired_genes[g] - expr[g]) / scale);
    }
  }
  return -sum / c.total;
}

double migration_reward(const Tissue& tissue, const TargetSpec& target) {
  if (target.migration_targets.empty()) return 0.0;
  const LiveCounts c = count_live(tissue);
  if (c.total == 0) return -1.0;
  const double diam = std::hypot(tissue.domain_width(), tissue.domain_height());
  if (diam <= 0.0) return 0.0;
  double total_err = 0.0;
  int assigned = 0;
  for (const auto& [idx, site] : target.migration_targets) {
    if (!tissue.is_live(idx)) continue;
    ++assigned;
    const TissueCell& cell = tissue.cells[idx];
    total_err += std::hypot(tissue.world_x(cell) - site.x * tissue.config.spacing,
                            tissue.world_y(cell) - site.y * tissue.config.spacing);
  }
  if (assigned == 0) return 0.0;
  return -total_err / (assigned * diam);
}

RewardBreakdown organ_reward(const Tissue& tissue, const TargetSpec& target,
                             const RewardWeights& w) {
  RewardBreakdown b;
  const bool all_dead = tissue.live_count() == 0;

  const double morph_err = morphology_error(tissue, target);

  double topo_err = 1.0;
  if (!all_dead && !target.target_topology.nodes.empty()) {
    topo_err = topology_error(extract_topology(tissue), target.target_topology);
  }

  double bio_err = 0.0;
  if (all_dead) {
    // Worst-case convention: every site fully off by its target value.
    for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
      const TissueCell& cell = tissue.cells[i];
      auto it = target.target_vfield.find(tissue.site_index(cell.pos));
      const double v_t = it != target.target_vfield.end() ? it->second : target.target_vfield_uniform;
      bio_err += sq(v_t) * cell.state.volume;
    }
  } else {
    std::vector<double> model, field, volumes;
    for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
      if (!tissue.is_live(i)) continue;
      const TissueCell& cell = tissue.cells[i];
      auto it = target.target_vfield.find(tissue.site_index(cell.pos));
      model.push_back(cell.state.v_mem);
      field.push_back(it != target.target_vfield.end() ? it->second
                                                       : target.target_vfield_uniform);
      volumes.push_back(cell.state.volume);
    }
    bio_err = bioelectric_error(model, field, volumes);
  }

  b.morph = -w.morph * morph_err;
  b.topo = -w.topo * topo_err;
  b.bioelec = -w.bioelec * bio_err;
  b.diff = w.diff * differentiation_reward(tissue);
  b.prolif = w.prolif * proliferation_reward(tissue, target);
  b.apop = w.apop * apoptosis_reward(tissue);
  b.gene = w.gene * gene_reward(tissue, target);
  b.mig = w.mig * migration_reward(tissue, target);
  b.eff = w.eff * efficiency_reward_organ(tissue, target.i_max);
  b.total = b.morph + b.topo + b.bioelec + b.diff + b.prolif + b.apop + b.gene + b.mig + b.eff;
  return b;
}

RewardBreakdown cell_reward(const CellState& cell, const TargetSpec& target,
                            const RewardWeights& w) {
  RewardBreakdown b;
  b.homeostasis = w.homeostasis * homeostasis_reward(cell, target);
  b.signalling = w.signalling * signalling_reward(cell, target);
  b.efficiency = w.efficiency * efficiency_reward_cell(cell, target.i_max);
  b.total = b.homeostasis + b.signalling + b.efficiency;
  return b;
}

} // namespace biovolt
