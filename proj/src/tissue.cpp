#include "tissue.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace biovolt {

const char* phenotype_name(PhenotypeKind kind) {
  switch (kind) {
    case PhenotypeKind::Progenitor: return "progenitor";
    case PhenotypeKind::Differentiated: return "differentiated";
    case PhenotypeKind::Apoptotic: return "apoptotic";
    case PhenotypeKind::Dead: return "dead";
  }
  return "?";
}

int Tissue::live_count() const {
  int n = 0;
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
    if (is_live(i)) ++n;
  }
  return n;
}

Tissue build_tissue(const TissueConfig& config, std::uint64_t seed) {
  if (config.width < 1 || config.height < 1) {
    throw ConfigError("build_tissue: grid dimensions must be >= 1x1");
  }
  if (config.spacing <= 0.0) throw ConfigError("build_tissue: spacing must be positive");
  if (config.cell_template.volume <= 0.0 || config.cell_template.temperature <= 0.0) {
    throw ConfigError("build_tissue: invalid cell template");
  }

  Tissue tissue;
  tissue.config = config;
  tissue.rng.seed(seed);
  tissue.site_cell.assign(static_cast<std::size_t>(config.width) * config.height, -1);

  if (!config.site_mask.empty() &&
      config.site_mask.size() != tissue.site_cell.size()) {
    throw ConfigError("build_tissue: site_mask size does not match the grid");
  }

  for (int y = 0; y < config.height; ++y) {
    for (int x = 0; x < config.width; ++x) {
      if (!tissue.site_allowed({x, y})) continue;
      TissueCell cell;
      cell.state = config.cell_template;
      cell.phenotype.gene_expr.assign(config.n_genes, 0.0);
      if (static_cast<int>(config.lifecycle.gene_targets_progenitor.size()) == config.n_genes) {
        cell.phenotype.gene_expr = config.lifecycle.gene_targets_progenitor;
      }
      cell.pos = {x, y};
      try {
        cell.state.v_mem = cell.state.clamp ? *cell.state.clamp : ghk_voltage(cell.state);
      } catch (const Error&) {
        // keep the template voltage for non-conducting templates
      }
      const int idx = static_cast<int>(tissue.cells.size());
      tissue.site_cell[tissue.site_index(cell.pos)] = idx;
      tissue.cells.push_back(std::move(cell));
    }
  }

  auto add_edge = [&](GridPos a, GridPos b) {
    if (!tissue.in_grid(a) || !tissue.in_grid(b)) return;
    const int ia = tissue.site_cell[tissue.site_index(a)];
    const int ib = tissue.site_cell[tissue.site_index(b)];
    if (ia < 0 || ib < 0) return;
    tissue.edges.push_back({std::min(ia, ib), std::max(ia, ib), config.gap_conductance});
  };
  for (int y = 0; y < config.height; ++y) {
    for (int x = 0; x < config.width; ++x) {
      add_edge({x, y}, {x + 1, y});
      add_edge({x, y}, {x, y + 1});
      if (config.eight_neighborhood) {
        add_edge({x, y}, {x + 1, y + 1});
        add_edge({x, y}, {x + 1, y - 1});
      }
    }
  }
  return tissue;
}

std::vector<IonArray> junctional_currents(const Tissue& tissue) {
  std::vector<IonArray> currents(tissue.cells.size(), IonArray{});
  for (const GapEdge& e : tissue.edges) {
    if (!tissue.is_live(e.a) || !tissue.is_live(e.b)) continue;
    const TissueCell& ca = tissue.cells[e.a];
    const TissueCell& cb = tissue.cells[e.b];
    const double total = e.conductance * (ca.state.v_mem - cb.state.v_mem);
    if (total == 0.0) continue;

    // Apportion by the mean permeability fraction of the two endpoints so the
    // per-ion split is identical on both sides of the edge.
    IonArray frac{};
    double perm_sum = 0.0;
    for (int i = 0; i < kNumIons; ++i) {
      frac[i] = 0.5 * (ca.state.perms[i] + cb.state.perms[i]);
      perm_sum += frac[i];
    }
    if (perm_sum > 0.0) {
      for (int i = 0; i < kNumIons; ++i) frac[i] /= perm_sum;
    } else {
      for (int i = 0; i < kNumIons; ++i) frac[i] = 1.0 / kNumIons;
    }
    for (int i = 0; i < kNumIons; ++i) {
      const double share = total * frac[i];
      currents[e.a][i] += share;   // outward for the higher-voltage cell
      currents[e.b][i] -= share;
    }
  }
  return currents;
}

void apply_voltage_mesh(Tissue& tissue, const VoltageMesh& mesh, double v_min, double v_max) {
  const double w = tissue.domain_width();
  const double h = tissue.domain_height();
  for (const Electrode& e : mesh.electrodes) {
    if (e.v_set < v_min || e.v_set > v_max) {
      throw InvalidArgument("ActionOutOfRange: electrode target outside [V_min, V_max]");
    }
    if (e.x < 0.0 || e.x > w || e.y < 0.0 || e.y > h) {
      throw InvalidArgument("apply_voltage_mesh: electrode outside the tissue domain");
    }
  }

  const double half = mesh.footprint / 2.0;
  for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
    if (!tissue.is_live(i)) continue;
    TissueCell& cell = tissue.cells[i];
    if (cell.lesion) continue;

    const double cx = tissue.world_x(cell);
    const double cy = tissue.world_y(cell);
    int best = -1;
    double best_dist = 0.0;
    for (int k = 0; k < static_cast<int>(mesh.electrodes.size()); ++k) {
      const Electrode& e = mesh.electrodes[k];
      const bool covered = mesh.footprint <= 0.0 ||
                           (std::abs(cx - e.x) <= half && std::abs(cy - e.y) <= half);
      if (!covered) continue;
      const double d = std::hypot(cx - e.x, cy - e.y);
      if (best < 0 || d < best_dist) {
        best = k;
        best_dist = d;
      }
    }
    if (best >= 0) {
      cell.state.clamp = mesh.electrodes[best].v_set;
    } else {
      cell.state.clamp.reset();
    }
  }
}

namespace {

void remove_incident_edges(Tissue& tissue, int idx) {
  std::erase_if(tissue.edges, [idx](const GapEdge& e) { return e.a == idx || e.b == idx; });
}

std::vector<GridPos> neighbor_sites(const Tissue& tissue, GridPos p) {
  std::vector<GridPos> out;
  const int dx4[] = {1, -1, 0, 0};
  const int dy4[] = {0, 0, 1, -1};
  for (int k = 0; k < 4; ++k) {
    GridPos q{p.x + dx4[k], p.y + dy4[k]};
    if (tissue.site_allowed(q)) out.push_back(q);
  }
  if (tissue.config.eight_neighborhood) {
    const int dx8[] = {1, 1, -1, -1};
    const int dy8[] = {1, -1, 1, -1};
    for (int k = 0; k < 4; ++k) {
      GridPos q{p.x + dx8[k], p.y + dy8[k]};
      if (tissue.site_allowed(q)) out.push_back(q);
    }
  }
  return out;
}

void connect_to_live_neighbors(Tissue& tissue, int idx) {
  for (GridPos q : neighbor_sites(tissue, tissue.cells[idx].pos)) {
    const int other = tissue.site_cell[tissue.site_index(q)];
    if (other >= 0 && other != idx && tissue.is_live(other)) {
      tissue.edges.push_back(
          {std::min(idx, other), std::max(idx, other), tissue.config.gap_conductance});
    }
  }
}

void kill_cell(Tissue& tissue, int idx) {
  TissueCell& cell = tissue.cells[idx];
  cell.phenotype.kind = PhenotypeKind::Dead;
  cell.dead_timer = 0.0;
  cell.state.clamp.reset();
  cell.lesion = false;
  remove_incident_edges(tissue, idx);
}

} // namespace

LifecycleEvents step_lifecycle(Tissue& tissue, double dt,
                               const std::unordered_map<int, GridPos>* migration_targets) {
  if (dt <= 0.0) throw InvalidArgument("step_lifecycle: dt must be positive");
  LifecycleEvents events;
  const LifecycleConfig& lc = tissue.config.lifecycle;
  const int n = static_cast<int>(tissue.cells.size());  // children act from the next step

  for (int i = 0; i < n; ++i) {
    TissueCell& cell = tissue.cells[i];

    if (cell.phenotype.kind == PhenotypeKind::Dead) {
      if (!cell.cleared) {
        cell.dead_timer += dt;
        if (cell.dead_timer >= lc.tau_clear) {
          cell.cleared = true;
          tissue.site_cell[tissue.site_index(cell.pos)] = -1;
          ++events.cleared;
        }
      }
      continue;
    }

    cell.phenotype.age += dt;

    // Apoptotic cells complete their death on the following lifecycle step.
    if (cell.phenotype.kind == PhenotypeKind::Apoptotic) {
      kill_cell(tissue, i);
      ++events.deaths;
      continue;
    }

    // Gene expression relaxes toward the phenotype-specific targets.
    if (lc.k_gene > 0.0) {
      const std::vector<double>& targets = cell.phenotype.kind == PhenotypeKind::Differentiated
                                               ? lc.gene_targets_differentiated
                                               : lc.gene_targets_progenitor;
      for (std::size_t gidx = 0;
           gidx < cell.phenotype.gene_expr.size() && gidx < targets.size(); ++gidx) {
        double& g = cell.phenotype.gene_expr[gidx];
        g += dt * lc.k_gene * (targets[gidx] - g);
      }
    }

    const double v = cell.state.v_mem;

    if (cell.phenotype.kind == PhenotypeKind::Progenitor && v > lc.v_depol && lc.p_divide > 0.0 &&
        tissue.rng.bernoulli(std::min(1.0, lc.p_divide * dt))) {
      std::vector<GridPos> free_sites;
      for (GridPos q : neighbor_sites(tissue, cell.pos)) {
        if (tissue.site_cell[tissue.site_index(q)] < 0) free_sites.push_back(q);
      }
      if (!free_sites.empty()) {
        const GridPos target = free_sites[tissue.rng.uniform_index(free_sites.size())];
        TissueCell child;
        child.state = cell.state;
        child.state.clamp.reset();
        child.phenotype = cell.phenotype;
        child.phenotype.kind = PhenotypeKind::Progenitor;
        child.phenotype.age = 0.0;
        child.pos = target;
        const int child_idx = static_cast<int>(tissue.cells.size());
        tissue.cells.push_back(std::move(child));
        tissue.site_cell[tissue.site_index(target)] = child_idx;
        connect_to_live_neighbors(tissue, child_idx);
        ++events.divisions;
      }
    }

    if (tissue.cells[i].phenotype.kind == PhenotypeKind::Progenitor && v < lc.v_hyper &&
        lc.p_differentiate > 0.0 &&
        tissue.rng.bernoulli(std::min(1.0, lc.p_differentiate * dt))) {
      tissue.cells[i].phenotype.kind = PhenotypeKind::Differentiated;
      ++events.differentiations;
    }

    {
      TissueCell& c = tissue.cells[i];
      if (v < lc.v_apop_lo || v > lc.v_apop_hi) {
        c.band_timer += dt;
        if (c.band_timer > lc.tau_apop && c.phenotype.kind != PhenotypeKind::Apoptotic) {
          c.phenotype.kind = PhenotypeKind::Apoptotic;
          ++events.apoptoses;
        }
      } else {
        c.band_timer = 0.0;
      }
    }

    if (migration_targets != nullptr && lc.p_migrate > 0.0) {
      auto it = migration_targets->find(i);
      TissueCell& c = tissue.cells[i];
      if (it != migration_targets->end() && c.phenotype.kind != PhenotypeKind::Apoptotic &&
          !(it->second == c.pos) && tissue.rng.bernoulli(std::min(1.0, lc.p_migrate * dt))) {
        // Hop to the free neighbor site closest to the target.
        int best = -1;
        double best_d = 0.0;
        std::vector<GridPos> neigh = neighbor_sites(tissue, c.pos);
        for (int k = 0; k < static_cast<int>(neigh.size()); ++k) {
          if (tissue.site_cell[tissue.site_index(neigh[k])] >= 0) continue;
          const double d = std::hypot(static_cast<double>(neigh[k].x - it->second.x),
                                      static_cast<double>(neigh[k].y - it->second.y));
          if (best < 0 || d < best_d) {
            best = k;
            best_d = d;
          }
        }
        const double cur_d = std::hypot(static_cast<double>(c.pos.x - it->second.x),
                                        static_cast<double>(c.pos.y - it->second.y));
        if (best >= 0 && best_d < cur_d) {
          tissue.site_cell[tissue.site_index(c.pos)] = -1;
          c.pos = neigh[best];
          tissue.site_cell[tissue.site_index(c.pos)] = i;
          remove_incident_edges(tissue, i);
          connect_to_live_neighbors(tissue, i);
          ++events.migrations;
        }
      }
    }
  }
  return events;
}

void induce_injury(Tissue& tissue, const InjurySpec& spec) {
  auto in_region = [&](double x, double y) {
    if (spec.is_disk) {
      const double dx = x - spec.cx;
      const double dy = y - spec.cy;
      return dx * dx + dy * dy <= spec.radius * spec.radius;
    }
    return x >= spec.x0 && x <= spec.x1 && y >= spec.y0 && y <= spec.y1;
  };

  std::vector<int> live_hits;
  bool any_hit = false;
  for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
    const TissueCell& cell = tissue.cells[i];
    if (cell.cleared) continue;
    if (!in_region(tissue.world_x(cell), tissue.world_y(cell))) continue;
    any_hit = true;
    if (tissue.is_live(i)) live_hits.push_back(i);
  }
  if (!any_hit) {
    throw InvalidArgument("EmptyRegion: injury region intersects no cell");
  }
  // Re-injuring an already dead region is a no-op, keeping ablation idempotent.
  for (int i : live_hits) {
    if (spec.mode == InjuryMode::Ablate) {
      kill_cell(tissue, i);
    } else {
      tissue.cells[i].lesion = true;
      tissue.cells[i].state.clamp = spec.magnitude;
    }
  }
}

TopologyGraph extract_topology(const Tissue& tissue) {
  TopologyGraph graph;
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
    if (tissue.is_live(i)) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const GridPos& pa = tissue.cells[a].pos;
    const GridPos& pb = tissue.cells[b].pos;
    return pa.y != pb.y ? pa.y < pb.y : pa.x < pb.x;
  });

  std::unordered_map<int, int> node_of;
  for (int i = 0; i < static_cast<int>(order.size()); ++i) {
    const TissueCell& cell = tissue.cells[order[i]];
    graph.nodes.push_back({order[i], tissue.world_x(cell), tissue.world_y(cell)});
    node_of[order[i]] = i;
  }
  for (const GapEdge& e : tissue.edges) {
    auto ia = node_of.find(e.a);
    auto ib = node_of.find(e.b);
    if (ia == node_of.end() || ib == node_of.end()) continue;
    graph.edges.emplace_back(std::min(ia->second, ib->second), std::max(ia->second, ib->second));
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()), graph.edges.end());
  return graph;
}

LifecycleEvents step_tissue(Tissue& tissue, const VoltageMesh& mesh, double dt, double v_min,
                            double v_max, int n_substeps, Scheme scheme,
                            const std::unordered_map<int, GridPos>* migration_targets) {
  if (dt <= 0.0) throw InvalidArgument("step_tissue: dt must be positive");
  if (n_substeps < 1) throw InvalidArgument("step_tissue: n_substeps must be >= 1");

  apply_voltage_mesh(tissue, mesh, v_min, v_max);

  const double h = dt / n_substeps;
  for (int sub = 0; sub < n_substeps; ++sub) {
    const std::vector<IonArray> junctional = junctional_currents(tissue);
    for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
      if (!tissue.is_live(i)) continue;
      TissueCell& cell = tissue.cells[i];
      cell.state = step_cell(cell.state, tissue.config.cell_params, junctional[i], h, scheme);
    }
  }

  LifecycleEvents events = step_lifecycle(tissue, dt, migration_targets);
  tissue.t += dt;
  return events;
}

std::string topology_to_edge_list(const TopologyGraph& graph) {
  std::ostringstream out;
  out << "# nodes " << graph.nodes.size() << "\n";
  for (int i = 0; i < static_cast<int>(graph.nodes.size()); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d %.17g %.17g\n", i, graph.nodes[i].x, graph.nodes[i].y);
    out << buf;
  }
  out << "# edges " << graph.edges.size() << "\n";
  for (const auto& [a, b] : graph.edges) {
    out << a << " " << b << "\n";
  }
  return out.str();
}

} // namespace biovolt
