#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "membrane.hpp"
#include "rng.hpp"

namespace biovolt {

enum class PhenotypeKind : int { Progenitor = 0, Differentiated = 1, Apoptotic = 2, Dead = 3 };

const char* phenotype_name(PhenotypeKind kind);

struct Phenotype {
  PhenotypeKind kind = PhenotypeKind::Progenitor;
  int differentiation_target = 0;  // tissue identity index
  std::vector<double> gene_expr;   // dimensionless levels, one per configured gene
  double age = 0.0;                // s
};

struct GridPos {
  int x = 0;
  int y = 0;
  bool operator==(const GridPos&) const = default;
};

/// One tissue cell: electrophysiology state, lifecycle phenotype, grid site.
struct TissueCell {
  CellState state;
  Phenotype phenotype;
  GridPos pos;
  double band_timer = 0.0;   // s spent outside the survival voltage band
  double dead_timer = 0.0;   // s since death; site frees after tau_clear
  bool cleared = false;      // dead and site released
  bool lesion = false;       // persistent depolarising lesion clamp
};

struct GapEdge {
  int a = 0;
  int b = 0;
  double conductance = 0.0;  // S
};

struct LifecycleConfig {
  double v_depol = -0.02;     // V; progenitors above this may divide
  double p_divide = 0.0;      // 1/s
  double v_hyper = -0.09;     // V; cells below this may differentiate
  double p_differentiate = 0.0;  // 1/s
  double v_apop_lo = -0.15;   // survival band
  double v_apop_hi = 0.05;
  double tau_apop = 1.0;      // s outside the band before apoptosis
  double tau_clear = 1.0;     // s a dead cell blocks its site
  double k_gene = 0.0;        // 1/s relaxation of gene expression
  double p_migrate = 0.0;     // 1/s hop rate toward assigned targets
  std::vector<double> gene_targets_progenitor;
  std::vector<double> gene_targets_differentiated;
};

struct TissueConfig {
  int width = 1;
  int height = 1;
  double spacing = 1e-5;         // m
  double gap_conductance = 0.0;  // S, uniform on construction
  bool eight_neighborhood = false;
  CellState cell_template;
  CellParams cell_params;
  LifecycleConfig lifecycle;
  int n_genes = 0;
  /// Sites cells may occupy (width*height, row-major); empty = all. Initial
  /// cells fill every allowed site; division and migration stay inside it.
  std::vector<std::uint8_t> site_mask;
};

struct Tissue {
  TissueConfig config;
  std::vector<TissueCell> cells;
  std::vector<GapEdge> edges;
  std::vector<int> site_cell;  // width*height occupancy, -1 = free
  double t = 0.0;
  Rng rng;

  int site_index(GridPos p) const { return p.y * config.width + p.x; }
  bool in_grid(GridPos p) const {
    return p.x >= 0 && p.x < config.width && p.y >= 0 && p.y < config.height;
  }
  bool site_allowed(GridPos p) const {
    return in_grid(p) &&
           (config.site_mask.empty() || config.site_mask[site_index(p)] != 0);
  }
  bool is_live(int idx) const {
    return idx >= 0 && idx < static_cast<int>(cells.size()) &&
           cells[idx].phenotype.kind != PhenotypeKind::Dead && !cells[idx].cleared;
  }
  int live_count() const;
  /// World coordinates of a cell's site centre.
  double world_x(const TissueCell& c) const { return c.pos.x * config.spacing; }
  double world_y(const TissueCell& c) const { return c.pos.y * config.spacing; }
  double domain_width() const { return (config.width - 1) * config.spacing; }
  double domain_height() const { return (config.height - 1) * config.spacing; }
};

struct Electrode {
  double x = 0.0;  // m, within the domain
  double y = 0.0;
  double v_set = 0.0;  // V
};

/// The agent's action: per-electrode clamp targets over the spatial domain.
/// footprint is the side of the square region each electrode drives;
/// footprint <= 0 means the electrode covers the whole domain.
struct VoltageMesh {
  std::vector<Electrode> electrodes;
  double footprint = 0.0;

  static VoltageMesh global(double v_set) {
    VoltageMesh m;
    m.electrodes.push_back({0.0, 0.0, v_set});
    m.footprint = -1.0;
    return m;
  }
};

enum class InjuryMode { Ablate, DepolarizeLesion };

struct InjurySpec {
  // Disk when radius >= 0, otherwise the axis-aligned rectangle.
  bool is_disk = true;
  double cx = 0.0, cy = 0.0, radius = 0.0;          // m
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;    // m, rectangle corners
  InjuryMode mode = InjuryMode::Ablate;
  double magnitude = 0.0;  // V, lesion clamp target
};

struct LifecycleEvents {
  int divisions = 0;
  int differentiations = 0;
  int apoptoses = 0;  // cells newly marked apoptotic
  int deaths = 0;
  int migrations = 0;
  int cleared = 0;
};

struct TopologyGraph {
  struct Node {
    int cell_index = 0;
    double x = 0.0;
    double y = 0.0;
  };
  std::vector<Node> nodes;                  // stable order: by (y, x)
  std::vector<std::pair<int, int>> edges;   // indices into nodes, a < b
};

Tissue build_tissue(const TissueConfig& config, std::uint64_t seed);

/// Ohmic gap-junction currents, apportioned to ion species by permeability
/// fractions. Pairwise antisymmetric, so the global sum is exactly zero.
std::vector<IonArray> junctional_currents(const Tissue& tissue);

/// Assign clamp targets from the mesh. Nearest electrode wins on overlap
/// (ties to the lowest electrode index); cells under no footprint are
/// unclamped. Lesion clamps persist and are not overridden.
void apply_voltage_mesh(Tissue& tissue, const VoltageMesh& mesh, double v_min, double v_max);

LifecycleEvents step_lifecycle(Tissue& tissue, double dt,
                               const std::unordered_map<int, GridPos>* migration_targets = nullptr);

void induce_injury(Tissue& tissue, const InjurySpec& spec);

TopologyGraph extract_topology(const Tissue& tissue);

/// One environment tick: mesh, junctional currents from the pre-step
/// snapshot, per-cell membrane integration (n_substeps of dt/n_substeps),
/// then lifecycle. t advances by dt.
LifecycleEvents step_tissue(Tissue& tissue, const VoltageMesh& mesh, double dt, double v_min,
                            double v_max, int n_substeps = 1, Scheme scheme = Scheme::RK4,
                            const std::unordered_map<int, GridPos>* migration_targets = nullptr);

/// Edge-list text export: node table with positions, then one "i j" per line.
std::string topology_to_edge_list(const TopologyGraph& graph);

} // namespace biovolt
