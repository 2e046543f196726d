#include "env.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace biovolt {

namespace {

// Shared electrophysiology template: a K-dominated resting cell near -81 mV
// with slow Na/Cl/Ca leaks and a pump-balanced calcium cascade.
CellState default_cell() {
  CellState c;
  ion_at(c.conc_in, Ion::Na) = 10.0;
  ion_at(c.conc_in, Ion::K) = 140.0;
  ion_at(c.conc_in, Ion::Cl) = 10.0;
  ion_at(c.conc_in, Ion::Ca) = 1e-4;
  ion_at(c.conc_in, Ion::H) = 3.98e-5;  // pH 7.4
  ion_at(c.conc_out, Ion::Na) = 145.0;
  ion_at(c.conc_out, Ion::K) = 5.0;
  ion_at(c.conc_out, Ion::Cl) = 110.0;
  ion_at(c.conc_out, Ion::Ca) = 2.0;
  ion_at(c.conc_out, Ion::H) = 3.98e-5;
  ion_at(c.perms, Ion::Na) = 1e-18;
  ion_at(c.perms, Ion::K) = 1e-14;
  ion_at(c.perms, Ion::Cl) = 1e-17;
  ion_at(c.perms, Ion::Ca) = 1e-19;
  ion_at(c.perms, Ion::H) = 0.0;
  c.sig.k_on = 100.0;
  c.sig.k_off = 1.0;
  c.sig.k_pump = 2.0;
  c.sig.total_cam = 0.01;
  c.sig.cam_free = 0.01;
  c.sig.total_calcineurin = 0.01;
  c.sig.calcineurin_free = 0.01;
  c.sig.akt_active = 0.5;
  c.sig.serotonin = 1.0;
  c.sig.butyrate = 1.0;
  return c;
}

CellParams default_params() {
  CellParams p;
  p.relax.akt_target = 0.5;
  p.relax.serotonin_target = 1.0;
  p.relax.butyrate_target = 1.0;
  p.relax.rate = 0.0;
  return p;
}

void disable_lifecycle(LifecycleConfig& lc) {
  lc.p_divide = 0.0;
  lc.p_differentiate = 0.0;
  lc.p_migrate = 0.0;
  lc.v_apop_lo = -0.5;
  lc.v_apop_hi = 0.5;
  lc.tau_apop = 1e9;
}

/// Morphology/topology goal taken from the healthy (pre-injury) tissue.
void target_from_pristine(Scenario& s) {
  const Tissue pristine = build_tissue(s.tissue, 0);
  s.target.target_positions = live_cell_positions(pristine);
  s.target.target_topology = extract_topology(pristine);
  s.target.n_target = static_cast<int>(s.target.target_positions.size());
}

Scenario cell_homeostasis() {
  Scenario s;
  s.name = "cell-homeostasis";
  s.tissue.width = 1;
  s.tissue.height = 1;
  s.tissue.cell_template = default_cell();
  ion_at(s.tissue.cell_template.conc_in, Ion::K) = 60.0;  // displaced start
  s.tissue.cell_params = default_params();
  disable_lifecycle(s.tissue.lifecycle);
  s.reward_kind = RewardKind::Cell;

  ion_at(s.target.desired_conc, Ion::K) = 140.0;
  ion_at(s.target.conc_scale, Ion::K) = 20.0;
  s.target.desired_ph = 7.4;
  s.target.ph_scale = 1.0;
  s.target.desired_akt = 0.5;
  s.target.akt_scale = 1.0;
  s.target.desired_calcineurin = 0.0;
  s.target.calcineurin_scale = 1.0;
  s.target.i_max = 1e-6;
  s.target.v_min = -0.2;
  s.target.v_max = 0.05;

  s.weights = RewardWeights{};
  s.weights.homeostasis = 1.0;
  s.weights.signalling = 0.25;
  s.weights.efficiency = 0.1;

  s.horizon = 150;
  s.dt = 0.02;
  s.substeps = 10;
  s.gamma = 0.99;
  s.action_mode = ActionMode::Global;
  return s;
}

Scenario tissue_pattern() {
  Scenario s;
  s.name = "tissue-pattern";
  s.tissue.width = 5;
  s.tissue.height = 5;
  s.tissue.spacing = 1e-5;
  s.tissue.gap_conductance = 1e-12;
  s.tissue.cell_template = default_cell();
  s.tissue.cell_params = default_params();
  disable_lifecycle(s.tissue.lifecycle);
  s.reward_kind = RewardKind::Organ;

  const double h = s.tissue.spacing;
  s.action_mode = ActionMode::Mesh;
  s.electrode_layout = {{1.0 * h, 2.0 * h}, {3.0 * h, 2.0 * h}};
  s.electrode_footprint = 5.0 * h;  // each electrode drives roughly half the sheet

  // Two-level target field: left three columns vs right two.
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      s.target.target_vfield[y * 5 + x] = x <= 2 ? -0.08 : -0.04;
    }
  }
  target_from_pristine(s);
  s.target.i_max = 1e-4;
  s.target.v_min = -0.2;
  s.target.v_max = 0.05;
  s.target.max_morphology_error = 8.0 * h;

  s.weights = RewardWeights{};
  s.weights.morph = 0.0;
  s.weights.topo = 0.0;
  s.weights.bioelec = 1e17;  // squared volts times cell volume -> order one
  s.weights.diff = 0.0;
  s.weights.prolif = 0.0;
  s.weights.apop = 0.0;
  s.weights.gene = 0.0;
  s.weights.mig = 0.0;
  s.weights.eff = 0.0;

  s.horizon = 50;
  s.dt = 0.05;
  s.substeps = 5;
  s.gamma = 0.99;
  return s;
}

Scenario heart_recovery() {
  Scenario s;
  s.name = "heart-recovery";
  s.tissue.width = 9;
  s.tissue.height = 9;
  s.tissue.spacing = 1e-5;
  s.tissue.gap_conductance = 1e-12;
  s.tissue.cell_template = default_cell();
  s.tissue.cell_params = default_params();
  s.tissue.n_genes = 1;
  // Annular organ: the square ring at Chebyshev radius 3 from the centre.
  s.tissue.site_mask.assign(81, 0);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      if (std::max(std::abs(x - 4), std::abs(y - 4)) == 3) {
        s.tissue.site_mask[y * 9 + x] = 1;
      }
    }
  }
  auto& lc = s.tissue.lifecycle;
  lc.v_depol = -0.04;
  lc.p_divide = 2.0;
  lc.v_hyper = -0.12;
  lc.p_differentiate = 0.5;
  lc.v_apop_lo = -0.16;
  lc.v_apop_hi = 0.03;
  lc.tau_apop = 0.3;
  lc.tau_clear = 0.2;
  lc.k_gene = 0.5;
  lc.gene_targets_progenitor = {0.2};
  lc.gene_targets_differentiated = {1.0};
  s.reward_kind = RewardKind::Organ;

  const double h = s.tissue.spacing;
  s.action_mode = ActionMode::Mesh;
  // Eight electrodes around the ring, one per side and corner region.
  s.electrode_layout = {{1.0 * h, 1.0 * h}, {4.0 * h, 1.0 * h}, {7.0 * h, 1.0 * h},
                        {1.0 * h, 4.0 * h}, {7.0 * h, 4.0 * h},
                        {1.0 * h, 7.0 * h}, {4.0 * h, 7.0 * h}, {7.0 * h, 7.0 * h}};
  s.electrode_footprint = 5.0 * h;

  target_from_pristine(s);
  InjurySpec injury;
  injury.is_disk = true;
  injury.cx = 7.0 * h;
  injury.cy = 4.0 * h;
  injury.radius = 1.2 * h;  // three ring cells, one eighth of the organ
  injury.mode = InjuryMode::Ablate;
  s.injury = injury;

  s.target.target_vfield_uniform = -0.05;
  s.target.desired_genes = {1.0};
  s.target.gene_scale = {1.0};
  s.target.i_max = 1e-4;
  s.target.v_min = -0.2;
  s.target.v_max = 0.1;
  s.target.max_morphology_error = 8.0 * h;

  s.weights = RewardWeights{};
  s.weights.morph = 1e5;  // metres -> lattice units
  s.weights.topo = 2.0;
  s.weights.bioelec = 1e17;
  s.weights.diff = 0.2;
  s.weights.prolif = 1.0;
  s.weights.apop = 2.0;
  s.weights.gene = 0.1;
  s.weights.mig = 0.0;
  s.weights.eff = 0.5;

  s.horizon = 60;
  s.dt = 0.05;
  s.substeps = 5;
  s.gamma = 0.98;
  return s;
}

Ion ion_from_name(const std::string& name) {
  for (Ion ion : kAllIons) {
    if (name == ion_name(ion)) return ion;
  }
  throw ConfigError("unknown ion: " + name);
}

} // namespace

Environment::Environment(Scenario scenario, std::uint64_t seed)
    : scenario_(std::move(scenario)), seed_(seed), tissue_(build_tissue(scenario_.tissue, seed)) {
  if (scenario_.horizon <= 0) throw ConfigError("scenario horizon must be positive");
  if (scenario_.substeps <= 0) throw ConfigError("scenario substeps must be positive");
  if (scenario_.dt <= 0.0) throw ConfigError("scenario dt must be positive");
  if (scenario_.action_mode == ActionMode::Mesh && scenario_.electrode_layout.empty()) {
    throw ConfigError("mesh action mode requires at least one electrode");
  }
  for (int y = 0; y < scenario_.tissue.height; ++y) {
    for (int x = 0; x < scenario_.tissue.width; ++x) {
      if (tissue_.site_allowed({x, y})) obs_sites_.push_back(y * scenario_.tissue.width + x);
    }
  }
  const int per_site = 1 + static_cast<int>(scenario_.obs_ions.size()) + 3 + 2;
  obs_dim_ = static_cast<int>(obs_sites_.size()) * per_site + 2;
}

std::vector<double> Environment::reset() { return reset(seed_); }

std::vector<double> Environment::reset(std::uint64_t seed) {
  seed_ = seed;
  tissue_ = build_tissue(scenario_.tissue, seed);
  if (scenario_.injury) induce_injury(tissue_, *scenario_.injury);
  step_index_ = 0;
  started_ = true;
  done_ = false;
  return build_observation();
}

VoltageMesh Environment::action_to_mesh(const std::vector<double>& action) const {
  if (static_cast<int>(action.size()) != action_dim()) {
    throw InvalidArgument("ActionOutOfRange: expected " + std::to_string(action_dim()) +
                          " action entries, got " + std::to_string(action.size()));
  }
  for (double a : action) {
    if (!std::isfinite(a)) throw InvalidArgument("ActionOutOfRange: non-finite action entry");
  }
  if (scenario_.action_mode == ActionMode::Global) return VoltageMesh::global(action[0]);
  VoltageMesh mesh;
  mesh.footprint = scenario_.electrode_footprint;
  for (std::size_t i = 0; i < action.size(); ++i) {
    mesh.electrodes.push_back(
        {scenario_.electrode_layout[i].x, scenario_.electrode_layout[i].y, action[i]});
  }
  return mesh;
}

RewardBreakdown Environment::compute_reward() const {
  if (scenario_.reward_kind == RewardKind::Organ) {
    return organ_reward(tissue_, scenario_.target, scenario_.weights);
  }
  RewardBreakdown b;
  int live = -1;
  for (int i = 0; i < static_cast<int>(tissue_.cells.size()); ++i) {
    if (tissue_.is_live(i)) {
      live = i;
      break;
    }
  }
  if (live < 0) {
    b.total = scenario_.death_penalty;
    return b;
  }
  return cell_reward(tissue_.cells[live].state, scenario_.target, scenario_.weights);
}

StepResult Environment::step(const std::vector<double>& action) {
  return step_with_mesh(action_to_mesh(action));
}

StepResult Environment::step_unclamped() { return step_with_mesh(VoltageMesh{}); }

StepResult Environment::step_with_mesh(const VoltageMesh& mesh) {
  if (!started_) throw InvalidArgument("step before reset");
  if (done_) throw InvalidArgument("SteppedAfterDone: episode already terminated");

  StepResult r;
  r.events = step_tissue(tissue_, mesh, scenario_.dt, scenario_.target.v_min,
                         scenario_.target.v_max, scenario_.substeps, scenario_.scheme,
                         scenario_.target.migration_targets.empty()
                             ? nullptr
                             : &scenario_.target.migration_targets);
  ++step_index_;
  r.info = compute_reward();
  r.reward = r.info.total;
  done_ = step_index_ >= scenario_.horizon || tissue_.live_count() == 0;
  r.done = done_;
  r.observation = build_observation();
  return r;
}

std::vector<double> Environment::build_observation() const {
  std::vector<double> obs;
  obs.reserve(obs_dim_);
  const double v_scale = std::max(std::abs(scenario_.target.v_min), std::abs(scenario_.target.v_max));
  const double dw = std::max(tissue_.domain_width(), tissue_.config.spacing);
  const double dh = std::max(tissue_.domain_height(), tissue_.config.spacing);
  for (int site : obs_sites_) {
    const GridPos pos{site % scenario_.tissue.width, site / scenario_.tissue.width};
    const int idx = tissue_.site_cell[site];
    const bool live = tissue_.is_live(idx);
    if (!live) {
      // Dead or empty site sentinel: zeros, position included.
      obs.insert(obs.end(), 1 + scenario_.obs_ions.size() + 3, 0.0);
    } else {
      const TissueCell& cell = tissue_.cells[idx];
      obs.push_back(cell.state.v_mem / v_scale);
      for (Ion ion : scenario_.obs_ions) {
        const double ref = ion_at(scenario_.target.desired_conc, ion);
        const double c = ion_at(cell.state.conc_in, ion);
        obs.push_back(ref > 0.0 ? c / ref : c);
      }
      for (int k = 0; k < 3; ++k) {
        obs.push_back(static_cast<int>(cell.phenotype.kind) == k ? 1.0 : 0.0);
      }
    }
    obs.push_back(pos.x * tissue_.config.spacing / dw);
    obs.push_back(pos.y * tissue_.config.spacing / dh);
  }
  obs.push_back(static_cast<double>(tissue_.live_count()) / static_cast<double>(obs_sites_.size()));
  obs.push_back(static_cast<double>(step_index_) / static_cast<double>(scenario_.horizon));
  return obs;
}

double discounted_return(const std::vector<double>& rewards, double gamma) {
  double g = 1.0;
  double total = 0.0;
  for (double r : rewards) {
    total += g * r;
    g *= gamma;
  }
  return total;
}

std::vector<std::string> scenario_names() {
  return {"cell-homeostasis", "tissue-pattern", "heart-recovery"};
}

Scenario make_scenario(const std::string& name) {
  if (name == "cell-homeostasis") return cell_homeostasis();
  if (name == "tissue-pattern") return tissue_pattern();
  if (name == "heart-recovery") return heart_recovery();
  throw ConfigError("unknown scenario: " + name);
}

Scenario scenario_from_config(const Config& cfg) {
  Scenario s = make_scenario(cfg.get_string("scenario", "cell-homeostasis"));

  s.horizon = static_cast<int>(cfg.get_int("horizon", s.horizon));
  s.dt = cfg.get_double("dt", s.dt);
  s.substeps = static_cast<int>(cfg.get_int("substeps", s.substeps));
  s.gamma = cfg.get_double("gamma", s.gamma);
  s.death_penalty = cfg.get_double("death_penalty", s.death_penalty);
  const std::string scheme = cfg.get_string("scheme", s.scheme == Scheme::RK4 ? "rk4" : "euler");
  if (scheme == "rk4") {
    s.scheme = Scheme::RK4;
  } else if (scheme == "euler") {
    s.scheme = Scheme::Euler;
  } else {
    throw ConfigError("scheme must be rk4 or euler, got: " + scheme);
  }

  const bool resize = cfg.has("tissue.width") || cfg.has("tissue.height");
  s.tissue.width = static_cast<int>(cfg.get_int("tissue.width", s.tissue.width));
  s.tissue.height = static_cast<int>(cfg.get_int("tissue.height", s.tissue.height));
  if (resize && !s.tissue.site_mask.empty()) {
    throw ConfigError("cannot resize a scenario with a site mask");
  }
  s.tissue.spacing = cfg.get_double("tissue.spacing", s.tissue.spacing);
  s.tissue.gap_conductance = cfg.get_double("tissue.gap_conductance", s.tissue.gap_conductance);
  s.tissue.eight_neighborhood =
      cfg.get_bool("tissue.eight_neighborhood", s.tissue.eight_neighborhood);
  s.tissue.n_genes = static_cast<int>(cfg.get_int("tissue.n_genes", s.tissue.n_genes));

  auto& lc = s.tissue.lifecycle;
  lc.v_depol = cfg.get_double("lifecycle.v_depol", lc.v_depol);
  lc.p_divide = cfg.get_double("lifecycle.p_divide", lc.p_divide);
  lc.v_hyper = cfg.get_double("lifecycle.v_hyper", lc.v_hyper);
  lc.p_differentiate = cfg.get_double("lifecycle.p_differentiate", lc.p_differentiate);
  lc.v_apop_lo = cfg.get_double("lifecycle.v_apop_lo", lc.v_apop_lo);
  lc.v_apop_hi = cfg.get_double("lifecycle.v_apop_hi", lc.v_apop_hi);
  lc.tau_apop = cfg.get_double("lifecycle.tau_apop", lc.tau_apop);
  lc.tau_clear = cfg.get_double("lifecycle.tau_clear", lc.tau_clear);
  lc.k_gene = cfg.get_double("lifecycle.k_gene", lc.k_gene);
  lc.p_migrate = cfg.get_double("lifecycle.p_migrate", lc.p_migrate);

  for (Ion ion : kAllIons) {
    const std::string n = ion_name(ion);
    auto& cell = s.tissue.cell_template;
    ion_at(cell.conc_in, ion) = cfg.get_double("cell.conc_in." + n, ion_at(cell.conc_in, ion));
    ion_at(cell.conc_out, ion) = cfg.get_double("cell.conc_out." + n, ion_at(cell.conc_out, ion));
    ion_at(cell.perms, ion) = cfg.get_double("cell.perm." + n, ion_at(cell.perms, ion));
    ion_at(s.target.desired_conc, ion) =
        cfg.get_double("target.desired_conc." + n, ion_at(s.target.desired_conc, ion));
    ion_at(s.target.conc_scale, ion) =
        cfg.get_double("target.conc_scale." + n, ion_at(s.target.conc_scale, ion));
  }
  s.tissue.cell_template.temperature =
      cfg.get_double("cell.temperature", s.tissue.cell_template.temperature);
  s.tissue.cell_template.volume = cfg.get_double("cell.volume", s.tissue.cell_template.volume);

  s.target.v_min = cfg.get_double("target.v_min", s.target.v_min);
  s.target.v_max = cfg.get_double("target.v_max", s.target.v_max);
  s.target.i_max = cfg.get_double("target.i_max", s.target.i_max);
  if (cfg.has("target.vfield_uniform")) {
    s.target.target_vfield.clear();
    s.target.target_vfield_uniform = cfg.get_double("target.vfield_uniform", 0.0);
  }
  s.target.desired_ph = cfg.get_double("target.desired_ph", s.target.desired_ph);
  s.target.ph_scale = cfg.get_double("target.ph_scale", s.target.ph_scale);
  s.target.desired_akt = cfg.get_double("target.desired_akt", s.target.desired_akt);
  s.target.akt_scale = cfg.get_double("target.akt_scale", s.target.akt_scale);
  s.target.desired_calcineurin =
      cfg.get_double("target.desired_calcineurin", s.target.desired_calcineurin);
  s.target.calcineurin_scale =
      cfg.get_double("target.calcineurin_scale", s.target.calcineurin_scale);

  auto& w = s.weights;
  w.homeostasis = cfg.get_double("weights.homeostasis", w.homeostasis);
  w.signalling = cfg.get_double("weights.signalling", w.signalling);
  w.efficiency = cfg.get_double("weights.efficiency", w.efficiency);
  w.morph = cfg.get_double("weights.morph", w.morph);
  w.topo = cfg.get_double("weights.topo", w.topo);
  w.bioelec = cfg.get_double("weights.bioelec", w.bioelec);
  w.diff = cfg.get_double("weights.diff", w.diff);
  w.prolif = cfg.get_double("weights.prolif", w.prolif);
  w.apop = cfg.get_double("weights.apop", w.apop);
  w.gene = cfg.get_double("weights.gene", w.gene);
  w.mig = cfg.get_double("weights.mig", w.mig);
  w.eff = cfg.get_double("weights.eff", w.eff);

  if (cfg.has("injury.enabled") && !cfg.get_bool("injury.enabled", true)) {
    s.injury.reset();
  } else if (cfg.has("injury.radius") || cfg.has("injury.mode")) {
    InjurySpec spec = s.injury.value_or(InjurySpec{});
    spec.cx = cfg.get_double("injury.cx", spec.cx);
    spec.cy = cfg.get_double("injury.cy", spec.cy);
    spec.radius = cfg.get_double("injury.radius", spec.radius);
    spec.is_disk = true;
    const std::string mode = cfg.get_string(
        "injury.mode", spec.mode == InjuryMode::Ablate ? "ablate" : "depolarize_lesion");
    if (mode == "ablate") {
      spec.mode = InjuryMode::Ablate;
    } else if (mode == "depolarize_lesion") {
      spec.mode = InjuryMode::DepolarizeLesion;
    } else {
      throw ConfigError("injury.mode must be ablate or depolarize_lesion, got: " + mode);
    }
    spec.magnitude = cfg.get_double("injury.magnitude", spec.magnitude);
    s.injury = spec;
  }

  if (cfg.has("obs.ions")) {
    s.obs_ions.clear();
    std::string raw = cfg.get_string("obs.ions", "");
    std::erase(raw, '[');
    std::erase(raw, ']');
    std::size_t start = 0;
    while (start <= raw.size()) {
      std::size_t comma = raw.find(',', start);
      std::string tok = raw.substr(start, comma == std::string::npos ? std::string::npos
                                                                     : comma - start);
      const std::size_t a = tok.find_first_not_of(" \t");
      if (a != std::string::npos) {
        const std::size_t b = tok.find_last_not_of(" \t");
        s.obs_ions.push_back(ion_from_name(tok.substr(a, b - a + 1)));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }

  // Rebuild derived goals when the base geometry was resized.
  if (resize) {
    target_from_pristine(s);
    if (!s.target.target_vfield.empty()) {
      s.target.target_vfield.clear();
      s.target.target_vfield_uniform = -0.05;
    }
  }
  return s;
}

} // namespace biovolt
