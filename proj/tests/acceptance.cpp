// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits non-zero if any criterion fails. Oracles are computed
// independently of the library code under test.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "causal.hpp"
#include "config.hpp"
#include "env.hpp"
#include "errors.hpp"
#include "learner.hpp"
#include "logio.hpp"
#include "membrane.hpp"
#include "metrics.hpp"
#include "nets.hpp"
#include "rng.hpp"
#include "runners.hpp"
#include "tissue.hpp"

using namespace biovolt;
namespace fs = std::filesystem;

namespace {

bool report(int idx, const std::string& what, bool ok) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", idx, what.c_str());
  std::fflush(stdout);
  return ok;
}

// ---------------------------------------------------------------- criterion 1

double nernst_oracle(int z, double c_in, double c_out, double t) {
  return 8.314 * t / (z * 96485.0) * std::log(c_out / c_in);
}

bool check_ghk_voltage() {
  Rng rng(1001);
  for (int i = 0; i < 1000; ++i) {
    const double c_in = rng.uniform(0.05, 400.0);
    const double c_out = rng.uniform(0.05, 400.0);
    const double t = rng.uniform(273.0, 320.0);
    // One permeant ion at a time; the GHK voltage must collapse to Nernst.
    struct Case { Ion ion; int z; };
    for (const Case c : {Case{Ion::K, 1}, Case{Ion::Na, 1}, Case{Ion::Cl, -1}}) {
      CellState cell;
      ion_at(cell.conc_in, c.ion) = c_in;
      ion_at(cell.conc_out, c.ion) = c_out;
      ion_at(cell.perms, c.ion) = 1e-14;
      cell.temperature = t;
      if (std::abs(ghk_voltage(cell) - nernst_oracle(c.z, c_in, c_out, t)) >= 1e-9) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 2

bool check_flux_reversal_and_continuity() {
  Rng rng(1002);
  for (int i = 0; i < 500; ++i) {
    const double c_in = rng.uniform(0.1, 300.0);
    const double c_out = rng.uniform(0.1, 300.0);
    const Ion ion = (i % 2 == 0) ? Ion::K : Ion::Ca;
    CellState cell;
    ion_at(cell.conc_in, ion) = c_in;
    ion_at(cell.conc_out, ion) = c_out;
    cell.temperature = 310.0;
    cell.v_mem = nernst_potential(ion, c_in, c_out, 310.0);
    const double scale = 1e-14 * kFaraday * (c_in + c_out);
    if (std::abs(ghk_flux(ion, 1e-14, cell)) / scale >= 1e-12) return false;
  }
  // Continuity: through v = 0 and across the small-argument series handover.
  CellState cell;
  ion_at(cell.conc_in, Ion::K) = 140.0;
  ion_at(cell.conc_out, Ion::K) = 5.0;
  cell.temperature = 310.0;
  cell.v_mem = 0.0;
  const double at_zero = ghk_flux(Ion::K, 1e-14, cell);
  for (double v : {1e-12, -1e-12}) {
    cell.v_mem = v;
    if (std::abs(ghk_flux(Ion::K, 1e-14, cell) - at_zero) / std::abs(at_zero) >= 1e-6) {
      return false;
    }
  }
  const double v_switch = 1e-4 * kGasConstant * 310.0 / kFaraday;
  for (double sign : {1.0, -1.0}) {
    cell.v_mem = sign * v_switch * (1.0 - 1e-9);
    const double inside = ghk_flux(Ion::K, 1e-14, cell);
    cell.v_mem = sign * v_switch * (1.0 + 1e-9);
    const double outside = ghk_flux(Ion::K, 1e-14, cell);
    if (std::abs(inside - outside) / std::abs(inside) >= 1e-6) return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 3

bool check_conservation() {
  // Calcium-cascade pools over a million explicit steps.
  SignalingState sig;
  sig.k_on = 100.0;
  sig.k_off = 1.0;
  sig.k_pump = 2.0;
  sig.total_cam = 0.01;
  sig.cam_free = 0.007;
  sig.ca_cam = 0.003;
  sig.total_calcineurin = 0.02;
  sig.calcineurin_free = 0.012;
  sig.calcineurin_active = 0.008;
  double ca = 5e-4;
  for (long i = 0; i < 1000000; ++i) {
    const CascadeResult r = step_calcium_cascade(ca, sig, -2e-13, 1e-15, 1e-4);
    ca = r.ca_in;
    sig = r.sig;
    if (std::abs(sig.ca_cam + sig.cam_free - 0.01) > 1e-10) return false;
    if (std::abs(sig.calcineurin_active + sig.calcineurin_free - 0.02) > 1e-10) return false;
    if (ca < 0.0) return false;
  }

  // Gap-junction exchange creates or destroys nothing, 20x20 for 1000 steps.
  Scenario base = make_scenario("tissue-pattern");
  TissueConfig cfg = base.tissue;
  cfg.width = 20;
  cfg.height = 20;
  Tissue t = build_tissue(cfg, 5);
  VoltageMesh mesh;
  mesh.footprint = 10.0 * cfg.spacing;
  mesh.electrodes = {{2.0 * cfg.spacing, 2.0 * cfg.spacing, -0.1},
                     {17.0 * cfg.spacing, 17.0 * cfg.spacing, -0.03}};
  for (int step = 0; step < 1000; ++step) {
    step_tissue(t, mesh, 0.01, -0.2, 0.05, 1, Scheme::RK4, nullptr);
    const auto currents = junctional_currents(t);
    double scale = 0.0;
    for (const IonArray& c : currents) {
      for (double v : c) scale += std::abs(v);
    }
    for (int ion = 0; ion < kNumIons; ++ion) {
      double total = 0.0;
      for (const IonArray& c : currents) total += c[ion];
      // Zero to machine precision of the traffic volume: each per-cell entry
      // is a rounded sum of exactly antisymmetric per-edge shares.
      if (std::abs(total) > 1e-14 * scale) return false;
    }
  }

  // The antisymmetry itself is exact: on one edge the endpoint entries are a
  // single share each.
  TissueConfig pair_cfg = cfg;
  pair_cfg.width = 2;
  pair_cfg.height = 1;
  Tissue pair = build_tissue(pair_cfg, 1);
  pair.cells[0].state.v_mem = -0.08;
  pair.cells[1].state.v_mem = -0.03;
  const auto two = junctional_currents(pair);
  for (int ion = 0; ion < kNumIons; ++ion) {
    if (two[0][ion] != -two[1][ion]) return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 4

bool check_rk4_order() {
  CellState cell;
  ion_at(cell.conc_in, Ion::Na) = 10.0;
  ion_at(cell.conc_in, Ion::K) = 140.0;
  ion_at(cell.conc_in, Ion::Cl) = 10.0;
  ion_at(cell.conc_in, Ion::Ca) = 1e-4;
  ion_at(cell.conc_out, Ion::Na) = 145.0;
  ion_at(cell.conc_out, Ion::K) = 5.0;
  ion_at(cell.conc_out, Ion::Cl) = 110.0;
  ion_at(cell.conc_out, Ion::Ca) = 2.0;
  ion_at(cell.perms, Ion::Na) = 1e-16;
  ion_at(cell.perms, Ion::K) = 1e-14;
  ion_at(cell.perms, Ion::Cl) = 1e-16;
  ion_at(cell.perms, Ion::Ca) = 1e-17;
  cell.temperature = 310.0;
  cell.volume = 1e-15;
  cell.clamp = -0.05;
  cell.sig.k_on = 100.0;
  cell.sig.k_off = 1.0;
  cell.sig.k_pump = 2.0;
  cell.sig.total_cam = 0.01;
  cell.sig.cam_free = 0.01;
  cell.sig.total_calcineurin = 0.01;
  cell.sig.calcineurin_free = 0.01;
  CellParams params;
  const IonArray none{};
  const double total_time = 2.0;

  auto final_k = [&](double dt) {
    CellState s = cell;
    const long n = std::lround(total_time / dt);
    for (long i = 0; i < n; ++i) s = step_cell(s, params, none, dt, Scheme::RK4);
    return ion_at(s.conc_in, Ion::K);
  };

  const double ref = final_k(1e-4);
  std::vector<double> log_dt, log_err;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    const double err = std::abs(final_k(dt) - ref);
    if (err <= 0.0) return false;  // would mean no resolvable error signal
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(err));
  }
  // Least-squares slope of log(error) vs log(dt).
  const std::size_t n = log_dt.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += log_dt[i];
    sy += log_err[i];
    sxx += log_dt[i] * log_dt[i];
    sxy += log_dt[i] * log_err[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  std::printf("  rk4 convergence slope: %.3f\n", slope);
  return std::abs(slope - 4.0) <= 0.3;
}

// ---------------------------------------------------------------- criterion 5

double hausdorff_oracle(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  auto directed = [](const std::vector<Point2>& p, const std::vector<Point2>& q) {
    double worst = 0.0;
    for (const Point2& u : p) {
      double best = 1e300;
      for (const Point2& v : q) best = std::min(best, std::hypot(u.x - v.x, u.y - v.y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

bool check_hausdorff() {
  Rng rng(1005);
  auto random_points = [&](int n) {
    std::vector<Point2> pts(n);
    for (Point2& p : pts) {
      p.x = rng.uniform(-50.0, 50.0);
      p.y = rng.uniform(-50.0, 50.0);
    }
    return pts;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_points(1 + static_cast<int>(rng.uniform_index(80)));
    const auto b = random_points(1 + static_cast<int>(rng.uniform_index(80)));
    const double got = hausdorff(a, b);
    const double want = hausdorff_oracle(a, b);
    if (std::abs(got - want) > 1e-12 * std::max(1.0, want)) return false;
    if (hausdorff(a, a) != 0.0) return false;
    if (hausdorff(a, b) != hausdorff(b, a)) return false;
    const auto c = random_points(10);
    if (hausdorff(a, c) > hausdorff(a, b) + hausdorff(b, c) + 1e-12) return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 6

bool check_reward_optimum() {
  Scenario s = make_scenario("tissue-pattern");
  Tissue at_target = build_tissue(s.tissue, 0);
  for (TissueCell& c : at_target.cells) {
    c.state.v_mem = s.target.target_vfield.at(c.pos.y * s.tissue.width + c.pos.x);
  }
  TargetSpec target = s.target;
  target.i_max = 1e6;  // keep standing GHK currents out of the comparison
  RewardWeights w = s.weights;
  w.morph = 1e5;
  w.topo = 2.0;
  w.prolif = 1.0;
  const double best = organ_reward(at_target, target, w).total;

  Rng rng(1006);
  for (int trial = 0; trial < 1000; ++trial) {
    Tissue perturbed = build_tissue(s.tissue, 0);
    for (TissueCell& c : perturbed.cells) {
      const double goal = s.target.target_vfield.at(c.pos.y * s.tissue.width + c.pos.x);
      c.state.v_mem = goal + rng.uniform(-0.04, 0.04);
      if (rng.bernoulli(0.15)) c.phenotype.kind = PhenotypeKind::Dead;
    }
    const RewardBreakdown b = organ_reward(perturbed, target, w);
    if (b.total > best + 1e-12) return false;
    const double recomputed =
        b.morph + b.topo + b.bioelec + b.diff + b.prolif + b.apop + b.gene + b.mig + b.eff;
    if (std::abs(b.total - recomputed) > 1e-12 * std::max(1.0, std::abs(b.total))) return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 7

bool check_log_determinism() {
  const fs::path root = fs::temp_directory_path() / "bv_acceptance_logs";
  fs::remove_all(root);
  for (const std::string& name : scenario_names()) {
    Config cfg;
    cfg.set("scenario", name);
    cfg.set("horizon", "12");
    cfg.set("policy", "random");
    cfg.set("episodes", "2");
    cfg.set("seed", "31");
    cfg.set("snapshots", "3");
    const fs::path a = root / (name + "_a");
    const fs::path b = root / (name + "_b");
    run_simulate(cfg, a.string());
    run_simulate(cfg, b.string());
    for (const std::string& stem : {std::string("episode_31"), std::string("episode_32")}) {
      const std::string fa = read_text_file((a / (stem + ".jsonl")).string());
      const std::string fb = read_text_file((b / (stem + ".jsonl")).string());
      if (fa.empty() || fa != fb) return false;
      const std::string ca = read_text_file((a / (stem + "_steps.csv")).string());
      const std::string cb = read_text_file((b / (stem + "_steps.csv")).string());
      if (ca != cb) return false;
    }
  }
  fs::remove_all(root);
  return true;
}

// ---------------------------------------------------------------- criterion 8

bool check_single_cell_training() {
  const Scenario s = make_scenario("cell-homeostasis");
  const int eval_episodes = 10;
  const std::uint64_t eval_base = 7000;

  // Oracle first: exhaustive sweep of constant clamps on a 1 mV grid.
  double best_constant = -1e300;
  double best_v = s.target.v_min;
  for (double v = s.target.v_min; v <= s.target.v_max + 1e-12; v += 0.001) {
    const double clamped = std::min(v, s.target.v_max);
    const double ret = evaluate_policy(
        s, [clamped](const std::vector<double>&) { return std::vector<double>{clamped}; },
        eval_episodes, eval_base);
    if (ret > best_constant) {
      best_constant = ret;
      best_v = clamped;
    }
  }
  std::printf("  constant-clamp oracle: %.2f at %.3f V\n", best_constant, best_v);

  TrainConfig tc;
  tc.total_steps = 40000;  // well under the 100k budget
  tc.warmup_steps = 2000;
  tc.batch_size = 128;
  tc.hidden = {64, 64};
  tc.eval_every = 4000;
  tc.eval_episodes = 5;
  tc.seed = 1;
  tc.eval_seed_base = eval_base;
  const TrainResult result = train(s, tc);
  const double trained = evaluate(s, result.agent, eval_episodes, eval_base);
  std::printf("  trained return: %.2f (bar: %.2f)\n", trained, 0.9 * best_constant);
  return trained >= 0.9 * best_constant;
}

// ---------------------------------------------------------------- criterion 9

bool check_tissue_training() {
  const Scenario s = make_scenario("heart-recovery");
  const int eval_episodes = 10;
  const std::uint64_t eval_base = 8000;

  Rng noise(1009);
  const double random_ret = evaluate_policy(
      s,
      [&](const std::vector<double>&) {
        std::vector<double> a(static_cast<std::size_t>(s.action_dim()));
        for (double& v : a) v = noise.uniform(s.target.v_min, s.target.v_max);
        return a;
      },
      eval_episodes, eval_base);

  double unclamped_ret = 0.0;
  for (int e = 0; e < eval_episodes; ++e) {
    Environment env(s, eval_base + static_cast<std::uint64_t>(e));
    env.reset();
    std::vector<double> rewards;
    while (!env.done()) rewards.push_back(env.step_unclamped().reward);
    unclamped_ret += discounted_return(rewards, s.gamma);
  }
  unclamped_ret /= eval_episodes;

  TrainConfig tc;
  tc.total_steps = 12000;
  tc.warmup_steps = 300;
  tc.batch_size = 128;
  tc.hidden = {64, 64};
  // A conservative actor step keeps the policy stable while the critics catch
  // up; the reward scale here is large and an aggressive actor follows early,
  // inaccurate value estimates into the lethal voltage bands.
  tc.actor_lr = 3e-5;
  tc.expl_noise = 0.1;
  tc.policy_noise = 0.1;
  tc.eval_every = 1000;
  tc.eval_episodes = 3;
  tc.seed = 2;
  tc.eval_seed_base = eval_base;
  const TrainResult result = train(s, tc);
  const double trained = evaluate(s, result.agent, eval_episodes, eval_base);
  std::printf("  trained %.2f vs random %.2f, zero-intervention %.2f\n", trained, random_ret,
              unclamped_ret);
  return trained > random_ret && trained > unclamped_ret;
}

// --------------------------------------------------------------- criterion 10

struct PathOracle {
  int n = 0;
  std::vector<std::vector<bool>> edge;

  bool blocked(const std::vector<int>& path, const std::set<int>& z,
               const std::set<int>& z_desc) const {
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      const int prev = path[i - 1], mid = path[i], next = path[i + 1];
      const bool collider = edge[prev][mid] && edge[next][mid];
      if (collider ? (!z.count(mid) && !z_desc.count(mid)) : (z.count(mid) > 0)) return true;
    }
    return false;
  }

  bool d_sep(int x, int y, const std::set<int>& zs) const {
    std::set<int> z_desc;
    for (int v = 0; v < n; ++v) {
      std::vector<bool> seen(n, false);
      std::function<bool(int)> reaches = [&](int u) {
        if (zs.count(u)) return true;
        seen[u] = true;
        for (int w = 0; w < n; ++w) {
          if (edge[u][w] && !seen[w] && reaches(w)) return true;
        }
        return false;
      };
      if (reaches(v)) z_desc.insert(v);
    }
    std::vector<int> path = {x};
    std::vector<bool> used(n, false);
    used[x] = true;
    bool active = false;
    std::function<void(int)> dfs = [&](int v) {
      if (active) return;
      if (v == y) {
        if (!blocked(path, zs, z_desc)) active = true;
        return;
      }
      for (int w = 0; w < n; ++w) {
        if (used[w] || (!edge[v][w] && !edge[w][v])) continue;
        used[w] = true;
        path.push_back(w);
        dfs(w);
        path.pop_back();
        used[w] = false;
      }
    };
    dfs(x);
    return !active;
  }
};

bool check_causal_suite() {
  Rng rng(1010);
  // Independence queries against the all-paths oracle, every conditioning
  // subset of each random graph.
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_index(8));  // 3..10 nodes
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
    PathOracle oracle;
    oracle.n = n;
    oracle.edge.assign(n, std::vector<bool>(n, false));
    std::vector<std::pair<std::string, std::string>> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (rng.bernoulli(0.3)) {
          edges.emplace_back(names[a], names[b]);
          oracle.edge[a][b] = true;
        }
      }
    }
    const CausalDag dag(names, edges);
    const int x = static_cast<int>(rng.uniform_index(n));
    int y = static_cast<int>(rng.uniform_index(n));
    while (y == x) y = static_cast<int>(rng.uniform_index(n));

    std::vector<int> rest;
    for (int v = 0; v < n; ++v) {
      if (v != x && v != y) rest.push_back(v);
    }
    const int subsets = 1 << rest.size();
    for (int mask = 0; mask < subsets; ++mask) {
      std::set<int> zi;
      NodeSet z;
      for (std::size_t k = 0; k < rest.size(); ++k) {
        if (mask & (1 << k)) {
          zi.insert(rest[k]);
          z.insert(names[rest[k]]);
        }
      }
      if (d_separated(dag, {names[x]}, {names[y]}, z) != oracle.d_sep(x, y, zi)) return false;
    }
  }

  // The built-in action graph has exactly one minimal adjustment set.
  const CausalDag direct = builtin_dag("vmem-direct");
  const auto sets = backdoor_sets(direct, "Vmem", "Behaviours", 2);
  if (sets.empty() || sets.front() != NodeSet{"E"}) return false;
  if (is_backdoor_admissible(direct, "Vmem", "Behaviours", {})) return false;

  // Synthetic confounded model, 1e5 rows: the adjusted estimate recovers the
  // interventional truth within 3 standard errors; the naive conditional
  // does not.
  const CausalDag g({"Z", "X", "Y"}, {{"Z", "X"}, {"Z", "Y"}, {"X", "Y"}});
  Rng sim(1011);
  TrajectoryTable t;
  t.columns = {"Z", "X", "Y"};
  const int rows = 100000;
  long n_x1 = 0, n_y1_x1 = 0;
  for (int i = 0; i < rows; ++i) {
    const int zv = sim.bernoulli(0.5) ? 1 : 0;
    const int xv = sim.bernoulli(0.2 + 0.6 * zv) ? 1 : 0;
    const int yv = sim.bernoulli(0.1 + 0.4 * xv + 0.4 * zv) ? 1 : 0;
    t.rows.push_back({zv, xv, yv});
    if (xv == 1) {
      ++n_x1;
      n_y1_x1 += yv;
    }
  }
  const double truth = 0.7;  // 0.5 * 0.5 + 0.5 * 0.9
  const double naive = static_cast<double>(n_y1_x1) / static_cast<double>(n_x1);
  const AdjustResult r = adjust(t, g, "X", "Y", {"Z"});
  double adjusted = -1.0;
  for (const auto& e : r.estimates) {
    if (e.x == 1 && e.y == 1) adjusted = e.p;
  }
  const double se = std::sqrt(truth * (1.0 - truth) / static_cast<double>(n_x1));
  std::printf("  adjusted %.4f naive %.4f truth %.4f se %.4f\n", adjusted, naive, truth, se);
  return std::abs(adjusted - truth) < 3.0 * se && std::abs(naive - truth) > 3.0 * se;
}

// --------------------------------------------------------------- criterion 11

bool check_critic_gradient() {
  Rng rng(1011);
  TrainConfig cfg;
  cfg.hidden = {16, 16};
  Agent agent(5, 2, -1.0, 1.0, cfg, rng);

  ReplayBuffer buf(64);
  for (int i = 0; i < 32; ++i) {
    Transition tr;
    for (int k = 0; k < 5; ++k) tr.obs.push_back(rng.uniform(-1.0, 1.0));
    tr.action = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    tr.next_obs = tr.obs;
    tr.reward = rng.uniform(-1.0, 1.0);
    buf.add(std::move(tr));
  }
  Rng sample_rng(3);
  const auto batch = buf.sample_indices(sample_rng, 8);
  std::vector<double> targets;
  for (std::size_t idx : batch) targets.push_back(buf.at(idx).reward);

  Mlp critic = agent.critic1();
  auto batch_loss = [&](const Mlp& net) {
    double acc = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const Transition& tr = buf.at(batch[k]);
      std::vector<double> in = tr.obs;
      for (double a : agent.normalise_action(tr.action)) in.push_back(a);
      const double q = net.forward(in)[0];
      acc += (q - targets[k]) * (q - targets[k]);
    }
    return acc / static_cast<double>(batch.size());
  };

  std::vector<double> grad(critic.param_count(), 0.0);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const Transition& tr = buf.at(batch[k]);
    std::vector<double> in = tr.obs;
    for (double a : agent.normalise_action(tr.action)) in.push_back(a);
    Mlp::Workspace ws;
    const double q = critic.forward(in, ws)[0];
    critic.backward(ws, {2.0 * (q - targets[k]) / static_cast<double>(batch.size())}, grad);
  }

  const double eps = 1e-6;
  for (std::size_t i = 0; i < critic.param_count(); ++i) {
    Mlp plus = critic, minus = critic;
    plus.params()[i] += eps;
    minus.params()[i] -= eps;
    const double fd = (batch_loss(plus) - batch_loss(minus)) / (2.0 * eps);
    // Floor the denominator at the central-difference noise level: with this
    // step size and loss magnitude the quotient itself is only accurate to
    // about 1e-11 absolute, so tiny gradient entries cannot be held to a
    // purely relative bar.
    const double denom = std::max({1e-6, std::abs(fd), std::abs(grad[i])});
    if (std::abs(grad[i] - fd) / denom >= 1e-4) return false;
  }
  return true;
}

} // namespace

int main() {
  bool ok = true;
  ok &= report(1, "membrane voltage collapses to the single-ion reversal potential",
               check_ghk_voltage());
  ok &= report(2, "ionic flux vanishes at reversal and is continuous through 0 V",
               check_flux_reversal_and_continuity());
  ok &= report(3, "cascade pools and gap-junction exchange conserve matter",
               check_conservation());
  ok &= report(4, "fourth-order integrator converges at fourth order", check_rk4_order());
  ok &= report(5, "shape distance matches a brute-force oracle and the metric axioms",
               check_hausdorff());
  ok &= report(6, "organ reward is maximal at the goal and its breakdown sums exactly",
               check_reward_optimum());
  ok &= report(7, "episode logs are byte-identical across repeated runs",
               check_log_determinism());
  ok &= report(8, "trained single-cell policy matches the constant-clamp oracle",
               check_single_cell_training());
  ok &= report(9, "trained tissue policy beats random and zero-intervention baselines",
               check_tissue_training());
  ok &= report(10, "independence tests, adjustment sets and deconfounding agree with oracles",
               check_causal_suite());
  ok &= report(11, "critic gradients match central finite differences", check_critic_gradient());
  return ok ? 0 : 1;
}
