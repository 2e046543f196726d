#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "causal.hpp"
#include "errors.hpp"
#include "rng.hpp"

using namespace biovolt;

namespace {

// Brute-force d-separation oracle: enumerate every simple undirected path and
// apply the blocking rules node by node. Exponential, fine for tiny graphs.
struct PathOracle {
  int n = 0;
  std::vector<std::vector<bool>> edge;  // edge[a][b]: a -> b

  bool blocked(const std::vector<int>& path, const std::set<int>& z,
               const std::set<int>& z_desc) const {
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      const int prev = path[i - 1], mid = path[i], next = path[i + 1];
      const bool collider = edge[prev][mid] && edge[next][mid];
      if (collider) {
        if (!z.count(mid) && !z_desc.count(mid)) return true;
      } else {
        if (z.count(mid)) return true;
      }
    }
    return false;
  }

  bool d_sep(const std::set<int>& xs, const std::set<int>& ys, const std::set<int>& zs) const {
    // Nodes with a conditioned descendant (or conditioned themselves).
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

    for (int sx : xs) {
      std::vector<int> path = {sx};
      std::vector<bool> used(n, false);
      used[sx] = true;
      bool active_found = false;
      std::function<void(int)> dfs = [&](int v) {
        if (active_found) return;
        if (ys.count(v) && path.size() > 1) {
          if (!blocked(path, zs, z_desc)) active_found = true;
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
      dfs(sx);
      if (active_found) return false;
    }
    return true;
  }
};

struct RandomDag {
  CausalDag dag;
  PathOracle oracle;
};

RandomDag random_dag(Rng& rng, int n, double p) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
  PathOracle oracle;
  oracle.n = n;
  oracle.edge.assign(n, std::vector<bool>(n, false));
  std::vector<std::pair<std::string, std::string>> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (rng.bernoulli(p)) {
        edges.emplace_back(names[a], names[b]);
        oracle.edge[a][b] = true;
      }
    }
  }
  return {CausalDag(names, edges), std::move(oracle)};
}

NodeSet to_names(const std::set<int>& ids) {
  NodeSet out;
  for (int i : ids) out.insert("n" + std::to_string(i));
  return out;
}

} // namespace

TEST_CASE("dag construction rejects cycles, self-loops, duplicates and unknown nodes") {
  CHECK_NOTHROW(CausalDag({"A", "B"}, {{"A", "B"}}));
  CHECK_THROWS_AS(CausalDag({"A", "B"}, {{"A", "B"}, {"B", "A"}}), ConfigError);
  CHECK_THROWS_AS(CausalDag({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"C", "A"}}), ConfigError);
  CHECK_THROWS_AS(CausalDag({"A"}, {{"A", "A"}}), ConfigError);
  CHECK_THROWS_AS(CausalDag({"A", "A"}, {}), ConfigError);
  CHECK_THROWS_WITH_AS(CausalDag({"A"}, {{"A", "B"}}), doctest::Contains("UnknownNode"),
                       InvalidArgument);
}

TEST_CASE("edge-list parsing round-trips and flags malformed lines") {
  const CausalDag dag = CausalDag::from_edge_list("# comment\nA -> B\nB->C\nLonely\n");
  CHECK(dag.nodes().size() == 4);
  CHECK(dag.edges().size() == 2);
  CHECK(dag.has_node("Lonely"));
  const CausalDag again = CausalDag::from_edge_list(dag.to_edge_list());
  CHECK(again.to_edge_list() == dag.to_edge_list());
  CHECK_THROWS_AS(CausalDag::from_edge_list("A -> \n"), ConfigError);
}

TEST_CASE("d-separation on the canonical chain, fork and collider") {
  const CausalDag chain({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}});
  CHECK_FALSE(d_separated(chain, {"A"}, {"C"}, {}));
  CHECK(d_separated(chain, {"A"}, {"C"}, {"B"}));

  const CausalDag fork({"A", "B", "C"}, {{"B", "A"}, {"B", "C"}});
  CHECK_FALSE(d_separated(fork, {"A"}, {"C"}, {}));
  CHECK(d_separated(fork, {"A"}, {"C"}, {"B"}));

  const CausalDag collider({"A", "B", "C"}, {{"A", "B"}, {"C", "B"}});
  CHECK(d_separated(collider, {"A"}, {"C"}, {}));
  CHECK_FALSE(d_separated(collider, {"A"}, {"C"}, {"B"}));

  // Conditioning on a collider's descendant also opens the path.
  const CausalDag desc({"A", "B", "C", "D"}, {{"A", "B"}, {"C", "B"}, {"B", "D"}});
  CHECK_FALSE(d_separated(desc, {"A"}, {"C"}, {"D"}));

  CHECK_THROWS_AS(d_separated(chain, {"A"}, {"A"}, {}), InvalidArgument);
  CHECK_THROWS_AS(d_separated(chain, {"A"}, {"C"}, {"A"}), InvalidArgument);
}

TEST_CASE("d-separation matches the all-paths oracle on random dags") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_index(4));  // 3..6 nodes
    const RandomDag rd = random_dag(rng, n, 0.4);

    std::set<int> xs, ys, zs;
    for (int v = 0; v < n; ++v) {
      const double u = rng.uniform();
      if (u < 0.25) xs.insert(v);
      else if (u < 0.5) ys.insert(v);
      else if (u < 0.75) zs.insert(v);
    }
    if (xs.empty() || ys.empty()) continue;
    const bool got = d_separated(rd.dag, to_names(xs), to_names(ys), to_names(zs));
    const bool want = rd.oracle.d_sep(xs, ys, zs);
    REQUIRE_MESSAGE(got == want, "trial " << trial << " dag:\n" << rd.dag.to_edge_list());
  }
}

TEST_CASE("back-door admissibility and minimal adjustment sets on the built-in graphs") {
  const CausalDag direct = builtin_dag("vmem-direct");
  CHECK_FALSE(is_backdoor_admissible(direct, "Vmem", "Behaviours", {}));
  CHECK(is_backdoor_admissible(direct, "Vmem", "Behaviours", {"E"}));
  const auto sets = backdoor_sets(direct, "Vmem", "Behaviours", 2);
  REQUIRE_FALSE(sets.empty());
  CHECK(sets.front() == NodeSet{"E"});

  const CausalDag cascade = builtin_dag("vmem-cascade");
  CHECK(is_backdoor_admissible(cascade, "Ca", "Behaviours", {"E"}));
  CHECK(is_backdoor_admissible(cascade, "Ca", "Behaviours", {"Vmem"}));
  // Descendants of the treatment are never admissible.
  CHECK_FALSE(is_backdoor_admissible(cascade, "Ca", "Behaviours", {"Gene"}));
  // With no confounding at all the empty set is admissible and listed first.
  CHECK(backdoor_sets(cascade, "A", "Vmem", 1).front().empty());

  CHECK_THROWS_AS(backdoor_sets(direct, "Vmem", "Vmem", 1), InvalidArgument);
  CHECK_THROWS_AS(builtin_dag("nope"), ConfigError);
}

TEST_CASE("do-calculus rules 1-3 on hand-checked graphs") {
  // Rule 1: an isolated Z is always droppable as an observation.
  const CausalDag g1({"A", "Y", "Z"}, {{"A", "Y"}});
  CHECK(rule_applicable(1, g1, {"Y"}, {"A"}, {"Z"}, {}));
  // Z a parent of Y stays informative.
  const CausalDag g1b({"A", "Y", "Z"}, {{"A", "Y"}, {"Z", "Y"}});
  CHECK_FALSE(rule_applicable(1, g1b, {"Y"}, {"A"}, {"Z"}, {}));

  // Rule 2: do(x) and see(x) agree when X has no back-door into Y.
  const CausalDag g2({"X", "Y"}, {{"X", "Y"}});
  CHECK(rule_applicable(2, g2, {"Y"}, {}, {"X"}, {}));
  const CausalDag g2b({"X", "Y", "U"}, {{"X", "Y"}, {"U", "X"}, {"U", "Y"}});
  CHECK_FALSE(rule_applicable(2, g2b, {"Y"}, {}, {"X"}, {}));
  // Conditioning on the confounder restores the exchange.
  CHECK(rule_applicable(2, g2b, {"Y"}, {}, {"X"}, {"U"}));

  // Rule 3: an intervention on a non-ancestor of Y is droppable.
  const CausalDag g3({"Y", "Z"}, {{"Y", "Z"}});
  CHECK(rule_applicable(3, g3, {"Y"}, {}, {"Z"}, {}));
  const CausalDag g3b({"Y", "Z"}, {{"Z", "Y"}});
  CHECK_FALSE(rule_applicable(3, g3b, {"Y"}, {}, {"Z"}, {}));

  CHECK_THROWS_AS(rule_applicable(4, g3, {"Y"}, {}, {"Z"}, {}), InvalidArgument);
}

TEST_CASE("table extraction reads dotted paths, header fields and right-closed bins") {
  const std::string log =
      "{\"header\": true, \"seed\": 3}\n"
      "{\"reward\": -1.0, \"action\": [0.5], \"nested\": {\"v\": 1.5}}\n"
      "\n"
      "{\"reward\": 0.0, \"action\": [2.0], \"nested\": {\"v\": 1.0}}\n";
  const std::vector<VariableSpec> specs = {
      {"R", "reward", {-2.0, -0.5, 1.0}},
      {"A", "action.0", {0.0, 1.0, 2.0}},
      {"V", "nested.v", {0.0, 1.0, 2.0}},
      {"S", "header.seed", {0.0, 5.0}},
  };
  const TrajectoryTable t = extract_table(log, specs);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.column("R") == 0);
  CHECK_THROWS_WITH_AS(t.column("Q"), doctest::Contains("UnknownNode"), InvalidArgument);
  // reward -1.0 lands in (-2, -0.5]; 0.0 in (-0.5, 1].
  CHECK(t.rows[0] == std::vector<int>{0, 0, 1, 0});
  // action 2.0 sits exactly on the closed right edge of bin 1; v 1.0 on the
  // shared edge goes to the lower bin.
  CHECK(t.rows[1] == std::vector<int>{1, 1, 0, 0});
}

TEST_CASE("table extraction failure modes") {
  CHECK(extract_table("", {{"R", "reward", {0.0, 1.0}}}).rows.empty());
  CHECK_THROWS_WITH_AS(extract_table("not json\n", {{"R", "reward", {0.0, 1.0}}}),
                       doctest::Contains("ParseError"), IoError);
  CHECK_THROWS_WITH_AS(extract_table("{\"other\": 1}\n", {{"R", "reward", {0.0, 1.0}}}),
                       doctest::Contains("ParseError"), IoError);
  CHECK_THROWS_WITH_AS(extract_table("{\"reward\": 9.0}\n", {{"R", "reward", {0.0, 1.0}}}),
                       doctest::Contains("BinningError"), ConfigError);
  CHECK_THROWS_WITH_AS(extract_table("{\"reward\": 0.5}\n", {{"R", "reward", {1.0, 0.0}}}),
                       doctest::Contains("BinningError"), ConfigError);
  CHECK_THROWS_WITH_AS(extract_table("{\"reward\": 0.5}\n", {{"R", "reward", {1.0}}}),
                       doctest::Contains("BinningError"), ConfigError);
}

TEST_CASE("adjustment with an empty set reproduces the empirical conditionals exactly") {
  const CausalDag dag({"X", "Y"}, {{"X", "Y"}});
  TrajectoryTable t;
  t.columns = {"X", "Y"};
  // P(Y=1 | X=0) = 1/3, P(Y=1 | X=1) = 1.
  t.rows = {{0, 0}, {0, 0}, {0, 1}, {1, 1}, {1, 1}};
  const AdjustResult r = adjust(t, dag, "X", "Y", {});
  REQUIRE(r.estimates.size() == 4);
  auto p = [&](int x, int y) {
    for (const auto& e : r.estimates) {
      if (e.x == x && e.y == y) return e.p;
    }
    return -1.0;
  };
  CHECK(p(0, 0) == 2.0 / 3.0);
  CHECK(p(0, 1) == 1.0 / 3.0);
  CHECK(p(1, 0) == 0.0);
  CHECK(p(1, 1) == 1.0);
  CHECK(r.unsupported_strata.empty());
  CHECK(r.estimates.front().support == 3);
}

TEST_CASE("adjustment rejects inadmissible sets and reports unsupported strata") {
  const CausalDag dag = builtin_dag("vmem-direct");
  TrajectoryTable t;
  t.columns = {"Vmem", "Behaviours", "E"};
  t.rows = {{0, 0, 0}, {0, 1, 0}, {1, 1, 1}};
  CHECK_THROWS_WITH_AS(adjust(t, dag, "Vmem", "Behaviours", {}),
                       doctest::Contains("InadmissibleSet"), InvalidArgument);
  const AdjustResult r = adjust(t, dag, "Vmem", "Behaviours", {"E"});
  // No rows with Vmem=0 in stratum E=1 and none with Vmem=1 in E=0.
  CHECK(r.unsupported_strata.size() == 2);
  const std::string csv = adjust_to_csv(r);
  CHECK(csv.rfind("x_bin,y_bin,estimate,support\n", 0) == 0);
  CHECK(csv.find("unsupported stratum") != std::string::npos);
}

TEST_CASE("back-door adjustment deconfounds a synthetic binary model") {
  // Z ~ Bern(0.5); P(X=1|Z) = 0.2 + 0.6 Z; P(Y=1|X,Z) = 0.1 + 0.4 X + 0.4 Z.
  // Truth: P(Y=1 | do(X=1)) = 0.7; the naive conditional is 0.82.
  const CausalDag dag({"Z", "X", "Y"}, {{"Z", "X"}, {"Z", "Y"}, {"X", "Y"}});
  Rng rng(77);
  TrajectoryTable t;
  t.columns = {"Z", "X", "Y"};
  const int n = 20000;
  long n_x1 = 0, n_y1_x1 = 0;
  for (int i = 0; i < n; ++i) {
    const int z = rng.bernoulli(0.5) ? 1 : 0;
    const int x = rng.bernoulli(0.2 + 0.6 * z) ? 1 : 0;
    const int y = rng.bernoulli(0.1 + 0.4 * x + 0.4 * z) ? 1 : 0;
    t.rows.push_back({z, x, y});
    if (x == 1) {
      ++n_x1;
      n_y1_x1 += y;
    }
  }
  const double naive = static_cast<double>(n_y1_x1) / static_cast<double>(n_x1);
  const AdjustResult r = adjust(t, dag, "X", "Y", {"Z"});
  double adjusted = -1.0;
  for (const auto& e : r.estimates) {
    if (e.x == 1 && e.y == 1) adjusted = e.p;
  }
  const double se = std::sqrt(0.7 * 0.3 / n_x1);
  CHECK(std::abs(adjusted - 0.7) < 3.0 * se);
  CHECK(std::abs(naive - 0.7) > 3.0 * se);
}
