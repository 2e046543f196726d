#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace biovolt {

using NodeSet = std::set<std::string>;

/// Directed acyclic graph of named variables. Acyclicity and name uniqueness
/// are enforced at construction.
class CausalDag {
public:
  CausalDag(std::vector<std::string> nodes,
            std::vector<std::pair<std::string, std::string>> edges);

  /// One "A -> B" edge per line; a bare name declares an isolated node.
  /// '#' starts a comment.
  static CausalDag from_edge_list(const std::string& text);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  int index(const std::string& name) const;  // throws "UnknownNode"
  bool has_node(const std::string& name) const;
  const std::string& name(int i) const { return nodes_[i]; }

  const std::vector<int>& parents(int i) const { return parents_[i]; }
  const std::vector<int>& children(int i) const { return children_[i]; }

  std::set<int> descendants(const std::set<int>& roots) const;  // excludes roots
  std::set<int> ancestors(const std::set<int>& roots) const;    // excludes roots

  CausalDag remove_incoming(const NodeSet& into) const;
  CausalDag remove_outgoing(const NodeSet& from) const;

  std::set<int> to_indices(const NodeSet& names) const;
  std::string to_edge_list() const;

private:
  std::vector<std::string> nodes_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
};

/// True iff every undirected path between X and Y is blocked given Z
/// (chain/fork blocked when the middle node is in Z; collider blocked when
/// neither it nor any descendant is in Z). Sets must be disjoint.
bool d_separated(const CausalDag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z);

/// All back-door-admissible adjustment sets for the effect of x on y, up to
/// max_size members, smallest first (ties broken lexicographically).
std::vector<NodeSet> backdoor_sets(const CausalDag& dag, const std::string& x,
                                   const std::string& y, int max_size);

bool is_backdoor_admissible(const CausalDag& dag, const std::string& x, const std::string& y,
                            const NodeSet& z);

/// Applicability of the three do-calculus rewrite rules, evaluated as
/// d-separation statements on the matching mutilated graphs:
///   rule 1 (drop observation z):  Y independent of Z given X, W with edges
///           into X removed;
///   rule 2 (exchange do(z) for z): additionally edges out of Z removed;
///   rule 3 (drop do(z)):           edges into X removed, plus edges into the
///           part of Z that is not an ancestor of W in that graph.
bool rule_applicable(int rule, const CausalDag& dag, const NodeSet& y, const NodeSet& x_do,
                     const NodeSet& z, const NodeSet& w);

/// Rows of discretized variable values, one per logged step.
struct TrajectoryTable {
  std::vector<std::string> columns;
  std::vector<std::vector<int>> rows;

  int column(const std::string& name) const;  // throws "UnknownNode"
};

/// How to read one variable out of an episode log record. path is a dotted
/// JSON path into each step record ("reward", "action.0",
/// "reward_breakdown.bioelec", ...); a "header." prefix reads from the
/// episode header instead and repeats per step. Bin edges are strictly
/// increasing; value v lands in the right-closed bin (e[i-1], e[i]].
struct VariableSpec {
  std::string name;
  std::string path;
  std::vector<double> bin_edges;
};

TrajectoryTable extract_table(const std::string& jsonl_text,
                              const std::vector<VariableSpec>& specs);

struct AdjustEstimate {
  int x = 0;  // bin of the intervention value
  int y = 0;  // bin of the outcome value
  double p = 0.0;
  long support = 0;  // rows behind the estimate
};

struct AdjustResult {
  std::vector<AdjustEstimate> estimates;
  /// (x bin, z stratum description) pairs with P(z) > 0 but no rows;
  /// reported, never imputed.
  std::vector<std::string> unsupported_strata;
};

/// Plug-in back-door adjustment P(y | do(x)) = sum_z P(y | x, z) P(z) with
/// empirical frequencies. Throws "InadmissibleSet" when z fails the
/// back-door criterion on the given graph.
AdjustResult adjust(const TrajectoryTable& table, const CausalDag& dag, const std::string& x,
                    const std::string& y, const NodeSet& z);

std::string adjust_to_csv(const AdjustResult& result);

/// Built-in graphs: "vmem-direct" (action and environment into the membrane
/// voltage, both voltage and environment into behaviours) and "vmem-cascade"
/// (the same with the calcium/gene-expression pathway spelled out).
std::vector<std::string> builtin_dag_names();
CausalDag builtin_dag(const std::string& name);

} // namespace biovolt
