#include "causal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace biovolt {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

} // namespace

CausalDag::CausalDag(std::vector<std::string> nodes,
                     std::vector<std::pair<std::string, std::string>> edges)
    : nodes_(std::move(nodes)) {
  std::map<std::string, int> lookup;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (!lookup.emplace(nodes_[i], i).second) {
      throw ConfigError("duplicate node name: " + nodes_[i]);
    }
  }
  parents_.resize(nodes_.size());
  children_.resize(nodes_.size());
  for (const auto& [from, to] : edges) {
    const auto a = lookup.find(from);
    const auto b = lookup.find(to);
    if (a == lookup.end()) throw InvalidArgument("UnknownNode: " + from);
    if (b == lookup.end()) throw InvalidArgument("UnknownNode: " + to);
    if (a->second == b->second) throw ConfigError("self-loop on node: " + from);
    edges_.emplace_back(a->second, b->second);
    children_[a->second].push_back(b->second);
    parents_[b->second].push_back(a->second);
  }

  // Kahn's algorithm; leftover nodes mean a directed cycle.
  std::vector<int> indeg(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) indeg[i] = static_cast<int>(parents_[i].size());
  std::deque<int> ready;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    const int v = ready.front();
    ready.pop_front();
    ++seen;
    for (int c : children_[v]) {
      if (--indeg[c] == 0) ready.push_back(c);
    }
  }
  if (seen != nodes_.size()) throw ConfigError("graph has a directed cycle");
}

CausalDag CausalDag::from_edge_list(const std::string& text) {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  auto add_node = [&](const std::string& n) {
    if (std::find(nodes.begin(), nodes.end(), n) == nodes.end()) nodes.push_back(n);
  };
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const std::size_t arrow = line.find("->");
    if (arrow == std::string::npos) {
      add_node(line);
      continue;
    }
    const std::string from = trimmed(line.substr(0, arrow));
    const std::string to = trimmed(line.substr(arrow + 2));
    if (from.empty() || to.empty()) {
      throw ConfigError("edge list: malformed edge at line " + std::to_string(lineno));
    }
    add_node(from);
    add_node(to);
    edges.emplace_back(from, to);
  }
  return CausalDag(std::move(nodes), std::move(edges));
}

int CausalDag::index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (nodes_[i] == name) return i;
  }
  throw InvalidArgument("UnknownNode: " + name);
}

bool CausalDag::has_node(const std::string& name) const {
  return std::find(nodes_.begin(), nodes_.end(), name) != nodes_.end();
}

std::set<int> CausalDag::descendants(const std::set<int>& roots) const {
  std::set<int> out;
  std::deque<int> queue(roots.begin(), roots.end());
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int c : children_[v]) {
      if (!roots.count(c) && out.insert(c).second) queue.push_back(c);
    }
  }
  return out;
}

std::set<int> CausalDag::ancestors(const std::set<int>& roots) const {
  std::set<int> out;
  std::deque<int> queue(roots.begin(), roots.end());
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int p : parents_[v]) {
      if (!roots.count(p) && out.insert(p).second) queue.push_back(p);
    }
  }
  return out;
}

CausalDag CausalDag::remove_incoming(const NodeSet& into) const {
  const std::set<int> drop = to_indices(into);
  std::vector<std::pair<std::string, std::string>> kept;
  for (const auto& [a, b] : edges_) {
    if (!drop.count(b)) kept.emplace_back(nodes_[a], nodes_[b]);
  }
  return CausalDag(nodes_, std::move(kept));
}

CausalDag CausalDag::remove_outgoing(const NodeSet& from) const {
  const std::set<int> drop = to_indices(from);
  std::vector<std::pair<std::string, std::string>> kept;
  for (const auto& [a, b] : edges_) {
    if (!drop.count(a)) kept.emplace_back(nodes_[a], nodes_[b]);
  }
  return CausalDag(nodes_, std::move(kept));
}

std::set<int> CausalDag::to_indices(const NodeSet& names) const {
  std::set<int> out;
  for (const auto& n : names) out.insert(index(n));
  return out;
}

std::string CausalDag::to_edge_list() const {
  std::ostringstream out;
  std::set<int> touched;
  for (const auto& [a, b] : edges_) {
    out << nodes_[a] << " -> " << nodes_[b] << "\n";
    touched.insert(a);
    touched.insert(b);
  }
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (!touched.count(i)) out << nodes_[i] << "\n";
  }
  return out.str();
}

bool d_separated(const CausalDag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
  const std::set<int> xs = dag.to_indices(x);
  const std::set<int> ys = dag.to_indices(y);
  const std::set<int> zs = dag.to_indices(z);
  for (int v : xs) {
    if (ys.count(v) || zs.count(v)) throw InvalidArgument("d_separated: sets must be disjoint");
  }
  for (int v : ys) {
    if (zs.count(v)) throw InvalidArgument("d_separated: sets must be disjoint");
  }

  // Active-trail reachability. A collider passes the trail only when it or
  // one of its descendants is conditioned on.
  std::set<int> z_anc = dag.ancestors(zs);
  z_anc.insert(zs.begin(), zs.end());

  // State: (node, arrived moving towards parents?). Start both ways from X.
  const int n = static_cast<int>(dag.nodes().size());
  std::vector<std::array<bool, 2>> visited(n, {false, false});
  std::deque<std::pair<int, int>> queue;  // dir 0 = arrived from a child (going up)
  for (int v : xs) {
    queue.emplace_back(v, 0);
    queue.emplace_back(v, 1);
  }
  while (!queue.empty()) {
    auto [v, dir] = queue.front();
    queue.pop_front();
    if (visited[v][dir]) continue;
    visited[v][dir] = true;
    if (!zs.count(v) && ys.count(v)) return false;
    if (dir == 0) {
      // Arrived from a child: v is a chain/fork midpoint.
      if (!zs.count(v)) {
        for (int p : dag.parents(v)) queue.emplace_back(p, 0);
        for (int c : dag.children(v)) queue.emplace_back(c, 1);
      }
    } else {
      // Arrived from a parent: v may act as a collider towards its parents.
      if (!zs.count(v)) {
        for (int c : dag.children(v)) queue.emplace_back(c, 1);
      }
      if (z_anc.count(v)) {
        for (int p : dag.parents(v)) queue.emplace_back(p, 0);
      }
    }
  }
  return true;
}

bool is_backdoor_admissible(const CausalDag& dag, const std::string& x, const std::string& y,
                            const NodeSet& z) {
  const int xi = dag.index(x);
  (void)dag.index(y);
  const std::set<int> desc = dag.descendants({xi});
  for (const auto& name : z) {
    const int zi = dag.index(name);
    if (zi == xi || desc.count(zi)) return false;
    if (name == y) return false;
  }
  // Blocking every back-door path == d-separation once X's outgoing edges
  // (all directed paths) are removed.
  const CausalDag cut = dag.remove_outgoing({x});
  return d_separated(cut, {x}, {y}, z);
}

std::vector<NodeSet> backdoor_sets(const CausalDag& dag, const std::string& x,
                                   const std::string& y, int max_size) {
  if (x == y) throw InvalidArgument("backdoor_sets: x and y must differ");
  (void)dag.index(x);
  (void)dag.index(y);
  std::vector<std::string> candidates;
  for (const auto& n : dag.nodes()) {
    if (n != x && n != y) candidates.push_back(n);
  }
  std::sort(candidates.begin(), candidates.end());
  const int n = static_cast<int>(candidates.size());
  std::vector<NodeSet> out;
  std::vector<int> pick;
  std::function<void(int, int)> enumerate = [&](int start, int remaining) {
    if (remaining == 0) {
      NodeSet z;
      for (int i : pick) z.insert(candidates[i]);
      if (is_backdoor_admissible(dag, x, y, z)) out.push_back(std::move(z));
      return;
    }
    for (int i = start; i <= n - remaining; ++i) {
      pick.push_back(i);
      enumerate(i + 1, remaining - 1);
      pick.pop_back();
    }
  };
  for (int size = 0; size <= std::min(max_size, n); ++size) enumerate(0, size);
  return out;
}

bool rule_applicable(int rule, const CausalDag& dag, const NodeSet& y, const NodeSet& x_do,
                     const NodeSet& z, const NodeSet& w) {
  if (rule < 1 || rule > 3) throw InvalidArgument("rule must be 1, 2 or 3");
  NodeSet cond = x_do;
  cond.insert(w.begin(), w.end());
  if (rule == 1) {
    return d_separated(dag.remove_incoming(x_do), y, z, cond);
  }
  if (rule == 2) {
    return d_separated(dag.remove_incoming(x_do).remove_outgoing(z), y, z, cond);
  }
  // Rule 3: also cut into the part of Z with no causal route to W once X is
  // held fixed.
  const CausalDag g_xbar = dag.remove_incoming(x_do);
  const std::set<int> w_idx = g_xbar.to_indices(w);
  std::set<int> w_anc = g_xbar.ancestors(w_idx);
  w_anc.insert(w_idx.begin(), w_idx.end());
  NodeSet z_cut;
  for (const auto& name : z) {
    if (!w_anc.count(g_xbar.index(name))) z_cut.insert(name);
  }
  return d_separated(g_xbar.remove_incoming(z_cut), y, z, cond);
}

int TrajectoryTable::column(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(columns.size()); ++i) {
    if (columns[i] == name) return i;
  }
  throw InvalidArgument("UnknownNode: table has no column " + name);
}

namespace {

const nlohmann::json* walk_path(const nlohmann::json& root, const std::string& path) {
  const nlohmann::json* cur = &root;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string part =
        path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (cur->is_array()) {
      try {
        const std::size_t idx = std::stoul(part);
        if (idx >= cur->size()) return nullptr;
        cur = &(*cur)[idx];
      } catch (const std::exception&) {
        return nullptr;
      }
    } else if (cur->is_object()) {
      auto it = cur->find(part);
      if (it == cur->end()) return nullptr;
      cur = &*it;
    } else {
      return nullptr;
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return cur;
}

int bin_of(double v, const VariableSpec& spec) {
  const auto& e = spec.bin_edges;
  if (e.size() < 2) throw ConfigError("BinningError: " + spec.name + " needs >= 2 bin edges");
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i] <= e[i - 1]) {
      throw ConfigError("BinningError: " + spec.name + " bin edges must be increasing");
    }
  }
  if (v < e.front() || v > e.back()) {
    throw ConfigError("BinningError: " + spec.name + " value " + std::to_string(v) +
                      " outside [" + std::to_string(e.front()) + ", " +
                      std::to_string(e.back()) + "]");
  }
  // Right-closed bins (e[i-1], e[i]]; the left edge of the range opens bin 0.
  if (v <= e[1]) return 0;
  const auto it = std::lower_bound(e.begin(), e.end(), v);
  return static_cast<int>(it - e.begin()) - 1;
}

} // namespace

TrajectoryTable extract_table(const std::string& jsonl_text,
                              const std::vector<VariableSpec>& specs) {
  TrajectoryTable table;
  for (const auto& s : specs) table.columns.push_back(s.name);

  nlohmann::json header;
  std::istringstream in(jsonl_text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trimmed(line);
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw IoError("ParseError: log line " + std::to_string(lineno) + ": " + e.what());
    }
    if (record.contains("header")) {
      header = record;
      continue;
    }
    std::vector<int> row;
    row.reserve(specs.size());
    for (const auto& spec : specs) {
      const bool from_header = spec.path.rfind("header.", 0) == 0;
      const nlohmann::json& root = from_header ? header : record;
      const std::string path = from_header ? spec.path.substr(7) : spec.path;
      const nlohmann::json* v = walk_path(root, path);
      if (v == nullptr || !v->is_number()) {
        throw IoError("ParseError: log line " + std::to_string(lineno) +
                      " has no numeric field " + spec.path);
      }
      row.push_back(bin_of(v->get<double>(), spec));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

AdjustResult adjust(const TrajectoryTable& table, const CausalDag& dag, const std::string& x,
                    const std::string& y, const NodeSet& z) {
  if (!is_backdoor_admissible(dag, x, y, z)) {
    throw InvalidArgument("InadmissibleSet: {" + [&] {
      std::string s;
      for (const auto& n : z) s += (s.empty() ? "" : ", ") + n;
      return s;
    }() + "} fails the back-door criterion for " + x + " -> " + y);
  }

  const int xc = table.column(x);
  const int yc = table.column(y);
  std::vector<int> zc;
  for (const auto& n : z) zc.push_back(table.column(n));

  auto stratum_of = [&](const std::vector<int>& row) {
    std::vector<int> s;
    s.reserve(zc.size());
    for (int c : zc) s.push_back(row[c]);
    return s;
  };

  const long total = static_cast<long>(table.rows.size());
  AdjustResult result;
  if (total == 0) return result;

  std::map<std::vector<int>, long> z_count;
  std::set<int> x_vals, y_vals;
  for (const auto& row : table.rows) {
    ++z_count[stratum_of(row)];
    x_vals.insert(row[xc]);
    y_vals.insert(row[yc]);
  }

  // counts[(x, z)] -> (rows, per-y rows)
  std::map<std::pair<int, std::vector<int>>, std::pair<long, std::map<int, long>>> xz;
  for (const auto& row : table.rows) {
    auto& slot = xz[{row[xc], stratum_of(row)}];
    ++slot.first;
    ++slot.second[row[yc]];
  }

  for (int xv : x_vals) {
    std::map<int, double> py;
    for (const auto& [zs, nz] : z_count) {
      const double pz = static_cast<double>(nz) / static_cast<double>(total);
      auto it = xz.find({xv, zs});
      if (it == xz.end()) {
        std::string desc = x + "=" + std::to_string(xv) + " |";
        std::size_t k = 0;
        for (const auto& n : z) desc += " " + n + "=" + std::to_string(zs[k++]);
        result.unsupported_strata.push_back(desc);
        continue;
      }
      const auto& [nxz, ycounts] = it->second;
      for (const auto& [yv, nxyz] : ycounts) {
        py[yv] += pz * static_cast<double>(nxyz) / static_cast<double>(nxz);
      }
    }
    long support = 0;
    for (const auto& [key, slot] : xz) {
      if (key.first == xv) support += slot.first;
    }
    for (int yv : y_vals) {
      AdjustEstimate e;
      e.x = xv;
      e.y = yv;
      e.p = py.count(yv) ? py[yv] : 0.0;
      e.support = support;
      result.estimates.push_back(e);
    }
  }
  return result;
}

std::string adjust_to_csv(const AdjustResult& result) {
  std::ostringstream out;
  out << "x_bin,y_bin,estimate,support\n";
  char buf[64];
  for (const auto& e : result.estimates) {
    std::snprintf(buf, sizeof buf, "%.17g", e.p);
    out << e.x << "," << e.y << "," << buf << "," << e.support << "\n";
  }
  for (const auto& s : result.unsupported_strata) {
    out << "# unsupported stratum: " << s << "\n";
  }
  return out.str();
}

std::vector<std::string> builtin_dag_names() { return {"vmem-direct", "vmem-cascade"}; }

CausalDag builtin_dag(const std::string& name) {
  if (name == "vmem-direct") {
    return CausalDag({"A", "E", "Vmem", "Behaviours"},
                     {{"A", "Vmem"}, {"E", "Vmem"}, {"Vmem", "Behaviours"}, {"E", "Behaviours"}});
  }
  if (name == "vmem-cascade") {
    return CausalDag({"A", "E", "Vmem", "Ca", "Gene", "Behaviours"},
                     {{"A", "Vmem"},
                      {"E", "Vmem"},
                      {"Vmem", "Ca"},
                      {"Ca", "Gene"},
                      {"Gene", "Behaviours"},
                      {"E", "Behaviours"}});
  }
  throw ConfigError("unknown built-in graph: " + name);
}

} // namespace biovolt
