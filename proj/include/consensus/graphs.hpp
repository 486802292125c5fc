#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace consensus {

// Simple directed graph on nodes 0..n-1, no self-loops. Arrows follow the
// convention of the condition checkers: the arrow j -> k exists when entry
// (j, k) of a schedule carries enough mass, i.e. agent k influences agent j.
struct DirectedGraph {
  int n_nodes = 0;
  std::set<std::pair<int, int>> arrows;

  DirectedGraph() = default;
  explicit DirectedGraph(int n) : n_nodes(n) {}

  void add_arrow(int j, int k);
  bool has_arrow(int j, int k) const { return arrows.count({j, k}) > 0; }
  bool is_complete() const;
};

// Nodes reachable by a directed path from every node (sorted; may be empty).
std::vector<int> globally_reachable_nodes(const DirectedGraph& g);

// True when every unordered pair {j,k} has at least one of the two arrows.
bool pairwise_coverage(const DirectedGraph& g);

// Common-target assignment: selector(i, j) = k with both arrows i->k and
// j->k present in the companion graph. Keys are stored with i < j.
struct SelectorOracle {
  int n_nodes = 0;
  std::map<std::pair<int, int>, int> targets;

  int at(int i, int j) const;
  void set(int i, int j, int k);
  bool total() const;
  // Graph with arrows i->k_ij and j->k_ij for every pair.
  DirectedGraph induced_graph() const;
};

struct GammaReduction {
  int node = -1;
  int iterations = 0;
  std::vector<std::vector<int>> stages;  // A_0, A_1, ..., {node}
};

// Repeatedly replaces a set of nodes by the common targets of its members
// paired in ascending order (odd element passes through) until a single node
// remains. That node is globally reachable in the oracle's induced graph.
GammaReduction gamma_reduce(int n_nodes, const SelectorOracle& oracle);

}  // namespace consensus
