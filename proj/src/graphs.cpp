#include "consensus/graphs.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace consensus {

void DirectedGraph::add_arrow(int j, int k) {
  if (j < 0 || j >= n_nodes || k < 0 || k >= n_nodes)
    throw std::domain_error("arrow endpoint out of range");
  if (j == k) throw std::domain_error("self-loops are not allowed");
  arrows.insert({j, k});
}

bool DirectedGraph::is_complete() const {
  return static_cast<int>(arrows.size()) == n_nodes * (n_nodes - 1);
}

std::vector<int> globally_reachable_nodes(const DirectedGraph& g) {
  // Reverse BFS from each candidate: a node is globally reachable iff walking
  // arrows backwards from it touches every node.
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(g.n_nodes));
  for (const auto& [j, k] : g.arrows) rev[static_cast<std::size_t>(k)].push_back(j);

  std::vector<int> out;
  for (int cand = 0; cand < g.n_nodes; ++cand) {
    std::vector<char> seen(static_cast<std::size_t>(g.n_nodes), 0);
    std::queue<int> q;
    q.push(cand);
    seen[static_cast<std::size_t>(cand)] = 1;
    int count = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int u : rev[static_cast<std::size_t>(v)]) {
        if (!seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = 1;
          ++count;
          q.push(u);
        }
      }
    }
    if (count == g.n_nodes) out.push_back(cand);
  }
  return out;
}

bool pairwise_coverage(const DirectedGraph& g) {
  for (int j = 0; j < g.n_nodes; ++j)
    for (int k = j + 1; k < g.n_nodes; ++k)
      if (!g.has_arrow(j, k) && !g.has_arrow(k, j)) return false;
  return true;
}

int SelectorOracle::at(int i, int j) const {
  if (i == j) throw std::domain_error("selector needs a pair of distinct nodes");
  auto it = targets.find({std::min(i, j), std::max(i, j)});
  if (it == targets.end()) throw std::domain_error("selector has no entry for this pair");
  return it->second;
}

void SelectorOracle::set(int i, int j, int k) {
  if (i == j || i < 0 || j < 0 || i >= n_nodes || j >= n_nodes)
    throw std::domain_error("bad selector pair");
  if (k < 0 || k >= n_nodes) throw std::domain_error("selector target out of range");
  targets[{std::min(i, j), std::max(i, j)}] = k;
}

bool SelectorOracle::total() const {
  return static_cast<int>(targets.size()) == n_nodes * (n_nodes - 1) / 2;
}

DirectedGraph SelectorOracle::induced_graph() const {
  DirectedGraph g(n_nodes);
  for (const auto& [pair, k] : targets) {
    if (pair.first != k) g.add_arrow(pair.first, k);
    if (pair.second != k) g.add_arrow(pair.second, k);
  }
  return g;
}

GammaReduction gamma_reduce(int n_nodes, const SelectorOracle& oracle) {
  if (n_nodes < 1) throw std::domain_error("need at least one node");
  GammaReduction result;
  std::vector<int> current(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) current[static_cast<std::size_t>(i)] = i;
  result.stages.push_back(current);

  while (current.size() > 1) {
    std::set<int> next;
    std::size_t i = 0;
    // Pair in ascending-index order; an odd leftover passes through.
    for (; i + 1 < current.size(); i += 2) {
      const int k = oracle.at(current[i], current[i + 1]);
      if (k < 0 || k >= n_nodes) throw std::domain_error("selector target out of range");
      next.insert(k);
    }
    if (i < current.size()) next.insert(current[i]);
    current.assign(next.begin(), next.end());
    result.stages.push_back(current);
    ++result.iterations;
  }
  result.node = current.front();
  return result;
}

}  // namespace consensus
