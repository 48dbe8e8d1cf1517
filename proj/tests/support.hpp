#pragma once

// Shared fixtures and independent oracles for the test suites.  Everything
// here is deliberately brute-force: these values cross-check the production
// code, so they must not share its code paths.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "oi/common.hpp"
#include "oi/graph.hpp"

namespace testsup {

using oi::NodeId;

// The four-node example graph: 0 -> 1, 1 -> 2, 1 -> 3, all with weight p.
inline oi::ProbabilisticGraph make_g1(double p = 0.1) {
  return oi::ProbabilisticGraph::from_edges(4, {{0, 1, p}, {1, 2, p}, {1, 3, p}});
}

inline oi::ProbabilisticGraph make_edgeless(NodeId n) {
  return oi::ProbabilisticGraph::from_edges(n, {});
}

// Random directed graph with n <= max_n, m <= max_m, no self-loops or
// duplicate arcs, mixed weight assignment (constant, weighted-cascade or
// uniform random weights).
inline oi::ProbabilisticGraph random_small_graph(oi::RandomStream& rng, NodeId max_n = 8,
                                                 std::uint64_t max_m = 12) {
  const NodeId n = 2 + rng.uniform_below(max_n - 1);
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1);
  const std::uint64_t m = 1 + rng.uniform_below(static_cast<std::uint32_t>(
                                  std::min<std::uint64_t>(max_m, pairs)));

  std::vector<std::pair<NodeId, NodeId>> chosen;
  while (chosen.size() < m) {
    NodeId u = rng.uniform_below(n);
    NodeId v = rng.uniform_below(n);
    if (u == v) continue;
    bool dup = false;
    for (auto& [a, b] : chosen)
      if (a == u && b == v) dup = true;
    if (!dup) chosen.emplace_back(u, v);
  }

  std::vector<oi::ProbabilisticGraph::Edge> edges;
  const int mode = static_cast<int>(rng.uniform_below(3));
  if (mode == 1) {  // weighted cascade
    std::vector<int> indeg(n, 0);
    for (auto& [u, v] : chosen) ++indeg[v];
    for (auto& [u, v] : chosen) edges.emplace_back(u, v, 1.0 / indeg[v]);
  } else if (mode == 0) {
    const double ps[] = {0.1, 0.3, 0.5, 0.9};
    const double p = ps[rng.uniform_below(4)];
    for (auto& [u, v] : chosen) edges.emplace_back(u, v, p);
  } else {
    for (auto& [u, v] : chosen)
      edges.emplace_back(u, v, 0.05 + 0.95 * rng.uniform());
  }
  return oi::ProbabilisticGraph::from_edges(n, std::move(edges));
}

inline std::vector<NodeId> random_seed_set(oi::RandomStream& rng, NodeId n, NodeId k) {
  std::vector<NodeId> ids(n);
  for (NodeId i = 0; i < n; ++i) ids[i] = i;
  for (NodeId i = 0; i < k; ++i) {
    const auto j = i + rng.uniform_below(static_cast<std::uint32_t>(n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Total variation distance between an exact distribution and empirical counts.
inline double tv_distance(const std::map<int, double>& exact,
                          const std::map<int, std::uint64_t>& counts,
                          std::uint64_t total) {
  double tv = 0.0;
  std::map<int, double> emp;
  for (const auto& [k, c] : counts) emp[k] = static_cast<double>(c) / total;
  for (const auto& [k, p] : exact) {
    auto it = emp.find(k);
    tv += std::abs(p - (it == emp.end() ? 0.0 : it->second));
  }
  for (const auto& [k, p] : emp)
    if (!exact.count(k)) tv += p;
  return tv / 2.0;
}

inline double binom_sigma(double p, std::uint64_t runs) {
  p = std::clamp(p, 0.0, 1.0);  // p may carry 1-ulp summation residue
  return std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
}

inline std::vector<std::vector<NodeId>> combinations(NodeId n, NodeId k) {
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> c(k);
  for (NodeId i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + static_cast<NodeId>(i)) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

// Exact linear-threshold influence by enumerating every per-node in-edge
// choice (each node keeps one in-edge with probability w, or none).
struct LtExact {
  double influence = 0.0;
  std::map<int, double> size_dist;
};

inline LtExact lt_exact(const oi::ProbabilisticGraph& g, const std::vector<NodeId>& seeds) {
  const NodeId n = g.node_count();
  std::vector<std::vector<std::pair<NodeId, double>>> options(n);  // (source, prob)
  for (NodeId v = 0; v < n; ++v) {
    double rest = 1.0;
    for (const oi::Arc& a : g.in_neighbors(v)) {
      options[v].emplace_back(a.node, a.weight);
      rest -= a.weight;
    }
    options[v].emplace_back(v, rest < 0.0 ? 0.0 : rest);  // sentinel: no selection
  }

  std::uint32_t seed_bits = 0;
  for (NodeId s : seeds) seed_bits |= 1u << s;

  LtExact out;
  std::vector<std::size_t> pick(n, 0);
  while (true) {
    double prob = 1.0;
    for (NodeId v = 0; v < n; ++v) prob *= options[v][pick[v]].second;
    if (prob > 0.0) {
      // reachability over selected edges (u -> v live iff v picked u)
      std::uint32_t reached = seed_bits;
      bool grew = true;
      while (grew) {
        grew = false;
        for (NodeId v = 0; v < n; ++v) {
          if (reached >> v & 1u) continue;
          const auto [src, w] = options[v][pick[v]];
          if (src != v && (reached >> src & 1u)) {
            reached |= 1u << v;
            grew = true;
          }
        }
      }
      const int size = std::popcount(reached);
      out.influence += prob * size;
      out.size_dist[size] += prob;
    }
    // odometer over the choice space
    NodeId v = 0;
    while (v < n) {
      if (++pick[v] < options[v].size()) break;
      pick[v] = 0;
      ++v;
    }
    if (v == n) break;
  }
  return out;
}

}  // namespace testsup
