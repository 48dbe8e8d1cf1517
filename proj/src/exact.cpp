#include "oi/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace oi {
namespace {

struct FlatEdge {
  NodeId u, v;
  double w;
};

std::vector<FlatEdge> flatten(const ProbabilisticGraph& g) {
  std::vector<FlatEdge> es;
  es.reserve(g.edge_count());
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (const Arc& a : g.out_neighbors(u)) es.push_back({u, a.node, a.weight});
  return es;
}

void check_seeds(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds) {
  if (seeds.empty()) throw DomainError("seed set must be nonempty");
  for (NodeId s : seeds)
    if (s >= g.node_count()) throw DomainError("seed id out of range");
}

void check_capacity(const ProbabilisticGraph& g) {
  if (g.edge_count() > kMaxExactEdges)
    throw CapacityError("exact oracle limited to " + std::to_string(kMaxExactEdges) +
                        " edges, got " + std::to_string(g.edge_count()));
}

double mask_probability(const std::vector<FlatEdge>& es, std::uint32_t mask) {
  double p = 1.0;
  for (std::size_t i = 0; i < es.size(); ++i)
    p *= (mask >> i & 1u) ? es[i].w : 1.0 - es[i].w;
  return p;
}

// Node set reachable from `seeds` over edges selected by `mask`, as a bitmask
// (n <= 20 here, so 32 bits suffice).
std::uint32_t reach_forward(const std::vector<FlatEdge>& es, std::uint32_t mask,
                            std::uint32_t seed_bits) {
  std::uint32_t reached = seed_bits;
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      if ((reached >> es[i].u & 1u) && !(reached >> es[i].v & 1u)) {
        reached |= 1u << es[i].v;
        grew = true;
      }
    }
  }
  return reached;
}

std::uint32_t reach_reverse(const std::vector<FlatEdge>& es, std::uint32_t mask, NodeId target) {
  std::uint32_t reached = 1u << target;
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      if ((reached >> es[i].v & 1u) && !(reached >> es[i].u & 1u)) {
        reached |= 1u << es[i].u;
        grew = true;
      }
    }
  }
  return reached;
}

std::uint32_t bits_of(const std::vector<NodeId>& nodes) {
  std::uint32_t b = 0;
  for (NodeId v : nodes) b |= 1u << v;
  return b;
}

}  // namespace

double exact_influence(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds) {
  check_seeds(g, seeds);
  check_capacity(g);
  const auto es = flatten(g);
  const std::uint32_t seed_bits = bits_of(seeds);
  KahanSum acc;
  for (std::uint32_t mask = 0; mask < (1u << es.size()); ++mask) {
    const double p = mask_probability(es, mask);
    const int size = std::popcount(reach_forward(es, mask, seed_bits));
    acc.add(p * size);
  }
  return acc.value();
}

double exact_outward(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds) {
  const double inf = exact_influence(g, seeds);
  std::uint32_t seed_bits = bits_of(seeds);
  return inf - std::popcount(seed_bits);
}

ExactReport exact_distributions(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds) {
  check_seeds(g, seeds);
  check_capacity(g);
  const auto es = flatten(g);
  const std::uint32_t seed_bits = bits_of(seeds);
  const int seed_size = std::popcount(seed_bits);
  const NodeId n = g.node_count();

  std::vector<KahanSum> by_size(n + 1);
  KahanSum inf;
  for (std::uint32_t mask = 0; mask < (1u << es.size()); ++mask) {
    const double p = mask_probability(es, mask);
    const int size = std::popcount(reach_forward(es, mask, seed_bits));
    by_size[static_cast<std::size_t>(size)].add(p);
    inf.add(p * size);
  }

  ExactReport rep;
  rep.influence = inf.value();
  rep.outward = rep.influence - seed_size;
  for (NodeId s = 0; s <= n; ++s) {
    double p = by_size[s].value();
    if (p > 0.0) rep.cascade_size_dist[static_cast<int>(s)] = p;
  }
  // beta0 via the direct-neighbor product formula; equals 1 - Pr[size = |S|].
  double no_spread = 1.0;
  {
    std::vector<char> in_seed(n, 0);
    for (NodeId s : seeds) in_seed[s] = 1;
    for (NodeId v = 0; v < n; ++v) {
      if (in_seed[v]) continue;
      double miss = 1.0;
      bool adjacent = false;
      for (const Arc& a : g.in_neighbors(v)) {
        if (in_seed[a.node]) {
          miss *= 1.0 - a.weight;
          adjacent = true;
        }
      }
      if (adjacent) no_spread *= miss;
    }
  }
  rep.beta0 = 1.0 - no_spread;
  if (rep.beta0 > 0.0) {
    for (const auto& [size, p] : rep.cascade_size_dist) {
      int y = size - seed_size;
      if (y >= 1) rep.outer_size_dist[y] = p / rep.beta0;
    }
  }
  return rep;
}

RoisHitProbs exact_rois_hit(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds) {
  check_seeds(g, seeds);
  check_capacity(g);
  const auto es = flatten(g);
  const NodeId n = g.node_count();
  const std::uint32_t seed_bits = bits_of(seeds);

  // gamma_v = Pr[at least one in-edge of v live]
  std::vector<double> gamma(n, 0.0);
  KahanSum big_gamma;
  for (NodeId v = 0; v < n; ++v) {
    double miss = 1.0;
    for (const Arc& a : g.in_neighbors(v)) miss *= 1.0 - a.weight;
    gamma[v] = 1.0 - miss;
    big_gamma.add(gamma[v]);
  }
  const double Gamma = big_gamma.value();
  if (!(Gamma > 0.0)) throw DomainError("Gamma is zero: no reverse samples exist");

  // Source v with probability gamma_v / Gamma; edge subsets conditioned on at
  // least one live in-edge of v, each with probability Pr[g] / gamma_v.
  KahanSum hit, hit_outside;
  for (NodeId v = 0; v < n; ++v) {
    if (gamma[v] <= 0.0) continue;
    std::uint32_t in_edge_bits = 0;
    for (std::size_t i = 0; i < es.size(); ++i)
      if (es[i].v == v) in_edge_bits |= 1u << i;
    KahanSum cond_hit;
    for (std::uint32_t mask = 0; mask < (1u << es.size()); ++mask) {
      if ((mask & in_edge_bits) == 0) continue;  // v has no live in-edge
      const std::uint32_t sample = reach_reverse(es, mask, v);
      if (sample & seed_bits) cond_hit.add(mask_probability(es, mask));
    }
    const double weight = cond_hit.value() / Gamma;  // (gamma_v/Gamma) * (. / gamma_v)
    hit.add(weight);
    if (!(seed_bits >> v & 1u)) hit_outside.add(weight);
  }
  return {hit.value(), hit_outside.value()};
}

std::pair<std::vector<NodeId>, double> brute_force_opt(const ProbabilisticGraph& g, NodeId k) {
  const NodeId n = g.node_count();
  if (k == 0) throw DomainError("k must be positive");
  if (n > kMaxBruteForceNodes || g.edge_count() > kMaxBruteForceEdges)
    throw CapacityError("brute-force optimum limited to n <= 12, m <= 16");
  k = std::min(k, n);

  const auto es = flatten(g);

  // Combinations in lexicographic order; strict improvement keeps the
  // lexicographically smallest maximizer.
  std::vector<NodeId> combo(k);
  for (NodeId i = 0; i < k; ++i) combo[i] = i;
  std::vector<std::vector<NodeId>> combos;
  while (true) {
    combos.push_back(combo);
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == n - k + static_cast<NodeId>(i)) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < k; ++j)
      combo[j] = combo[j - 1] + 1;
  }

  std::vector<KahanSum> influence(combos.size());
  std::vector<std::uint32_t> combo_bits(combos.size());
  for (std::size_t c = 0; c < combos.size(); ++c) combo_bits[c] = bits_of(combos[c]);

  std::vector<std::uint32_t> closure(n);
  for (std::uint32_t mask = 0; mask < (1u << es.size()); ++mask) {
    const double p = mask_probability(es, mask);
    for (NodeId v = 0; v < n; ++v) closure[v] = reach_forward(es, mask, 1u << v);
    for (std::size_t c = 0; c < combos.size(); ++c) {
      std::uint32_t reached = combo_bits[c];
      for (NodeId v : combos[c]) reached |= closure[v];
      influence[c].add(p * std::popcount(reached));
    }
  }

  std::size_t best = 0;
  double best_val = influence[0].value();
  for (std::size_t c = 1; c < combos.size(); ++c) {
    double val = influence[c].value();
    if (val > best_val) {
      best = c;
      best_val = val;
    }
  }
  return {combos[best], best_val};
}

}  // namespace oi
