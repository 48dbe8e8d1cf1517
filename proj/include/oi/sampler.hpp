#pragma once

#include <memory>
#include <vector>

#include "oi/common.hpp"
#include "oi/graph.hpp"

namespace oi {

/// Precomputed stage-1 data for importance polling of a fixed seed set:
/// the direct out-neighborhood of S (ascending ids), the per-neighbor direct
/// activation probabilities, the first-activation event probabilities and
/// their inverse CDF, and beta0 = Pr[cascade leaves S].
struct SeedNeighborhood {
  std::vector<NodeId> seeds;       // deduplicated, ascending
  std::vector<NodeId> neighbors;   // N_out(S) \ S, ascending
  std::vector<double> direct_prob; // P_{S,v} per neighbor
  std::vector<double> first_prob;  // Pr[A_1..A_{l+1}], size l+1
  std::vector<double> stage1_cdf;  // cumulative Pr[A_i]/beta0, size l (empty if beta0 == 0)
  // Walker alias table over Pr[A_i]/beta0: constant-time first-neighbor
  // selection regardless of l
  std::vector<double> alias_prob;
  std::vector<std::uint32_t> alias_idx;
  // derived suffix tables: probability of (and coin for) at least one direct
  // activation among neighbors i..l-1
  std::vector<double> suffix_any_prob;
  std::vector<std::uint64_t> suffix_any_coin;
  double beta0 = 0.0;
};

SeedNeighborhood build_neighborhood(const ProbabilisticGraph& g, std::vector<NodeId> seeds);

/// Per-worker cascade generator over the shared immutable graph.  Holds the
/// BFS queue and an epoch-stamped visited array so repeated sampling does no
/// O(n) resets.  One instance per thread; not shareable between concurrent
/// callers.
class IcSampler {
 public:
  explicit IcSampler(const ProbabilisticGraph& g);

  /// Importance polling: outer size Y of a non-trivial cascade, 1 <= Y <= n-|S|.
  /// Requires nbhd.beta0 > 0.
  int iicp_outer_size(const SeedNeighborhood& nbhd, RandomStream& rng);

  /// Plain live-edge polling: cascade size M, |S| <= M <= n.
  int forward_cascade_size(const std::vector<NodeId>& seeds, RandomStream& rng);

  // Copies share the immutable arc tables and get fresh scratch, so forking
  // one sampler per worker does not multiply the cache footprint.
  IcSampler(const IcSampler&) = default;

 private:
  void bump_epoch();
  int run_stage2(RandomStream& rng);

  // Preprocessed out-adjacency.  Arc coins are realized by a geometric-style
  // walk: one coin decides whether any arc in the remaining suffix is live
  // (any_thr), and only then a conditional scan finds the first live one.
  // Identical in distribution to per-arc coins, far fewer draws when weights
  // are small.
  struct ArcTables {
    std::vector<std::uint64_t> off;
    std::vector<NodeId> tgt;
    std::vector<double> w;
    std::vector<double> any_prob;        // 1 - prod_{t >= e} (1 - w_t), per arc slot
    std::vector<std::uint64_t> any_thr;  // coin thresholds for any_prob
  };
  std::shared_ptr<const ArcTables> tables_;
  std::vector<std::uint8_t> visit_epoch_;
  std::vector<NodeId> queue_;
  std::uint8_t epoch_ = 0;
};

/// Linear-threshold cascade sizes via live-edge selection: each node keeps at
/// most one in-edge, edge (u,v) with probability w(u,v).  Selection is lazy —
/// on the k-th contact the conditional probability w / remaining-mass is
/// used, which is distribution-identical to choosing the edge up front.
class LtSampler {
 public:
  explicit LtSampler(const ProbabilisticGraph& g);

  int forward_cascade_size(const std::vector<NodeId>& seeds, RandomStream& rng);

  /// Throws DomainError naming the first node whose in-weights sum above 1.
  static void validate_weights(const ProbabilisticGraph& g);

 private:
  const ProbabilisticGraph& g_;
  std::vector<std::uint32_t> visit_epoch_, rem_epoch_;
  std::vector<double> remaining_;
  std::vector<NodeId> queue_;
  std::uint32_t epoch_ = 0;
};

}  // namespace oi
