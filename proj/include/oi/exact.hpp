#pragma once

#include <map>
#include <utility>
#include <vector>

#include "oi/common.hpp"
#include "oi/graph.hpp"

namespace oi {

/// Ground truth for tiny graphs, computed by exhaustive enumeration of all
/// 2^m live-edge subsets.  Everything here is exact up to compensated
/// floating-point summation; tolerances of 1e-12 are meaningful.

inline constexpr std::uint64_t kMaxExactEdges = 20;
inline constexpr NodeId kMaxBruteForceNodes = 12;
inline constexpr std::uint64_t kMaxBruteForceEdges = 16;

struct ExactReport {
  double influence = 0.0;
  double outward = 0.0;
  double beta0 = 0.0;
  std::map<int, double> cascade_size_dist;  // Pr[cascade size = s], s in [|S|, n]
  std::map<int, double> outer_size_dist;    // Pr[outer size = y | non-trivial], empty when beta0 == 0
};

struct RoisHitProbs {
  double hit = 0.0;          // Pr[R intersects S]
  double hit_outside = 0.0;  // Pr[R intersects S and src(R) not in S]
};

/// Expected number of nodes reachable from S over the live-edge distribution.
/// Requires m <= 20 and a nonempty seed set.
double exact_influence(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds);

/// exact_influence minus |S|.
double exact_outward(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds);

ExactReport exact_distributions(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds);

/// Exact hit probabilities of a random reverse outward sample against S.
/// Requires m <= 20 and at least one edge (Gamma > 0).
RoisHitProbs exact_rois_hit(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds);

/// Exhaustive optimum over all size-k seed sets; ties break toward the
/// lexicographically smallest set.  Requires n <= 12 and m <= 16.
std::pair<std::vector<NodeId>, double> brute_force_opt(const ProbabilisticGraph& g, NodeId k);

}  // namespace oi
