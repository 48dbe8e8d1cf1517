#pragma once

#include <vector>

#include "oi/common.hpp"
#include "oi/graph.hpp"
#include "oi/rois.hpp"

namespace oi {

struct GreedyResult {
  std::vector<NodeId> seed_set;          // ascending
  double estimate = 0.0;                 // sketch estimate of I(seed_set)
  double bound = 0.0;                    // max(sample-dependent bound, 1 - 1/e)
  double bound_sample = 0.0;             // the sample-dependent bound alone
  std::uint64_t coverage_count = 0;      // C'(seed_set) on the store
  std::vector<NodeId> top_residual;      // the L set of largest frozen marginals
  double residual_gain_sum = 0.0;        // sum of their gains
};

enum class GreedyMode { kLazy, kNaive };  // naive scan kept as the test oracle

/// Greedy seed selection over a sketch store with the sample-dependent
/// approximation bound.  Marginal gain of v is
/// coverage-delta * Gamma / |R| + (1 - gamma_v); ties break to the lowest id.
GreedyResult greedy_with_bound(const SketchStore& store, NodeId k,
                               GreedyMode mode = GreedyMode::kLazy);

struct PrecisionParams {
  double eps1 = 0.0, eps2 = 0.0, eps3 = 0.0;
  double delta1 = 0.0, delta2 = 0.0;
  double rho = 0.0;
  bool converged = true;  // tuning ran to its stop condition and certifies (eps, delta)

  // eps1 + eps2 + eps1*eps2 + eps3*(1 - 1/e) <= eps and delta1 + delta2 <= delta.
  bool satisfies(double eps, double delta) const;
};

/// Fixed split used when no tuning is requested: delta1 = delta2 = delta/2,
/// eps2 = eps3 = eps/4, eps1 the largest feasible remainder.
PrecisionParams default_precision_params(double eps, double delta, double rho);

/// One-sided influence verification over fresh reverse samples.  Returns an
/// estimate I_c with Pr[I_c <= (1+eps2) I(S)] >= 1 - delta2p, or the sentinel
/// 0 after t_max samples.
double estimate_inf_check(const ProbabilisticGraph& g, const GammaTable& gamma,
                          const std::vector<NodeId>& seeds, double eps2, double delta2p,
                          std::uint64_t t_max, const StreamContext& ctx);

struct OutSsaResult {
  std::vector<NodeId> seed_set;
  double estimate = 0.0;
  double bound = 0.0;     // sample-dependent bound at the returning iteration
  int iterations = 0;
  bool stopped_early = true;  // stopping condition met before the doubling budget ran out
};

/// Stop-and-stare influence maximization over reverse outward samples:
/// doubles the sample pool, runs greedy_with_bound, and verifies the
/// candidate against an independent estimate until the rho-approximation
/// condition holds.
OutSsaResult out_ssa(const ProbabilisticGraph& g, NodeId k, const PrecisionParams& params,
                     const StreamContext& ctx, const ExecPolicy& exec = {});

/// Heuristic precision-parameter search: mirrors the doubling loop with two
/// disjoint sample pools of equal cardinality and measures eps1/eps2/eps3
/// empirically; stops when (1-eps3) bound / (1+eps1) - eps2 >= rho.
PrecisionParams tune_parameters(const ProbabilisticGraph& g, NodeId k, double eps,
                                double delta, double delta1, double delta2, double rho,
                                const StreamContext& ctx, const ExecPolicy& exec = {});

}  // namespace oi
