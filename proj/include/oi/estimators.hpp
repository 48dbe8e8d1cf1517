#pragma once

#include <vector>

#include "oi/common.hpp"
#include "oi/graph.hpp"
#include "oi/mean.hpp"
#include "oi/sampler.hpp"

namespace oi {

/// Affine map from outer sizes to influence-mean variables:
/// Z = Y * beta0 + |S|, with E[Z] = I(S) and bounds
/// |S| + beta0 <= Z <= |S| + beta0 (n - |S|).
struct ZTransform {
  double beta0 = 0.0;
  std::uint32_t seed_size = 0;

  double apply(double y) const { return y * beta0 + seed_size; }
  double lower() const { return seed_size + beta0; }
  double upper(NodeId n) const { return seed_size + beta0 * (n - seed_size); }
};

/// Outward influence with an (eps, delta) guarantee: RSA over importance-
/// polled outer sizes, scaled by beta0.  Returns exactly 0 (zero samples)
/// when the cascade cannot leave S.
EstimationResult soiea(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds,
                       double eps, double delta, const StreamContext& ctx,
                       const ExecPolicy& exec = {}, const RsaOptions& opts = {});

/// Influence spread with an (eps, delta) guarantee via the Z transform.
/// Returns exactly |S| when beta0 == 0.
EstimationResult siea(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds,
                      double eps, double delta, const StreamContext& ctx,
                      const ExecPolicy& exec = {}, const RsaOptions& opts = {});

/// Influence spread under the linear threshold model: RSA over forward LT
/// cascade sizes in [|S|, n].
EstimationResult siea_lt(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds,
                         double eps, double delta, const StreamContext& ctx,
                         const ExecPolicy& exec = {}, const RsaOptions& opts = {});

/// Fixed-budget Monte-Carlo baselines over forward IC cascades.
EstimationResult mc_fixed_influence(const ProbabilisticGraph& g,
                                    const std::vector<NodeId>& seeds, std::uint64_t count,
                                    const StreamContext& ctx, const ExecPolicy& exec = {});
EstimationResult mc_fixed_outward(const ProbabilisticGraph& g,
                                  const std::vector<NodeId>& seeds, std::uint64_t count,
                                  const StreamContext& ctx, const ExecPolicy& exec = {});

/// |estimate/truth - 1| * 100.  Zero or negative truth has no relative error;
/// callers report that case separately.
double relative_error_pct(double estimate, double truth);

}  // namespace oi
