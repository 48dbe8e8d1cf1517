#pragma once

#include <iosfwd>
#include <vector>

#include "oi/common.hpp"
#include "oi/graph.hpp"
#include "oi/mean.hpp"

namespace oi {

/// Per-node probabilities gamma_v = Pr[>= 1 live in-edge of v], their total
/// Gamma, and the source-selection CDF over nodes with gamma_v > 0.
struct GammaTable {
  std::vector<double> gamma;
  double big_gamma = 0.0;
  std::vector<NodeId> source_nodes;  // nodes with gamma > 0, ascending
  std::vector<double> source_cdf;    // cumulative gamma_v / Gamma over source_nodes
};

GammaTable build_gamma(const ProbabilisticGraph& g);

/// One reverse outward sample: importance-selected source plus every node
/// that reaches it in the realized graph.  Never singular: nodes.size() >= 2.
struct RoisSample {
  NodeId source = 0;
  std::vector<NodeId> nodes;  // sorted ascending, contains source
};

/// Per-worker reverse-sample generator (owns BFS scratch).
class RoisSampler {
 public:
  RoisSampler(const ProbabilisticGraph& g, const GammaTable& gamma);
  RoisSample next(RandomStream& rng);
  void next_into(RandomStream& rng, RoisSample& out);

 private:
  const ProbabilisticGraph& g_;
  const GammaTable& gamma_;
  std::vector<std::uint32_t> visit_epoch_;
  std::vector<NodeId> queue_;
  std::uint32_t epoch_ = 0;
};

/// Reusable per-caller scratch for store queries; queries without one
/// allocate their own.
struct SketchQueryScratch {
  std::vector<std::uint32_t> sample_epoch;
  std::uint32_t epoch = 0;
};

/// A collection of reverse outward samples with an inverted node -> sample-id
/// index, answering influence and outward-influence queries for arbitrary
/// seed sets.  When Gamma == 0 the store is an exact-mode oracle holding no
/// samples (the answers are forced analytically).
class SketchStore {
 public:
  SketchStore(const ProbabilisticGraph& g, GammaTable gamma);
  SketchStore(NodeId n, GammaTable gamma);  // for loading without a graph

  /// Generates `count` samples (parallel batches merge in worker order).
  /// max_bytes > 0 enforces a memory budget on the stored node lists.
  static SketchStore build(const ProbabilisticGraph& g, std::uint64_t count,
                           const StreamContext& ctx, const ExecPolicy& exec = {},
                           std::uint64_t max_bytes = 0);

  void append(RoisSample sample);

  std::uint64_t size() const { return samples_.size(); }
  bool exact_mode() const { return gamma_.big_gamma <= 0.0; }
  const GammaTable& gamma_table() const { return gamma_; }
  NodeId node_count() const { return n_; }
  const std::vector<RoisSample>& samples() const { return samples_; }
  const std::vector<std::uint32_t>& inverted(NodeId v) const { return inverted_[v]; }
  std::uint64_t build_seed() const { return build_seed_; }

  /// Count of samples intersecting S (C') and of samples intersecting S whose
  /// source lies outside S (C).
  std::uint64_t count_hits(const std::vector<NodeId>& seeds,
                           SketchQueryScratch* scratch = nullptr) const;
  std::uint64_t count_hits_outside(const std::vector<NodeId>& seeds,
                                   SketchQueryScratch* scratch = nullptr) const;

  /// I(S) estimate: C'/T * Gamma + sum_{v in S} (1 - gamma_v); |S| in exact mode.
  double query_influence(const std::vector<NodeId>& seeds,
                         SketchQueryScratch* scratch = nullptr) const;
  /// Outward estimate: C/T * Gamma; 0 in exact mode.
  double query_outward(const std::vector<NodeId>& seeds,
                       SketchQueryScratch* scratch = nullptr) const;

  void save(std::ostream& out) const;
  static SketchStore load(std::istream& in);

 private:
  void check_seeds(const std::vector<NodeId>& seeds) const;

  NodeId n_ = 0;
  GammaTable gamma_;
  std::vector<RoisSample> samples_;
  std::vector<std::vector<std::uint32_t>> inverted_;
  std::uint64_t build_seed_ = 0;
  std::uint64_t stored_bytes_ = 0;
};

/// Sequential-stopping outward estimate over fresh reverse samples: GSRA on
/// the 0/1 hit-outside indicator scaled by Gamma.  A zero-outward seed set
/// (for example S = V) ends with Termination::kBudgetExceeded rather than an
/// exception.
EstimationResult adaptive_query_outward(const ProbabilisticGraph& g, const GammaTable& gamma,
                                        const std::vector<NodeId>& seeds, double eps,
                                        double delta, const StreamContext& ctx,
                                        const ExecPolicy& exec = {});

}  // namespace oi
