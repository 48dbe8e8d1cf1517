#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "oi/common.hpp"

namespace oi {

/// How edge activation probabilities are assigned at load time.
struct WeightingModel {
  enum class Kind { kWeightedCascade, kConstant, kFromFile };

  Kind kind = Kind::kWeightedCascade;
  double p = 0.1;  // only used by kConstant

  static WeightingModel weighted_cascade() { return {Kind::kWeightedCascade, 0.0}; }
  static WeightingModel constant(double p);
  static WeightingModel from_file() { return {Kind::kFromFile, 0.0}; }
};

struct Arc {
  NodeId node = 0;  // target (out list) or source (in list)
  double weight = 0.0;
};

/// Directed graph with per-edge activation probabilities in (0, 1], mirrored
/// in/out adjacency in CSR form, and a dense-id <-> external-label map.
/// Immutable after construction; safe for concurrent reads.
class ProbabilisticGraph {
 public:
  using Edge = std::tuple<NodeId, NodeId, double>;  // (u, v, w) over dense ids

  /// Builds from deduplicated dense-id edges.  Self-loops, duplicate (u,v)
  /// pairs and weights outside (0, 1] are rejected.  Labels default to the
  /// identity map; pass `labels` to attach external ones.
  static ProbabilisticGraph from_edges(NodeId n, std::vector<Edge> edges,
                                       std::vector<std::int64_t> labels = {});

  NodeId node_count() const { return n_; }
  std::uint64_t edge_count() const { return m_; }

  std::span<const Arc> out_neighbors(NodeId u) const {
    check_node(u);
    return {out_adj_.data() + out_off_[u], out_adj_.data() + out_off_[u + 1]};
  }
  std::span<const Arc> in_neighbors(NodeId v) const {
    check_node(v);
    return {in_adj_.data() + in_off_[v], in_adj_.data() + in_off_[v + 1]};
  }
  std::uint64_t in_degree(NodeId v) const {
    check_node(v);
    return in_off_[v + 1] - in_off_[v];
  }
  std::uint64_t out_degree(NodeId u) const {
    check_node(u);
    return out_off_[u + 1] - out_off_[u];
  }

  std::int64_t label_of(NodeId u) const {
    check_node(u);
    return labels_[u];
  }
  /// Dense id for an external label; throws DomainError if unknown.
  NodeId id_of_label(std::int64_t label) const;
  bool has_label(std::int64_t label) const { return label_to_id_.count(label) > 0; }

  /// Canonical edge-list serialization: "label_u label_v w" lines in dense
  /// (u, v) order, weights with 17 significant digits.
  void serialize(std::ostream& out) const;

  std::vector<Edge> edges() const;

 private:
  void check_node(NodeId u) const {
    if (u >= n_) throw std::out_of_range("node id " + std::to_string(u) + " out of range");
  }

  NodeId n_ = 0;
  std::uint64_t m_ = 0;
  std::vector<std::uint64_t> out_off_, in_off_;
  std::vector<Arc> out_adj_, in_adj_;
  std::vector<std::int64_t> labels_;
  std::unordered_map<std::int64_t, NodeId> label_to_id_;
};

/// Parses a whitespace-separated edge list ("u v [w]"; '#' starts a comment
/// line) and assigns weights per the model.  External labels are remapped to
/// dense ids in first-seen order.  Under FromFile the third column is
/// required and duplicate (u, v) lines combine by noisy-or; under WC/Constant
/// any third column is ignored.  Self-loops are dropped.
ProbabilisticGraph load_edge_list(std::istream& in, const WeightingModel& model);

/// Returns a copy of `g` with every edge (u, v) reweighted to 1/d_in(v).
ProbabilisticGraph assign_wc_weights(const ProbabilisticGraph& g);

}  // namespace oi
