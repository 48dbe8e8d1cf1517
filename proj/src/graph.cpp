#include "oi/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace oi {

WeightingModel WeightingModel::constant(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("constant edge probability must lie strictly in (0,1)");
  return {Kind::kConstant, p};
}

ProbabilisticGraph ProbabilisticGraph::from_edges(NodeId n, std::vector<Edge> edges,
                                                  std::vector<std::int64_t> labels) {
  ProbabilisticGraph g;
  g.n_ = n;
  g.m_ = edges.size();

  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v, w] = edges[i];
    if (u >= n || v >= n) throw DomainError("edge endpoint out of range");
    if (u == v) throw DomainError("self-loop in edge set");
    if (!(w > 0.0 && w <= 1.0))
      throw DomainError("edge weight outside (0,1]");
    if (i > 0 && std::get<0>(edges[i - 1]) == u && std::get<1>(edges[i - 1]) == v)
      throw DomainError("duplicate edge in edge set");
  }

  g.out_off_.assign(n + 1, 0);
  g.in_off_.assign(n + 1, 0);
  for (const auto& [u, v, w] : edges) {
    ++g.out_off_[u + 1];
    ++g.in_off_[v + 1];
  }
  for (NodeId i = 0; i < n; ++i) {
    g.out_off_[i + 1] += g.out_off_[i];
    g.in_off_[i + 1] += g.in_off_[i];
  }
  g.out_adj_.resize(edges.size());
  g.in_adj_.resize(edges.size());
  // edges are sorted by (u, v), so out lists come out ascending directly; in
  // lists are filled per target and sorted afterwards.
  std::vector<std::uint64_t> out_pos(g.out_off_.begin(), g.out_off_.end() - 1);
  std::vector<std::uint64_t> in_pos(g.in_off_.begin(), g.in_off_.end() - 1);
  for (const auto& [u, v, w] : edges) {
    g.out_adj_[out_pos[u]++] = {v, w};
    g.in_adj_[in_pos[v]++] = {u, w};
  }
  for (NodeId v = 0; v < n; ++v) {
    std::sort(g.in_adj_.begin() + static_cast<std::ptrdiff_t>(g.in_off_[v]),
              g.in_adj_.begin() + static_cast<std::ptrdiff_t>(g.in_off_[v + 1]),
              [](const Arc& a, const Arc& b) { return a.node < b.node; });
  }

  if (labels.empty()) {
    g.labels_.resize(n);
    for (NodeId i = 0; i < n; ++i) g.labels_[i] = i;
  } else {
    if (labels.size() != n) throw DomainError("label table size mismatch");
    g.labels_ = std::move(labels);
  }
  g.label_to_id_.reserve(n);
  for (NodeId i = 0; i < n; ++i) {
    if (!g.label_to_id_.emplace(g.labels_[i], i).second)
      throw DomainError("duplicate external label");
  }
  return g;
}

NodeId ProbabilisticGraph::id_of_label(std::int64_t label) const {
  auto it = label_to_id_.find(label);
  if (it == label_to_id_.end())
    throw DomainError("unknown node label " + std::to_string(label));
  return it->second;
}

void ProbabilisticGraph::serialize(std::ostream& out) const {
  char buf[64];
  for (NodeId u = 0; u < n_; ++u) {
    for (const Arc& a : out_neighbors(u)) {
      std::snprintf(buf, sizeof buf, "%.17g", a.weight);
      out << labels_[u] << ' ' << labels_[a.node] << ' ' << buf << '\n';
    }
  }
}

std::vector<ProbabilisticGraph::Edge> ProbabilisticGraph::edges() const {
  std::vector<Edge> es;
  es.reserve(m_);
  for (NodeId u = 0; u < n_; ++u)
    for (const Arc& a : out_neighbors(u)) es.emplace_back(u, a.node, a.weight);
  return es;
}

namespace {

struct RawEdge {
  std::int64_t u, v;
  double w;
  bool has_w;
};

bool parse_line(const std::string& line, RawEdge& e, std::string& err) {
  const char* p = line.c_str();
  const char* end = p + line.size();
  auto skip_ws = [&] {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
  };
  auto parse_int = [&](std::int64_t& out) {
    auto [next, ec] = std::from_chars(p, end, out);
    if (ec != std::errc{}) return false;
    p = next;
    return true;
  };

  skip_ws();
  if (!parse_int(e.u) || e.u < 0) {
    err = "expected non-negative integer node id";
    return false;
  }
  skip_ws();
  if (!parse_int(e.v) || e.v < 0) {
    err = "expected non-negative integer node id";
    return false;
  }
  skip_ws();
  e.has_w = false;
  if (p < end) {
    char* wend = nullptr;
    e.w = std::strtod(p, &wend);
    if (wend == p) {
      err = "trailing garbage after edge";
      return false;
    }
    p = wend;
    e.has_w = true;
    skip_ws();
    if (p < end) {
      err = "trailing garbage after weight";
      return false;
    }
  }
  return true;
}

}  // namespace

ProbabilisticGraph load_edge_list(std::istream& in, const WeightingModel& model) {
  if (model.kind == WeightingModel::Kind::kConstant &&
      !(model.p > 0.0 && model.p < 1.0))
    throw DomainError("constant edge probability must lie strictly in (0,1)");

  std::vector<std::int64_t> labels;
  std::unordered_map<std::int64_t, NodeId> id_of;
  auto dense = [&](std::int64_t label) {
    auto [it, inserted] = id_of.emplace(label, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(label);
    return it->second;
  };

  // Duplicate (u,v) lines combine by noisy-or under FromFile: the IC model
  // treats parallel attempts as independent coins.
  std::map<std::pair<NodeId, NodeId>, double> combined;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    RawEdge e{};
    std::string why;
    if (!parse_line(line, e, why))
      throw ParseError("line " + std::to_string(line_no) + ": " + why);

    if (model.kind == WeightingModel::Kind::kFromFile) {
      if (!e.has_w)
        throw ParseError("line " + std::to_string(line_no) +
                         ": weight column required under the file model");
      if (!(e.w > 0.0 && e.w <= 1.0))
        throw DomainError("line " + std::to_string(line_no) +
                          ": weight outside (0,1]");
    }

    NodeId du = dense(e.u);
    NodeId dv = dense(e.v);
    if (du == dv) continue;  // self-loop

    auto key = std::make_pair(du, dv);
    if (model.kind == WeightingModel::Kind::kFromFile) {
      auto [it, inserted] = combined.emplace(key, e.w);
      if (!inserted) it->second = 1.0 - (1.0 - it->second) * (1.0 - e.w);
    } else {
      combined.emplace(key, 1.0);  // weight assigned by the model below
    }
  }

  if (labels.empty()) throw DomainError("empty graph");

  const NodeId n = static_cast<NodeId>(labels.size());
  std::vector<ProbabilisticGraph::Edge> edges;
  edges.reserve(combined.size());

  if (model.kind == WeightingModel::Kind::kWeightedCascade) {
    std::vector<std::uint64_t> in_deg(n, 0);
    for (const auto& [key, w] : combined) ++in_deg[key.second];
    for (const auto& [key, w] : combined)
      edges.emplace_back(key.first, key.second,
                         1.0 / static_cast<double>(in_deg[key.second]));
  } else {
    for (const auto& [key, w] : combined)
      edges.emplace_back(key.first, key.second,
                         model.kind == WeightingModel::Kind::kConstant ? model.p : w);
  }

  return ProbabilisticGraph::from_edges(n, std::move(edges), std::move(labels));
}

ProbabilisticGraph assign_wc_weights(const ProbabilisticGraph& g) {
  std::vector<ProbabilisticGraph::Edge> edges = g.edges();
  for (auto& [u, v, w] : edges)
    w = 1.0 / static_cast<double>(g.in_degree(v));
  std::vector<std::int64_t> labels(g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) labels[i] = g.label_of(i);
  return ProbabilisticGraph::from_edges(g.node_count(), std::move(edges), std::move(labels));
}

}  // namespace oi
