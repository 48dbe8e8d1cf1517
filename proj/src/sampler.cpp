#include "oi/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace oi {
namespace {

constexpr int kLogSpaceThreshold = 32;
constexpr std::uint64_t kCertain = std::numeric_limits<std::uint64_t>::max();

// Pr[next_u64() < threshold] = w; kCertain is handled as an always-hit so
// weight-1 edges carry no 2^-64 slack.
std::uint64_t coin_threshold(double w) {
  if (w >= 1.0) return kCertain;
  return static_cast<std::uint64_t>(w * 0x1.0p64);
}

inline bool coin(RandomStream& rng, std::uint64_t threshold) {
  const std::uint64_t r = rng.next_u64();
  return r < threshold || threshold == kCertain;
}

// 1 - prod(1 - w_i), in log space once the factor count makes the direct
// product lossy.
class MissProduct {
 public:
  void feed(double w) {
    ++count_;
    if (w >= 1.0) {
      saturated_ = true;
    } else {
      direct_ *= 1.0 - w;
      log_sum_ += std::log1p(-w);
    }
  }
  double one_minus() const {
    if (saturated_) return 1.0;
    if (count_ > kLogSpaceThreshold) return -std::expm1(log_sum_);
    return 1.0 - direct_;
  }

 private:
  double direct_ = 1.0;
  double log_sum_ = 0.0;
  int count_ = 0;
  bool saturated_ = false;
};

}  // namespace

SeedNeighborhood build_neighborhood(const ProbabilisticGraph& g, std::vector<NodeId> seeds) {
  if (seeds.empty()) throw DomainError("seed set must be nonempty");
  for (NodeId s : seeds)
    if (s >= g.node_count()) throw DomainError("seed id out of range");
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::vector<char> in_seed(g.node_count(), 0);
  for (NodeId s : seeds) in_seed[s] = 1;

  SeedNeighborhood nb;
  nb.seeds = std::move(seeds);
  for (NodeId s : nb.seeds)
    for (const Arc& a : g.out_neighbors(s))
      if (!in_seed[a.node]) nb.neighbors.push_back(a.node);
  std::sort(nb.neighbors.begin(), nb.neighbors.end());
  nb.neighbors.erase(std::unique(nb.neighbors.begin(), nb.neighbors.end()),
                     nb.neighbors.end());

  nb.direct_prob.reserve(nb.neighbors.size());
  for (NodeId v : nb.neighbors) {
    MissProduct mp;
    for (const Arc& a : g.in_neighbors(v))
      if (in_seed[a.node]) mp.feed(a.weight);
    nb.direct_prob.push_back(mp.one_minus());
  }

  const std::size_t l = nb.neighbors.size();
  nb.first_prob.resize(l + 1);
  double prefix_miss = 1.0;
  for (std::size_t i = 0; i < l; ++i) {
    nb.first_prob[i] = nb.direct_prob[i] * prefix_miss;
    prefix_miss *= 1.0 - nb.direct_prob[i];
  }
  nb.first_prob[l] = prefix_miss;
  nb.beta0 = 1.0 - prefix_miss;

  if (nb.beta0 > 0.0) {
    nb.stage1_cdf.resize(l);
    double cum = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      cum += nb.first_prob[i] / nb.beta0;
      nb.stage1_cdf[i] = cum;
    }
    nb.suffix_any_prob.assign(l + 1, 0.0);
    nb.suffix_any_coin.assign(l + 1, 0);
    double miss = 1.0;
    for (std::size_t i = l; i-- > 0;) {
      miss *= 1.0 - nb.direct_prob[i];
      nb.suffix_any_prob[i] = 1.0 - miss;
      nb.suffix_any_coin[i] = coin_threshold(nb.suffix_any_prob[i]);
    }

    // Walker alias table over Pr[A_i]/beta0
    nb.alias_prob.assign(l, 1.0);
    nb.alias_idx.resize(l);
    for (std::size_t i = 0; i < l; ++i) nb.alias_idx[i] = static_cast<std::uint32_t>(i);
    std::vector<double> scaled(l);
    for (std::size_t i = 0; i < l; ++i)
      scaled[i] = nb.first_prob[i] / nb.beta0 * static_cast<double>(l);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = l; i-- > 0;)
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      small.pop_back();
      const std::uint32_t g2 = large.back();
      nb.alias_prob[s] = scaled[s];
      nb.alias_idx[s] = g2;
      scaled[g2] = scaled[g2] + scaled[s] - 1.0;
      if (scaled[g2] < 1.0) {
        large.pop_back();
        small.push_back(g2);
      }
    }
    // leftovers carry probability 1 (floating-point slack lands here)
  }
  return nb;
}

// The sampler keeps its own copy of the out-adjacency with targets and coin
// thresholds in separate arrays: the common path of a sparse cascade reads
// only the threshold stream.
IcSampler::IcSampler(const ProbabilisticGraph& g) : visit_epoch_(g.node_count(), 0) {
  const NodeId n = g.node_count();
  auto t = std::make_shared<ArcTables>();
  t->off.resize(n + 1);
  t->tgt.resize(g.edge_count());
  t->w.resize(g.edge_count());
  t->any_prob.resize(g.edge_count());
  t->any_thr.resize(g.edge_count());
  std::uint64_t pos = 0;
  for (NodeId u = 0; u < n; ++u) {
    t->off[u] = pos;
    for (const Arc& a : g.out_neighbors(u)) {
      t->tgt[pos] = a.node;
      t->w[pos] = a.weight;
      ++pos;
    }
    double miss = 1.0;
    for (std::uint64_t e = pos; e-- > t->off[u];) {
      miss *= 1.0 - t->w[e];
      t->any_prob[e] = 1.0 - miss;
      t->any_thr[e] = coin_threshold(t->any_prob[e]);
    }
  }
  t->off[n] = pos;
  tables_ = std::move(t);
  queue_.reserve(n);
}

void IcSampler::bump_epoch() {
  if (++epoch_ == 0) {  // uint8 wrapped: clear the stale stamps
    std::memset(visit_epoch_.data(), 0, visit_epoch_.size());
    epoch_ = 1;
  }
}

int IcSampler::run_stage2(RandomStream& rng) {
  const ArcTables& tb = *tables_;
  int activated = 0;
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const NodeId u = queue_[head];
    const std::uint64_t end = tb.off[u + 1];
    std::uint64_t e = tb.off[u];
    while (e < end) {
      if (!coin(rng, tb.any_thr[e])) break;  // nothing live in the suffix
      // first live arc at t >= e, inverse CDF conditioned on the suffix hit
      const double target = rng.uniform() * tb.any_prob[e];
      double cum = 0.0, prefix = 1.0;
      std::uint64_t t = e;
      for (; t + 1 < end; ++t) {
        cum += tb.w[t] * prefix;
        if (cum > target) break;
        prefix *= 1.0 - tb.w[t];
      }
      const NodeId v = tb.tgt[t];
      if (visit_epoch_[v] != epoch_) {
        visit_epoch_[v] = epoch_;
        queue_.push_back(v);
        ++activated;
      }
      e = t + 1;
    }
  }
  return activated;
}

int IcSampler::iicp_outer_size(const SeedNeighborhood& nbhd, RandomStream& rng) {
  if (!(nbhd.beta0 > 0.0))
    throw DomainError("iicp requires beta0 > 0; outward influence is exactly 0");
  bump_epoch();
  for (NodeId s : nbhd.seeds) visit_epoch_[s] = epoch_;
  queue_.clear();

  // Stage 1: first activated neighbor, drawn in O(1) from the alias table
  // over Pr[A_i]/beta0.
  const std::size_t l = nbhd.neighbors.size();
  std::size_t idx = rng.uniform_below(static_cast<std::uint32_t>(l));
  if (rng.uniform() >= nbhd.alias_prob[idx]) idx = nbhd.alias_idx[idx];

  auto activate = [&](NodeId v) {
    visit_epoch_[v] = epoch_;
    queue_.push_back(v);
  };
  activate(nbhd.neighbors[idx]);
  int outer = 1;
  // remaining neighbors by the same suffix-hit walk as stage 2
  std::size_t j = idx + 1;
  while (j < l) {
    if (!coin(rng, nbhd.suffix_any_coin[j])) break;
    const double target = rng.uniform() * nbhd.suffix_any_prob[j];
    double cum = 0.0, prefix = 1.0;
    std::size_t t = j;
    for (; t + 1 < l; ++t) {
      cum += nbhd.direct_prob[t] * prefix;
      if (cum > target) break;
      prefix *= 1.0 - nbhd.direct_prob[t];
    }
    activate(nbhd.neighbors[t]);
    ++outer;
    j = t + 1;
  }
  return outer + run_stage2(rng);
}

int IcSampler::forward_cascade_size(const std::vector<NodeId>& seeds, RandomStream& rng) {
  if (seeds.empty()) throw DomainError("seed set must be nonempty");
  bump_epoch();
  queue_.clear();
  int size = 0;
  for (NodeId s : seeds) {
    if (visit_epoch_[s] == epoch_) continue;
    visit_epoch_[s] = epoch_;
    queue_.push_back(s);
    ++size;
  }
  return size + run_stage2(rng);
}

LtSampler::LtSampler(const ProbabilisticGraph& g)
    : g_(g),
      visit_epoch_(g.node_count(), 0),
      rem_epoch_(g.node_count(), 0),
      remaining_(g.node_count(), 1.0) {
  queue_.reserve(g.node_count());
}

void LtSampler::validate_weights(const ProbabilisticGraph& g) {
  for (NodeId v = 0; v < g.node_count(); ++v) {
    double sum = 0.0;
    for (const Arc& a : g.in_neighbors(v)) sum += a.weight;
    if (sum > 1.0 + 1e-9)
      throw DomainError("LT model requires in-weight sums <= 1; node " +
                        std::to_string(g.label_of(v)) + " sums to " +
                        std::to_string(sum));
  }
}

int LtSampler::forward_cascade_size(const std::vector<NodeId>& seeds, RandomStream& rng) {
  if (seeds.empty()) throw DomainError("seed set must be nonempty");
  if (++epoch_ == 0) {
    std::fill(visit_epoch_.begin(), visit_epoch_.end(), 0);
    std::fill(rem_epoch_.begin(), rem_epoch_.end(), 0);
    epoch_ = 1;
  }
  queue_.clear();
  int size = 0;
  for (NodeId s : seeds) {
    if (visit_epoch_[s] == epoch_) continue;
    visit_epoch_[s] = epoch_;
    queue_.push_back(s);
    ++size;
  }
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const NodeId u = queue_[head];
    for (const Arc& a : g_.out_neighbors(u)) {
      const NodeId v = a.node;
      if (visit_epoch_[v] == epoch_) continue;
      if (rem_epoch_[v] != epoch_) {
        rem_epoch_[v] = epoch_;
        remaining_[v] = 1.0;
      }
      // v selects u with conditional probability w / remaining mass.
      if (remaining_[v] > 0.0 && rng.uniform() * remaining_[v] < a.weight) {
        visit_epoch_[v] = epoch_;
        queue_.push_back(v);
        ++size;
      } else {
        remaining_[v] -= a.weight;
      }
    }
  }
  return size;
}

}  // namespace oi
