#include "oi/rois.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <memory>
#include <ostream>
#include <thread>

namespace oi {
namespace {

constexpr char kMagic[5] = {'R', 'O', 'I', 'S', '1'};
constexpr int kLogSpaceThreshold = 32;

static_assert(std::endian::native == std::endian::little,
              "sketch container assumes a little-endian host");

template <class T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ParseError("sketch file truncated");
  return v;
}

}  // namespace

GammaTable build_gamma(const ProbabilisticGraph& g) {
  GammaTable t;
  t.gamma.resize(g.node_count());
  KahanSum total;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto in = g.in_neighbors(v);
    double gv;
    if (in.size() > kLogSpaceThreshold) {
      double log_miss = 0.0;
      bool saturated = false;
      for (const Arc& a : in) {
        if (a.weight >= 1.0) saturated = true;
        else log_miss += std::log1p(-a.weight);
      }
      gv = saturated ? 1.0 : -std::expm1(log_miss);
    } else {
      double miss = 1.0;
      for (const Arc& a : in) miss *= 1.0 - a.weight;
      gv = 1.0 - miss;
    }
    t.gamma[v] = gv;
    total.add(gv);
  }
  t.big_gamma = total.value();
  if (t.big_gamma > 0.0) {
    double cum = 0.0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (t.gamma[v] <= 0.0) continue;
      cum += t.gamma[v] / t.big_gamma;
      t.source_nodes.push_back(v);
      t.source_cdf.push_back(cum);
    }
  }
  return t;
}

RoisSampler::RoisSampler(const ProbabilisticGraph& g, const GammaTable& gamma)
    : g_(g), gamma_(gamma), visit_epoch_(g.node_count(), 0) {}

RoisSample RoisSampler::next(RandomStream& rng) {
  RoisSample s;
  next_into(rng, s);
  return s;
}

void RoisSampler::next_into(RandomStream& rng, RoisSample& out) {
  if (!(gamma_.big_gamma > 0.0))
    throw DomainError("reverse sampling requires Gamma > 0");
  if (++epoch_ == 0) {
    std::fill(visit_epoch_.begin(), visit_epoch_.end(), 0);
    epoch_ = 1;
  }
  out.nodes.clear();
  queue_.clear();

  // Source by importance sampling; slack in the CDF falls into the last bucket.
  const double u = rng.uniform();
  std::size_t si = static_cast<std::size_t>(
      std::upper_bound(gamma_.source_cdf.begin(), gamma_.source_cdf.end(), u) -
      gamma_.source_cdf.begin());
  if (si >= gamma_.source_nodes.size()) si = gamma_.source_nodes.size() - 1;
  const NodeId src = gamma_.source_nodes[si];
  out.source = src;
  visit_epoch_[src] = epoch_;
  out.nodes.push_back(src);

  auto add = [&](NodeId v) {
    visit_epoch_[v] = epoch_;
    out.nodes.push_back(v);
    queue_.push_back(v);
  };

  // First live in-neighbor of the source, conditioned on at least one being
  // live: Pr[A_i] = w_i * prod_{j<i}(1-w_j) / gamma_src.
  const auto in = g_.in_neighbors(src);
  const double gv = gamma_.gamma[src];
  const double target = rng.uniform() * gv;
  std::size_t first = in.size() - 1;  // fallback bucket
  double cum = 0.0, prefix_miss = 1.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    cum += in[i].weight * prefix_miss;
    if (cum > target) {
      first = i;
      break;
    }
    prefix_miss *= 1.0 - in[i].weight;
  }
  add(in[first].node);
  for (std::size_t t = first + 1; t < in.size(); ++t)
    if (visit_epoch_[in[t].node] != epoch_ && rng.bernoulli(in[t].weight))
      add(in[t].node);

  // Reverse polling from the realized in-neighbors.
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const NodeId v = queue_[head];
    for (const Arc& a : g_.in_neighbors(v)) {
      if (visit_epoch_[a.node] == epoch_) continue;
      if (rng.bernoulli(a.weight)) add(a.node);
    }
  }
  std::sort(out.nodes.begin(), out.nodes.end());
}

SketchStore::SketchStore(const ProbabilisticGraph& g, GammaTable gamma)
    : n_(g.node_count()), gamma_(std::move(gamma)), inverted_(g.node_count()) {}

SketchStore::SketchStore(NodeId n, GammaTable gamma)
    : n_(n), gamma_(std::move(gamma)), inverted_(n) {}

void SketchStore::append(RoisSample sample) {
  const auto idx = static_cast<std::uint32_t>(samples_.size());
  if (sample.nodes.size() < 2) throw DomainError("singular reverse sample");
  for (NodeId v : sample.nodes) {
    if (v >= n_) throw DomainError("sample node out of range");
    inverted_[v].push_back(idx);
  }
  stored_bytes_ += sample.nodes.size() * 2 * sizeof(std::uint32_t) + sizeof(RoisSample);
  samples_.push_back(std::move(sample));
}

SketchStore SketchStore::build(const ProbabilisticGraph& g, std::uint64_t count,
                               const StreamContext& ctx, const ExecPolicy& exec,
                               std::uint64_t max_bytes) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  SketchStore store(g, build_gamma(g));
  store.build_seed_ = ctx.master;
  if (store.exact_mode()) return store;  // no edges: analytic answers only

  const int workers = std::max(1, exec.threads);
  if (workers == 1) {
    RoisSampler sampler(g, store.gamma_);
    RandomStream rng = ctx.stream(0, 0);
    for (std::uint64_t i = 0; i < count; ++i) {
      store.append(sampler.next(rng));
      if (max_bytes > 0 && store.stored_bytes_ > max_bytes)
        throw CapacityError("sketch memory budget exceeded");
    }
    return store;
  }

  std::vector<std::vector<RoisSample>> chunks(workers);
  std::vector<std::thread> pool;
  const std::uint64_t base = count / workers, extra = count % workers;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      RoisSampler sampler(g, store.gamma_);
      RandomStream rng = ctx.stream(0, static_cast<std::uint64_t>(w));
      const std::uint64_t mine = base + (static_cast<std::uint64_t>(w) < extra ? 1 : 0);
      chunks[w].reserve(mine);
      for (std::uint64_t i = 0; i < mine; ++i) chunks[w].push_back(sampler.next(rng));
    });
  }
  for (auto& th : pool) th.join();
  for (int w = 0; w < workers; ++w) {  // merge in worker order
    for (auto& s : chunks[w]) {
      store.append(std::move(s));
      if (max_bytes > 0 && store.stored_bytes_ > max_bytes)
        throw CapacityError("sketch memory budget exceeded");
    }
  }
  return store;
}

void SketchStore::check_seeds(const std::vector<NodeId>& seeds) const {
  if (seeds.empty()) throw DomainError("seed set must be nonempty");
  for (NodeId v : seeds)
    if (v >= n_) throw DomainError("seed id out of range");
}

std::uint64_t SketchStore::count_hits(const std::vector<NodeId>& seeds,
                                      SketchQueryScratch* scratch) const {
  check_seeds(seeds);
  SketchQueryScratch local;
  SketchQueryScratch& sc = scratch ? *scratch : local;
  if (sc.sample_epoch.size() < samples_.size()) sc.sample_epoch.resize(samples_.size(), 0);
  if (++sc.epoch == 0) {
    std::fill(sc.sample_epoch.begin(), sc.sample_epoch.end(), 0);
    sc.epoch = 1;
  }
  std::uint64_t hits = 0;
  for (NodeId v : seeds) {
    for (std::uint32_t idx : inverted_[v]) {
      if (sc.sample_epoch[idx] == sc.epoch) continue;
      sc.sample_epoch[idx] = sc.epoch;
      ++hits;
    }
  }
  return hits;
}

std::uint64_t SketchStore::count_hits_outside(const std::vector<NodeId>& seeds,
                                              SketchQueryScratch* scratch) const {
  check_seeds(seeds);
  SketchQueryScratch local;
  SketchQueryScratch& sc = scratch ? *scratch : local;
  if (sc.sample_epoch.size() < samples_.size()) sc.sample_epoch.resize(samples_.size(), 0);
  if (++sc.epoch == 0) {
    std::fill(sc.sample_epoch.begin(), sc.sample_epoch.end(), 0);
    sc.epoch = 1;
  }
  std::vector<char> in_seed(n_, 0);
  for (NodeId v : seeds) in_seed[v] = 1;
  std::uint64_t hits = 0;
  for (NodeId v : seeds) {
    for (std::uint32_t idx : inverted_[v]) {
      if (sc.sample_epoch[idx] == sc.epoch) continue;
      sc.sample_epoch[idx] = sc.epoch;
      if (!in_seed[samples_[idx].source]) ++hits;
    }
  }
  return hits;
}

double SketchStore::query_influence(const std::vector<NodeId>& seeds,
                                    SketchQueryScratch* scratch) const {
  check_seeds(seeds);
  KahanSum base;
  for (NodeId v : seeds) base.add(1.0 - gamma_.gamma[v]);
  if (exact_mode()) return base.value();  // all gamma are 0: |S|
  if (samples_.empty()) throw DomainError("empty sketch store");
  const double frac = static_cast<double>(count_hits(seeds, scratch)) /
                      static_cast<double>(samples_.size());
  return frac * gamma_.big_gamma + base.value();
}

double SketchStore::query_outward(const std::vector<NodeId>& seeds,
                                  SketchQueryScratch* scratch) const {
  check_seeds(seeds);
  if (exact_mode()) return 0.0;
  if (samples_.empty()) throw DomainError("empty sketch store");
  const double frac = static_cast<double>(count_hits_outside(seeds, scratch)) /
                      static_cast<double>(samples_.size());
  return frac * gamma_.big_gamma;
}

void SketchStore::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  write_pod(out, static_cast<std::uint32_t>(n_));
  write_pod(out, static_cast<std::uint64_t>(samples_.size()));
  for (NodeId v = 0; v < n_; ++v) write_pod(out, gamma_.gamma[v]);
  for (const RoisSample& s : samples_) {
    write_pod(out, static_cast<std::uint32_t>(s.source));
    write_pod(out, static_cast<std::uint32_t>(s.nodes.size()));
    out.write(reinterpret_cast<const char*>(s.nodes.data()),
              static_cast<std::streamsize>(s.nodes.size() * sizeof(std::uint32_t)));
  }
}

SketchStore SketchStore::load(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ParseError("not a sketch file: bad magic");
  const auto n = read_pod<std::uint32_t>(in);
  const auto count = read_pod<std::uint64_t>(in);
  if (n == 0) throw ParseError("sketch file declares an empty node set");

  GammaTable gamma;
  gamma.gamma.resize(n);
  KahanSum total;
  for (std::uint32_t v = 0; v < n; ++v) {
    const double gv = read_pod<double>(in);
    if (!(gv >= 0.0 && gv <= 1.0)) throw ParseError("gamma value outside [0,1]");
    gamma.gamma[v] = gv;
    total.add(gv);
  }
  gamma.big_gamma = total.value();
  if (gamma.big_gamma > 0.0) {
    double cum = 0.0;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (gamma.gamma[v] <= 0.0) continue;
      cum += gamma.gamma[v] / gamma.big_gamma;
      gamma.source_nodes.push_back(v);
      gamma.source_cdf.push_back(cum);
    }
  }

  SketchStore store(n, std::move(gamma));
  for (std::uint64_t i = 0; i < count; ++i) {
    RoisSample s;
    s.source = read_pod<std::uint32_t>(in);
    const auto len = read_pod<std::uint32_t>(in);
    if (len < 2) throw ParseError("singular sample in sketch file");
    s.nodes.resize(len);
    in.read(reinterpret_cast<char*>(s.nodes.data()),
            static_cast<std::streamsize>(len * sizeof(std::uint32_t)));
    if (!in) throw ParseError("sketch file truncated");
    bool source_present = false;
    for (std::uint32_t j = 0; j < len; ++j) {
      if (s.nodes[j] >= n) throw ParseError("sample node out of range");
      if (j > 0 && s.nodes[j] <= s.nodes[j - 1])
        throw ParseError("sample node list not strictly ascending");
      if (s.nodes[j] == s.source) source_present = true;
    }
    if (!source_present) throw ParseError("sample does not contain its source");
    if (store.gamma_.gamma[s.source] <= 0.0)
      throw ParseError("sample rooted at a node with gamma 0");
    store.append(std::move(s));
  }
  in.peek();
  if (!in.eof()) throw ParseError("trailing bytes after sketch payload");
  return store;
}

EstimationResult adaptive_query_outward(const ProbabilisticGraph& g, const GammaTable& gamma,
                                        const std::vector<NodeId>& seeds, double eps,
                                        double delta, const StreamContext& ctx,
                                        const ExecPolicy& exec) {
  if (seeds.empty()) throw DomainError("seed set must be nonempty");
  for (NodeId v : seeds)
    if (v >= g.node_count()) throw DomainError("seed id out of range");
  if (!(gamma.big_gamma > 0.0)) return {0.0, 0, 0.0, Termination::kConverged};

  std::vector<char> in_seed(g.node_count(), 0);
  for (NodeId v : seeds) in_seed[v] = 1;

  class HitStream final : public BoundedStream {
   public:
    HitStream(const ProbabilisticGraph& g, const GammaTable& gamma,
              const std::vector<char>& in_seed)
        : g_(g), gamma_(gamma), in_seed_(in_seed), sampler_(g, gamma) {}
    double lower() const override { return 0.0; }
    double upper() const override { return 1.0; }
    double next(RandomStream& rng) override {
      sampler_.next_into(rng, scratch_);
      if (in_seed_[scratch_.source]) return 0.0;
      for (NodeId v : scratch_.nodes)
        if (in_seed_[v]) return 1.0;
      return 0.0;
    }
    std::unique_ptr<BoundedStream> fork() const override {
      return std::make_unique<HitStream>(g_, gamma_, in_seed_);
    }

   private:
    const ProbabilisticGraph& g_;
    const GammaTable& gamma_;
    const std::vector<char>& in_seed_;
    RoisSampler sampler_;
    RoisSample scratch_;
  };

  HitStream stream(g, gamma, in_seed);
  EstimationResult r = gsra(stream, eps, delta, ctx, exec);
  r.estimate *= gamma.big_gamma;
  return r;
}

}  // namespace oi
