#include "oi/estimators.hpp"

#include <algorithm>
#include <memory>

namespace oi {
namespace {

// Outer sizes Y from importance polling, bounds [1, n - |S|].
class IicpStream final : public BoundedStream {
 public:
  IicpStream(const ProbabilisticGraph& g, const SeedNeighborhood& nbhd)
      : g_(g), nbhd_(nbhd), sampler_(g) {}
  double lower() const override { return 1.0; }
  double upper() const override {
    return static_cast<double>(g_.node_count() - nbhd_.seeds.size());
  }
  double next(RandomStream& rng) override {
    return static_cast<double>(sampler_.iicp_outer_size(nbhd_, rng));
  }
  std::unique_ptr<BoundedStream> fork() const override {
    return std::make_unique<IicpStream>(*this);  // shares the sampler tables
  }

 private:
  const ProbabilisticGraph& g_;
  const SeedNeighborhood& nbhd_;
  IcSampler sampler_;
};

class ZStream final : public BoundedStream {
 public:
  ZStream(const ProbabilisticGraph& g, const SeedNeighborhood& nbhd, const ZTransform& z)
      : g_(g), nbhd_(nbhd), z_(z), sampler_(g) {}
  double lower() const override { return z_.lower(); }
  double upper() const override { return z_.upper(g_.node_count()); }
  double next(RandomStream& rng) override {
    return z_.apply(static_cast<double>(sampler_.iicp_outer_size(nbhd_, rng)));
  }
  std::unique_ptr<BoundedStream> fork() const override {
    return std::make_unique<ZStream>(*this);
  }

 private:
  const ProbabilisticGraph& g_;
  const SeedNeighborhood& nbhd_;
  ZTransform z_;
  IcSampler sampler_;
};

class ForwardIcStream final : public BoundedStream {
 public:
  ForwardIcStream(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds)
      : g_(g), seeds_(seeds), sampler_(g) {}
  double lower() const override { return static_cast<double>(seeds_.size()); }
  double upper() const override { return static_cast<double>(g_.node_count()); }
  double next(RandomStream& rng) override {
    return static_cast<double>(sampler_.forward_cascade_size(seeds_, rng));
  }
  std::unique_ptr<BoundedStream> fork() const override {
    return std::make_unique<ForwardIcStream>(*this);
  }

 private:
  const ProbabilisticGraph& g_;
  const std::vector<NodeId>& seeds_;
  IcSampler sampler_;
};

class ForwardLtStream final : public BoundedStream {
 public:
  ForwardLtStream(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds)
      : g_(g), seeds_(seeds), sampler_(g) {}
  double lower() const override { return static_cast<double>(seeds_.size()); }
  double upper() const override { return static_cast<double>(g_.node_count()); }
  double next(RandomStream& rng) override {
    return static_cast<double>(sampler_.forward_cascade_size(seeds_, rng));
  }
  std::unique_ptr<BoundedStream> fork() const override {
    return std::make_unique<ForwardLtStream>(g_, seeds_);
  }

 private:
  const ProbabilisticGraph& g_;
  const std::vector<NodeId>& seeds_;
  LtSampler sampler_;
};

std::vector<NodeId> sorted_unique(std::vector<NodeId> seeds) {
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  return seeds;
}

}  // namespace

EstimationResult soiea(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds,
                       double eps, double delta, const StreamContext& ctx,
                       const ExecPolicy& exec, const RsaOptions& opts) {
  SeedNeighborhood nbhd = build_neighborhood(g, seeds);
  if (nbhd.beta0 <= 0.0) return {0.0, 0, 0.0, Termination::kConverged};

  IicpStream x(g, nbhd), x_prime(g, nbhd);
  EstimationResult r = rsa(x, x_prime, eps, delta, ctx, exec, opts);
  r.estimate *= nbhd.beta0;
  return r;
}

EstimationResult siea(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds,
                      double eps, double delta, const StreamContext& ctx,
                      const ExecPolicy& exec, const RsaOptions& opts) {
  SeedNeighborhood nbhd = build_neighborhood(g, seeds);
  const auto seed_size = static_cast<std::uint32_t>(nbhd.seeds.size());
  if (nbhd.beta0 <= 0.0)
    return {static_cast<double>(seed_size), 0, 0.0, Termination::kConverged};

  ZTransform z{nbhd.beta0, seed_size};
  ZStream x(g, nbhd, z), x_prime(g, nbhd, z);
  return rsa(x, x_prime, eps, delta, ctx, exec, opts);
}

EstimationResult siea_lt(const ProbabilisticGraph& g, const std::vector<NodeId>& seeds,
                         double eps, double delta, const StreamContext& ctx,
                         const ExecPolicy& exec, const RsaOptions& opts) {
  LtSampler::validate_weights(g);
  const std::vector<NodeId> s = sorted_unique(seeds);
  if (s.empty()) throw DomainError("seed set must be nonempty");
  for (NodeId v : s)
    if (v >= g.node_count()) throw DomainError("seed id out of range");

  ForwardLtStream x(g, s), x_prime(g, s);
  return rsa(x, x_prime, eps, delta, ctx, exec, opts);
}

EstimationResult mc_fixed_influence(const ProbabilisticGraph& g,
                                    const std::vector<NodeId>& seeds, std::uint64_t count,
                                    const StreamContext& ctx, const ExecPolicy& exec) {
  const std::vector<NodeId> s = sorted_unique(seeds);
  if (s.empty()) throw DomainError("seed set must be nonempty");
  for (NodeId v : s)
    if (v >= g.node_count()) throw DomainError("seed id out of range");
  ForwardIcStream x(g, s);
  return fixed_budget_mean(x, count, ctx, exec);
}

EstimationResult mc_fixed_outward(const ProbabilisticGraph& g,
                                  const std::vector<NodeId>& seeds, std::uint64_t count,
                                  const StreamContext& ctx, const ExecPolicy& exec) {
  const std::vector<NodeId> s = sorted_unique(seeds);
  EstimationResult r = mc_fixed_influence(g, s, count, ctx, exec);
  r.estimate -= static_cast<double>(s.size());
  return r;
}

double relative_error_pct(double estimate, double truth) {
  if (!(truth > 0.0)) throw DomainError("relative error needs positive truth");
  return std::abs(estimate / truth - 1.0) * 100.0;
}

}  // namespace oi
