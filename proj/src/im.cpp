#include "oi/im.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <thread>
#include <tuple>

namespace oi {
namespace {

constexpr double kOneMinusInvE = 1.0 - 1.0 / 2.718281828459045235360287471352662498;

int ceil_log2(NodeId n) {
  NodeId x = std::max<NodeId>(n, 2);
  int l = 0;
  while ((NodeId{1} << l) < x) ++l;
  return l;
}

// Current marginal gain of v against the covered[] state.
double gain_of(const SketchStore& store, const std::vector<char>& covered,
               double gamma_over_t, NodeId v) {
  std::uint64_t delta = 0;
  for (std::uint32_t idx : store.inverted(v))
    if (!covered[idx]) ++delta;
  return static_cast<double>(delta) * gamma_over_t + (1.0 - store.gamma_table().gamma[v]);
}

void cover_samples(const SketchStore& store, std::vector<char>& covered, NodeId v,
                   std::uint64_t& covered_count) {
  for (std::uint32_t idx : store.inverted(v)) {
    if (!covered[idx]) {
      covered[idx] = 1;
      ++covered_count;
    }
  }
}

}  // namespace

GreedyResult greedy_with_bound(const SketchStore& store, NodeId k, GreedyMode mode) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  const NodeId n = store.node_count();
  const NodeId k_eff = std::min<NodeId>(k, n);
  const double big_gamma = store.gamma_table().big_gamma;
  const double gamma_over_t =
      store.size() > 0 ? big_gamma / static_cast<double>(store.size()) : 0.0;
  const auto& gamma = store.gamma_table().gamma;

  std::vector<char> covered(store.size(), 0);
  std::vector<char> selected(n, 0);
  std::uint64_t covered_count = 0;

  GreedyResult out;
  out.seed_set.reserve(k_eff);

  if (mode == GreedyMode::kNaive) {
    for (NodeId round = 0; round < k_eff; ++round) {
      NodeId best = 0;
      double best_gain = -1.0;
      bool found = false;
      for (NodeId v = 0; v < n; ++v) {
        if (selected[v]) continue;
        const double gv = gain_of(store, covered, gamma_over_t, v);
        if (!found || gv > best_gain) {
          best = v;
          best_gain = gv;
          found = true;
        }
      }
      selected[best] = 1;
      out.seed_set.push_back(best);
      cover_samples(store, covered, best, covered_count);
    }
  } else {
    // Lazy CELF queue: cached gains only shrink (submodularity), so a popped
    // entry whose recomputed gain still tops the queue is the argmax.
    using Entry = std::tuple<double, NodeId, NodeId>;  // (gain, n - v for id tie-break, round)
    auto cmp = [](const Entry& a, const Entry& b) { return a < b; };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (NodeId v = 0; v < n; ++v) {
      const double g0 = static_cast<double>(store.inverted(v).size()) * gamma_over_t +
                        (1.0 - gamma[v]);
      heap.emplace(g0, n - v, 0);
    }
    NodeId round = 0;
    while (round < k_eff && !heap.empty()) {
      auto [g, id_key, stamp] = heap.top();
      heap.pop();
      const NodeId v = n - id_key;
      if (stamp != round) {
        heap.emplace(gain_of(store, covered, gamma_over_t, v), id_key, round);
        continue;
      }
      selected[v] = 1;
      out.seed_set.push_back(v);  // selection order, same as the naive scan
      cover_samples(store, covered, v, covered_count);
      ++round;
    }
  }

  out.coverage_count = covered_count;
  {
    KahanSum base;
    for (NodeId v : out.seed_set) base.add(1.0 - gamma[v]);
    out.estimate = static_cast<double>(covered_count) * gamma_over_t + base.value();
  }

  // Residual bound: the k largest frozen marginals against the final seed set.
  std::vector<std::pair<double, NodeId>> residual;
  residual.reserve(n - k_eff);
  for (NodeId v = 0; v < n; ++v) {
    if (selected[v]) continue;
    residual.emplace_back(gain_of(store, covered, gamma_over_t, v), v);
  }
  const std::size_t take = std::min<std::size_t>(k_eff, residual.size());
  std::partial_sort(residual.begin(), residual.begin() + static_cast<std::ptrdiff_t>(take),
                    residual.end(), [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  KahanSum gain_sum;
  for (std::size_t i = 0; i < take; ++i) {
    out.top_residual.push_back(residual[i].second);
    gain_sum.add(residual[i].first);
  }
  out.residual_gain_sum = gain_sum.value();

  const double denom = out.estimate + out.residual_gain_sum;
  out.bound_sample = denom > 0.0 ? out.estimate / denom : 1.0;
  if (k >= n) out.bound_sample = 1.0;
  out.bound = std::max(out.bound_sample, kOneMinusInvE);
  return out;
}

bool PrecisionParams::satisfies(double eps, double delta) const {
  return eps1 + eps2 + eps1 * eps2 + eps3 * kOneMinusInvE <= eps + 1e-12 &&
         delta1 + delta2 <= delta + 1e-12;
}

PrecisionParams default_precision_params(double eps, double delta, double rho) {
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("eps and delta must lie in (0,1)");
  if (!(rho > 0.0) || rho > kOneMinusInvE - eps)
    throw std::invalid_argument("rho must lie in (0, 1 - 1/e - eps]");
  PrecisionParams p;
  p.eps2 = eps / 4.0;
  p.eps3 = eps / 4.0;
  p.eps1 = (eps - p.eps2 - p.eps3 * kOneMinusInvE) / (1.0 + p.eps2);
  p.delta1 = delta / 2.0;
  p.delta2 = delta / 2.0;
  p.rho = rho;
  return p;
}

namespace {

struct RoisStream {
  RoisSampler sampler;
  RandomStream rng;
};

// Internal loop shared by the public wrapper and out_ssa: `stream` persists
// across calls so every invocation sees fresh samples.
double estimate_inf_loop(const GammaTable& gamma, const std::vector<char>& in_seed,
                         double seed_gamma_complement, double eps2, double delta2p,
                         std::uint64_t t_max, RoisStream& stream) {
  const double lambda2 = 1.0 + (2.0 + 2.0 * eps2 / 3.0) * (1.0 + eps2) *
                                   std::log(1.0 / delta2p) / (eps2 * eps2);
  const double bonus_per_sample = seed_gamma_complement / gamma.big_gamma;
  double c_prime = 0.0;
  RoisSample scratch;
  for (std::uint64_t j = 1; j <= t_max; ++j) {
    stream.sampler.next_into(stream.rng, scratch);
    bool hit = false;
    for (NodeId v : scratch.nodes) {
      if (in_seed[v]) {
        hit = true;
        break;
      }
    }
    if (hit) c_prime += 1.0;
    if (c_prime + static_cast<double>(j) * bonus_per_sample >= lambda2)
      return gamma.big_gamma / static_cast<double>(j) * c_prime + seed_gamma_complement;
  }
  return 0.0;  // exceeded t_max
}

}  // namespace

double estimate_inf_check(const ProbabilisticGraph& g, const GammaTable& gamma,
                          const std::vector<NodeId>& seeds, double eps2, double delta2p,
                          std::uint64_t t_max, const StreamContext& ctx) {
  if (!(gamma.big_gamma > 0.0)) throw DomainError("Gamma must be positive");
  if (!(eps2 > 0.0 && eps2 < 1.0) || !(delta2p > 0.0 && delta2p < 1.0))
    throw std::invalid_argument("eps2 and delta2' must lie in (0,1)");
  if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (seeds.empty()) throw DomainError("seed set must be nonempty");

  std::vector<char> in_seed(g.node_count(), 0);
  KahanSum comp;
  for (NodeId v : seeds) {
    if (v >= g.node_count()) throw DomainError("seed id out of range");
    if (!in_seed[v]) comp.add(1.0 - gamma.gamma[v]);
    in_seed[v] = 1;
  }
  RoisStream stream{RoisSampler(g, gamma), ctx.stream(0, 0)};
  return estimate_inf_loop(gamma, in_seed, comp.value(), eps2, delta2p, t_max, stream);
}

OutSsaResult out_ssa(const ProbabilisticGraph& g, NodeId k, const PrecisionParams& params,
                     const StreamContext& ctx, const ExecPolicy& exec) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  for (double e : {params.eps2, params.eps3})
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("eps2/eps3 must lie in (0,1)");
  for (double d : {params.delta1, params.delta2})
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("delta1/delta2 must lie in (0,1)");
  if (!(params.rho > 0.0 && params.rho <= kOneMinusInvE))
    throw std::invalid_argument("rho must lie in (0, 1 - 1/e]");

  const NodeId n = g.node_count();
  OutSsaResult out;
  if (n < 2) {
    out.seed_set = {0};
    out.estimate = 1.0;
    out.bound = 1.0;
    return out;
  }

  GammaTable gamma = build_gamma(g);
  if (!(gamma.big_gamma > 0.0)) throw DomainError("Gamma must be positive");
  const int log2n = ceil_log2(n);
  const double lambda =
      2.0 * std::log(4.0 * log2n / params.delta1) / (params.eps3 * params.eps3);
  const double delta2p = params.delta2 / (4.0 * log2n);

  SketchStore store(g, gamma);
  // Sample pool growth preserves prefixes; verification draws from a
  // disjoint stream so the two estimates stay independent.
  const int workers = std::max(1, exec.threads);
  std::vector<RoisSampler> grow_samplers;
  std::vector<RandomStream> grow_rngs;
  for (int w = 0; w < workers; ++w) {
    grow_samplers.emplace_back(g, gamma);
    grow_rngs.push_back(ctx.stream(1, static_cast<std::uint64_t>(w)));
  }
  auto grow_to = [&](std::uint64_t target) {
    if (store.size() >= target) return;
    if (workers == 1) {
      while (store.size() < target) store.append(grow_samplers[0].next(grow_rngs[0]));
      return;
    }
    const std::uint64_t need = target - store.size();
    const std::uint64_t base = need / workers, extra = need % workers;
    std::vector<std::vector<RoisSample>> chunks(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::uint64_t mine = base + (static_cast<std::uint64_t>(w) < extra ? 1 : 0);
        chunks[w].reserve(mine);
        for (std::uint64_t j = 0; j < mine; ++j)
          chunks[w].push_back(grow_samplers[w].next(grow_rngs[w]));
      });
    }
    for (auto& th : pool) th.join();
    for (int w = 0; w < workers; ++w)
      for (auto& s : chunks[w]) store.append(std::move(s));
  };
  RoisStream check_stream{RoisSampler(g, gamma), ctx.stream(2, 0)};

  std::vector<char> in_seed(n, 0);

  GreedyResult gr;
  for (int i = 1; i <= 2 * log2n; ++i) {
    grow_to(static_cast<std::uint64_t>(std::ceil(lambda * std::pow(2.0, i))));

    gr = greedy_with_bound(store, k);
    out.iterations = i;

    const double t_max_f = std::ceil(2.0 * (1.0 + params.eps2) / (1.0 - params.eps2) *
                                     (params.eps3 * params.eps3) /
                                     (params.eps2 * params.eps2) *
                                     static_cast<double>(store.size()));
    const auto t_max = static_cast<std::uint64_t>(std::max(1.0, t_max_f));

    std::fill(in_seed.begin(), in_seed.end(), 0);
    KahanSum comp;
    for (NodeId v : gr.seed_set) {
      in_seed[v] = 1;
      comp.add(1.0 - gamma.gamma[v]);
    }
    const double i_c = estimate_inf_loop(gamma, in_seed, comp.value(), params.eps2,
                                         delta2p, t_max, check_stream);
    if (i_c <= 0.0) continue;  // verification failed; keep doubling

    const double eps1p = std::max(0.0, gr.estimate / i_c - 1.0);
    const double coverage_needed = (1.0 + eps1p) * (1.0 + params.eps2) * lambda;
    const double eps1_limit = ((1.0 - params.eps3) * gr.bound - params.rho - params.eps2) /
                              (params.rho + params.eps2);
    if (static_cast<double>(gr.coverage_count) >= coverage_needed && eps1p <= eps1_limit) {
      out.seed_set = gr.seed_set;
      out.estimate = gr.estimate;
      out.bound = gr.bound;
      out.stopped_early = true;
      return out;
    }
  }
  out.seed_set = gr.seed_set;
  out.estimate = gr.estimate;
  out.bound = gr.bound;
  out.stopped_early = false;
  return out;
}

PrecisionParams tune_parameters(const ProbabilisticGraph& g, NodeId k, double eps,
                                double delta, double delta1, double delta2, double rho,
                                const StreamContext& ctx, const ExecPolicy& exec) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("eps and delta must lie in (0,1)");
  if (delta1 + delta2 > delta)
    throw std::invalid_argument("delta1 + delta2 must not exceed delta");
  if (!(delta1 > 0.0 && delta2 > 0.0))
    throw std::invalid_argument("delta1 and delta2 must be positive");
  if (!(rho > 0.0) || rho > kOneMinusInvE - eps)
    throw std::invalid_argument("rho must lie in (0, 1 - 1/e - eps]");

  (void)exec;  // tuning is a sequential heuristic
  const NodeId n = g.node_count();
  GammaTable gamma = build_gamma(g);
  if (!(gamma.big_gamma > 0.0)) throw DomainError("Gamma must be positive");
  const int log2n = ceil_log2(n);
  const double lambda_p = 2.0 * std::log(4.0 * log2n / delta1) / (eps * eps);

  SketchStore store(g, gamma);  // holds the R prefix
  std::vector<RoisSample> pool;  // every sample generated so far, in stream order
  RoisSampler sampler(g, gamma);
  RandomStream rng = ctx.stream(3, 0);
  std::vector<char> in_seed(n, 0);

  PrecisionParams p;
  p.delta1 = delta1;
  p.delta2 = delta2;
  p.rho = rho;
  p.converged = false;

  for (int i = 1; i <= 2 * log2n; ++i) {
    const auto c = static_cast<std::uint64_t>(std::ceil(lambda_p * std::pow(2.0, i)));
    while (pool.size() < 2 * c) pool.push_back(sampler.next(rng));
    while (store.size() < c) store.append(pool[store.size()]);

    const GreedyResult gr = greedy_with_bound(store, k);

    std::fill(in_seed.begin(), in_seed.end(), 0);
    KahanSum comp;
    for (NodeId v : gr.seed_set) {
      in_seed[v] = 1;
      comp.add(1.0 - gamma.gamma[v]);
    }
    // counts over the disjoint R' segment [c, 2c)
    std::uint64_t hits_rp = 0;
    for (std::uint64_t j = c; j < 2 * c; ++j) {
      for (NodeId v : pool[j].nodes) {
        if (in_seed[v]) {
          ++hits_rp;
          break;
        }
      }
    }
    const double est_rp = static_cast<double>(hits_rp) / static_cast<double>(c) *
                              gamma.big_gamma +
                          comp.value();
    if (!(est_rp > 0.0) || hits_rp <= 1 || gr.coverage_count == 0) continue;

    p.eps1 = std::max(0.0, gr.estimate / est_rp - 1.0);
    p.eps2 = std::sqrt((2.0 + 2.0 * eps / 3.0) * (1.0 + eps) *
                       std::log(4.0 * log2n / delta2) /
                       static_cast<double>(hits_rp - 1));
    p.eps3 = std::sqrt(2.0 * std::log(4.0 * log2n / delta1) /
                       static_cast<double>(gr.coverage_count));
    if ((1.0 - p.eps3) * gr.bound / (1.0 + p.eps1) - p.eps2 >= rho) {
      p.converged = p.satisfies(eps, delta);
      return p;
    }
  }
  p.converged = false;
  return p;
}

}  // namespace oi
