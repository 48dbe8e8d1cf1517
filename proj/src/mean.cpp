#include "oi/mean.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

namespace oi {
namespace {

void check_eps_delta(double eps, double delta) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
}

void check_range(double a, double b) {
  if (!(a >= 0.0) || !(b >= a)) throw std::invalid_argument("stream range must satisfy 0 <= a <= b");
}

// Sense-reversing spin barrier.  The sampling rounds are microseconds long,
// so futex-based waits (std::barrier) can dominate wall time on virtualized
// hosts; spinning with a yield fallback keeps the round-synchronous drive at
// memory speed.
class SpinBarrier {
 public:
  explicit SpinBarrier(int n) : n_(n) {}
  void arrive_and_wait() {
    const int gen = gen_.load(std::memory_order_acquire);
    if (count_.fetch_add(1, std::memory_order_acq_rel) + 1 == n_) {
      count_.store(0, std::memory_order_relaxed);
      gen_.store(gen + 1, std::memory_order_release);
    } else {
      int spins = 0;
      while (gen_.load(std::memory_order_acquire) == gen)
        if (++spins > 4096) std::this_thread::yield();
    }
  }

 private:
  const int n_;
  std::atomic<int> count_{0};
  std::atomic<int> gen_{0};
};

struct LoopTotals {
  double stat = 0.0;     // sum of the per-draw statistic
  double raw = 0.0;      // sum of raw stream values
  std::uint64_t stats = 0;  // number of statistics accumulated
  std::uint64_t draws = 0;  // number of raw values drawn
  bool capped = false;
};

// One logical draw; pair mode consumes two raw values per statistic.
template <bool kPairs>
inline void one_draw(BoundedStream& s, RandomStream& rng, LoopTotals& t) {
  if constexpr (kPairs) {
    const double x1 = s.next(rng);
    const double x2 = s.next(rng);
    const double d = x1 - x2;
    t.stat += d * d * 0.5;
    t.raw += x1 + x2;
    t.stats += 1;
    t.draws += 2;
  } else {
    const double x = s.next(rng);
    t.stat += x;
    t.raw += x;
    t.stats += 1;
    t.draws += 1;
  }
}

// Sequential stopping loop: draw until stat >= threshold or cap reached.
LoopTotals stopping_sequential(BoundedStream& s, RandomStream rng, double threshold,
                               std::uint64_t cap) {
  LoopTotals t;
  while (t.stat < threshold) {
    if (t.draws >= cap) {
      t.capped = true;
      break;
    }
    one_draw<false>(s, rng, t);
  }
  return t;
}

// Round-synchronous parallel stopping loop.  Each round every worker emits a
// batch; batches merge in worker order and the threshold is re-checked after
// each merged batch, so the result is deterministic for a fixed worker count.
LoopTotals stopping_parallel(BoundedStream& proto, const StreamContext& ctx,
                             std::uint64_t family, const ExecPolicy& exec,
                             double threshold) {
  const int workers = exec.threads;
  const int batch0 = std::max(1, exec.batch);
  constexpr int kBatchCap = 1 << 16;

  std::vector<std::unique_ptr<BoundedStream>> streams;
  streams.reserve(workers);
  for (int w = 0; w < workers; ++w) streams.push_back(proto.fork());

  struct alignas(64) Slot {  // one cache line per worker
    double stat = 0.0, raw = 0.0;
  };
  std::vector<Slot> slots(workers);
  LoopTotals totals;
  bool done = false;

  SpinBarrier sync(workers);
  auto work = [&](int w) {
    BoundedStream& s = *streams[w];
    RandomStream rng = ctx.stream(family, static_cast<std::uint64_t>(w));  // worker-local
    int batch = batch0;  // doubles per round up to the cap
    while (true) {
      double bs = 0.0, br = 0.0;
      for (int i = 0; i < batch; ++i) {
        const double x = s.next(rng);
        bs += x;
        br += x;
      }
      slots[w] = {bs, br};
      sync.arrive_and_wait();  // all batches of this round ready
      if (w == 0) {
        for (int j = 0; j < workers && !done; ++j) {
          totals.stat += slots[j].stat;
          totals.raw += slots[j].raw;
          totals.stats += static_cast<std::uint64_t>(batch);
          totals.draws += static_cast<std::uint64_t>(batch);
          if (totals.stat >= threshold) done = true;
          if (totals.draws >= exec.sample_cap) {
            totals.capped = true;
            done = true;
          }
        }
      }
      sync.arrive_and_wait();  // merge visible everywhere
      if (done) return;
      if (batch < kBatchCap) batch *= 2;
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& th : pool) th.join();
  return totals;
}

LoopTotals run_stopping(BoundedStream& s, const StreamContext& ctx, std::uint64_t family,
                        const ExecPolicy& exec, double threshold) {
  if (exec.threads <= 1)
    return stopping_sequential(s, ctx.stream(family, 0), threshold, exec.sample_cap);
  return stopping_parallel(s, ctx, family, exec, threshold);
}

// Exactly `count` statistics, split across workers in contiguous chunks and
// merged in worker order.
template <bool kPairs>
LoopTotals run_fixed(BoundedStream& proto, const StreamContext& ctx, std::uint64_t family,
                     const ExecPolicy& exec, std::uint64_t count) {
  if (exec.threads <= 1 || count < 2 * static_cast<std::uint64_t>(exec.threads)) {
    LoopTotals t;
    RandomStream rng = ctx.stream(family, 0);
    for (std::uint64_t i = 0; i < count; ++i) one_draw<kPairs>(proto, rng, t);
    return t;
  }
  const int workers = exec.threads;
  std::vector<LoopTotals> partial(workers);
  std::vector<std::thread> pool;
  const std::uint64_t base = count / workers;
  const std::uint64_t extra = count % workers;
  auto work = [&](int w, BoundedStream* s) {
    RandomStream rng = ctx.stream(family, static_cast<std::uint64_t>(w));
    const std::uint64_t mine = base + (static_cast<std::uint64_t>(w) < extra ? 1 : 0);
    LoopTotals local;  // keep the hot accumulator off the shared vector
    for (std::uint64_t i = 0; i < mine; ++i) one_draw<kPairs>(*s, rng, local);
    partial[w] = local;
  };
  std::vector<std::unique_ptr<BoundedStream>> streams;
  streams.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) streams.push_back(proto.fork());
  for (int w = 1; w < workers; ++w) pool.emplace_back(work, w, streams[w - 1].get());
  work(0, &proto);
  for (auto& th : pool) th.join();

  LoopTotals t;
  for (const LoopTotals& p : partial) {
    t.stat += p.stat;
    t.raw += p.raw;
    t.stats += p.stats;
    t.draws += p.draws;
  }
  return t;
}

constexpr std::uint64_t kStep1Family = 0;
constexpr std::uint64_t kStep2Family = 1;
constexpr std::uint64_t kStep3Family = 2;

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kFastPathReturnedA: return "fast-path-lower-bound";
    case Termination::kBudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

double c_factor(double eps, double delta) {
  check_eps_delta(eps, delta);
  return (2.0 + 2.0 * eps / 3.0) * std::log(2.0 / delta) / (eps * eps);
}

double upper_tail_bound(double eps, double mu, std::uint64_t t, double a, double b) {
  return std::exp(-eps * eps * static_cast<double>(t) * mu /
                  ((2.0 + 2.0 * eps / 3.0) * (b - a)));
}

double lower_tail_bound(double eps, double mu, std::uint64_t t, double a, double b) {
  return std::exp(-eps * eps * static_cast<double>(t) * mu / (2.0 * (b - a)));
}

GsraThreshold gsra_threshold(double eps, double delta, double a, double b) {
  check_eps_delta(eps, delta);
  check_range(a, b);
  GsraThreshold out;
  if (b - a < eps * b) {
    out.fast_path = true;
    return out;
  }
  out.eps_prime =
      eps * (1.0 - eps * b / ((2.0 + 2.0 * eps / 3.0) * std::log(2.0 / delta) * (b - a)));
  out.upsilon = (1.0 + eps) * c_factor(out.eps_prime, delta) * (b - a);
  return out;
}

EstimationResult gsra(BoundedStream& stream, double eps, double delta,
                      const StreamContext& ctx, const ExecPolicy& exec) {
  const double a = stream.lower(), b = stream.upper();
  const GsraThreshold thr = gsra_threshold(eps, delta, a, b);
  if (thr.fast_path) return {a, 0, 0.0, Termination::kFastPathReturnedA};

  const LoopTotals t = run_stopping(stream, ctx, kStep1Family, exec, thr.upsilon);
  EstimationResult r;
  r.samples_used = t.draws;
  r.observed_sum = t.raw;
  if (t.capped) {
    r.estimate = t.stats > 0 ? t.stat / static_cast<double>(t.stats) : 0.0;
    r.termination = Termination::kBudgetExceeded;
    return r;
  }
  r.estimate = t.stat / static_cast<double>(t.stats);
  r.termination = Termination::kConverged;
  return r;
}

EstimationResult rsa(BoundedStream& stream, BoundedStream& paired, double eps,
                     double delta, const StreamContext& ctx, const ExecPolicy& exec,
                     const RsaOptions& opts) {
  check_eps_delta(eps, delta);
  const double a = stream.lower(), b = stream.upper();
  check_range(a, b);

  if (eps >= 0.25 || b - a < eps * b) return gsra(stream, eps, delta, ctx, exec);

  const double se = std::sqrt(eps);

  // Step 1: rough estimate at sqrt(eps), delta/3.
  EstimationResult rough = gsra(stream, se, delta / 3.0, ctx.sub(0), exec);
  EstimationResult r;
  r.samples_used = rough.samples_used;
  r.observed_sum = rough.observed_sum;
  if (rough.termination == Termination::kBudgetExceeded || !(rough.estimate > 0.0)) {
    r.termination = Termination::kBudgetExceeded;
    r.estimate = rough.estimate;
    return r;
  }
  const double mu1 = rough.estimate;

  // Step 2: variance probe over consecutive non-overlapping pairs of the
  // second stream.
  const GsraThreshold thr = gsra_threshold(eps, delta, a, b);
  const double upsilon2 = 2.0 * (1.0 + se) / (1.0 - se) *
                          (1.0 + std::log(1.5) / std::log(2.0 / delta)) * thr.upsilon;
  double n_sigma_f = std::ceil(upsilon2 * eps / mu1);
  if (opts.variance_budget_normalized) n_sigma_f = std::ceil(upsilon2 * eps / (mu1 * (b - a)));
  if (!(n_sigma_f >= 1.0) || n_sigma_f > static_cast<double>(exec.sample_cap)) {
    r.termination = Termination::kBudgetExceeded;
    return r;
  }
  const auto n_sigma = static_cast<std::uint64_t>(n_sigma_f);
  const LoopTotals var_t = run_fixed<true>(paired, ctx.sub(1), kStep2Family, exec, n_sigma);
  r.samples_used += var_t.draws;
  r.observed_sum += var_t.raw;
  const double sigma2 = var_t.stat / static_cast<double>(n_sigma);
  const double rho = std::max(sigma2, eps * mu1 * (b - a));

  // Step 3: final mean over T fresh values of the first stream.
  const double t_f = std::ceil(upsilon2 * rho / (mu1 * mu1 * (b - a)));
  if (!(t_f >= 1.0) || t_f > static_cast<double>(exec.sample_cap)) {
    r.termination = Termination::kBudgetExceeded;
    return r;
  }
  const auto t_final = static_cast<std::uint64_t>(t_f);
  const LoopTotals mean_t = run_fixed<false>(stream, ctx.sub(2), kStep3Family, exec, t_final);
  r.samples_used += mean_t.draws;
  r.observed_sum += mean_t.raw;
  r.estimate = mean_t.stat / static_cast<double>(t_final);
  r.termination = Termination::kConverged;
  return r;
}

EstimationResult fixed_budget_mean(BoundedStream& stream, std::uint64_t count,
                                   const StreamContext& ctx, const ExecPolicy& exec) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  const LoopTotals t = run_fixed<false>(stream, ctx, 0, exec, count);
  return {t.stat / static_cast<double>(count), t.draws, t.raw, Termination::kConverged};
}

}  // namespace oi
