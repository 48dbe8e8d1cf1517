#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "oi/common.hpp"

namespace oi {

/// c(eps, delta) = (2 + 2eps/3) ln(2/delta) / eps^2
double c_factor(double eps, double delta);

/// Chernoff-like tail bounds for same-mean variables in [a, b]:
/// Pr[sum >= (1+eps) mu T] <= upper_tail_bound, Pr[sum <= (1-eps) mu T] <= lower_tail_bound.
double upper_tail_bound(double eps, double mu, std::uint64_t t, double a, double b);
double lower_tail_bound(double eps, double mu, std::uint64_t t, double a, double b);

struct GsraThreshold {
  double eps_prime = 0.0;
  double upsilon = 0.0;
  bool fast_path = false;  // b - a < eps * b: the lower bound is already an answer
};
GsraThreshold gsra_threshold(double eps, double delta, double a, double b);

enum class Termination { kConverged, kFastPathReturnedA, kBudgetExceeded };
const char* to_string(Termination t);

struct EstimationResult {
  double estimate = 0.0;
  std::uint64_t samples_used = 0;
  double observed_sum = 0.0;  // exact sum of every raw value drawn
  Termination termination = Termination::kConverged;
};

/// A source of random values in [lower, upper] sharing one (unknown) mean.
/// next() may use per-instance scratch; fork() clones the stream with fresh
/// scratch so each worker thread owns its own copy.
class BoundedStream {
 public:
  virtual ~BoundedStream() = default;
  virtual double lower() const = 0;
  virtual double upper() const = 0;
  virtual double next(RandomStream& rng) = 0;
  virtual std::unique_ptr<BoundedStream> fork() const = 0;
};

/// Stateless stream from a plain function; handy for synthetic distributions.
class FnStream final : public BoundedStream {
 public:
  FnStream(double lo, double hi, std::function<double(RandomStream&)> fn)
      : lo_(lo), hi_(hi), fn_(std::move(fn)) {}
  double lower() const override { return lo_; }
  double upper() const override { return hi_; }
  double next(RandomStream& rng) override { return fn_(rng); }
  std::unique_ptr<BoundedStream> fork() const override {
    return std::make_unique<FnStream>(lo_, hi_, fn_);
  }

 private:
  double lo_, hi_;
  std::function<double(RandomStream&)> fn_;
};

struct RsaOptions {
  // Divide the variance-stage budget N_sigma by (b - a).  The published
  // listing omits the normalization; off by default.
  bool variance_budget_normalized = false;
};

/// Generalized stopping rule: draws until the running sum reaches Upsilon and
/// returns sum/count.  (eps, delta)-approximate for any same-mean stream in
/// [a, b]; returns `a` immediately when b - a < eps * b.  A stream with mean
/// ~0 terminates via exec.sample_cap with Termination::kBudgetExceeded.
EstimationResult gsra(BoundedStream& stream, double eps, double delta,
                      const StreamContext& ctx, const ExecPolicy& exec = {});

/// Variance-adaptive estimator: rough GSRA estimate at sqrt(eps), pairwise
/// variance probe on the second stream, then a fixed mean over T fresh values
/// of the first stream.  Delegates to gsra when eps >= 1/4.
EstimationResult rsa(BoundedStream& stream, BoundedStream& paired, double eps,
                     double delta, const StreamContext& ctx, const ExecPolicy& exec = {},
                     const RsaOptions& opts = {});

/// Plain Monte-Carlo baseline: arithmetic mean of `count` draws.
EstimationResult fixed_budget_mean(BoundedStream& stream, std::uint64_t count,
                                   const StreamContext& ctx, const ExecPolicy& exec = {});

}  // namespace oi
