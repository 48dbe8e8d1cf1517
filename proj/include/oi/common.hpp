#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace oi {

using NodeId = std::uint32_t;

// Malformed input data (CLI exit code 2).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Semantically invalid values for an operation (CLI exit code 2).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance exceeds a hard capacity guard (CLI exit code 3).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic pseudo-random stream, seeded from a (master seed, stream
/// index) pair.  Identical pairs emit identical sequences on every platform;
/// distinct indices give statistically independent streams, which is what the
/// per-worker sampling machinery relies on.  xoshiro256++ with splitmix64
/// state expansion.
class RandomStream {
 public:
  RandomStream() : RandomStream(0, 0) {}
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t next_u64();

  // Uniform real in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, bound); bound > 0.
  std::uint32_t uniform_below(std::uint32_t bound);

 private:
  std::uint64_t s_[4];
};

/// Names a block of RandomStream indices.  Components derive the streams they
/// need as stream(family, worker); nested components get their own blocks via
/// sub(i), which mixes the block id into the base so nested namespaces stay
/// disjoint at any depth.  Convention: fewer than 1024 workers per family and
/// fewer than 1024 families per context.
struct StreamContext {
  std::uint64_t master = 0;
  std::uint64_t base = 0;

  RandomStream stream(std::uint64_t family, std::uint64_t worker = 0) const {
    return RandomStream(master, base + family * 1024 + worker);
  }
  StreamContext sub(std::uint64_t block) const {
    std::uint64_t z = base + (block + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return StreamContext{master, z ^ (z >> 31)};
  }
};

/// Execution policy for sampling loops.  threads == 1 is the exact sequential
/// algorithm.  With threads > 1, workers generate batches of draws and an
/// aggregator merges partial (count, sum) in worker order, re-checking any
/// stopping condition after each merged batch.  Batches start at `batch` and
/// double per round (capped), so a stopping rule may overshoot its threshold
/// by at most threads * current-batch values; the overshoot only adds
/// samples and never biases the estimate.
struct ExecPolicy {
  int threads = 1;
  int batch = 256;
  std::uint64_t sample_cap = std::uint64_t{1} << 32;
};

/// Neumaier compensated accumulator.  Keeps the 1e-12 identity tolerances of
/// the enumeration oracle honest.
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace oi
