#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "oi/exact.hpp"
#include "oi/sampler.hpp"
#include "support.hpp"

using oi::NodeId;

TEST_CASE("seed neighborhood of the example graph") {
  const auto g = testsup::make_g1();
  const auto nb = oi::build_neighborhood(g, {0});
  REQUIRE(nb.neighbors == std::vector<NodeId>{1});
  CHECK(nb.direct_prob[0] == doctest::Approx(0.1).epsilon(1e-15));
  REQUIRE(nb.first_prob.size() == 2);
  CHECK(nb.first_prob[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(nb.first_prob[1] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(nb.beta0 == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("neighborhood combines parallel seed edges") {
  // two seeds each hitting v with weight .5: P = 1 - .25
  const auto g = oi::ProbabilisticGraph::from_edges(3, {{0, 2, 0.5}, {1, 2, 0.5}});
  const auto nb = oi::build_neighborhood(g, {0, 1});
  REQUIRE(nb.neighbors == std::vector<NodeId>{2});
  CHECK(nb.direct_prob[0] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("neighborhood of the full seed set is empty") {
  const auto g = testsup::make_g1();
  const auto nb = oi::build_neighborhood(g, {0, 1, 2, 3});
  CHECK(nb.neighbors.empty());
  CHECK(nb.beta0 == 0.0);
  oi::IcSampler sampler(g);
  oi::RandomStream rng(1, 0);
  CHECK_THROWS_AS((void)sampler.iicp_outer_size(nb, rng), oi::DomainError);
}

TEST_CASE("first-probabilities sum to one") {
  oi::RandomStream rng(23, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = testsup::random_small_graph(rng, 8, 12);
    const auto seeds = testsup::random_seed_set(
        rng, g.node_count(), 1 + rng.uniform_below(g.node_count()));
    const auto nb = oi::build_neighborhood(g, seeds);
    double total = 0.0;
    for (double p : nb.first_prob) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nb.beta0 == doctest::Approx(1.0 - nb.first_prob.back()).epsilon(1e-12));
    for (std::size_t i = 1; i < nb.neighbors.size(); ++i)
      CHECK(nb.neighbors[i] > nb.neighbors[i - 1]);
  }
}

TEST_CASE("importance polling matches the exact conditional distribution") {
  const auto g = testsup::make_g1();
  const auto nb = oi::build_neighborhood(g, {0});
  oi::IcSampler sampler(g);
  oi::RandomStream rng(101, 5);
  const int runs = 200000;
  std::map<int, std::uint64_t> counts;
  for (int i = 0; i < runs; ++i) ++counts[sampler.iicp_outer_size(nb, rng)];
  const auto rep = oi::exact_distributions(g, {0});
  CHECK(testsup::tv_distance(rep.outer_size_dist, counts, runs) < 0.01);
}

TEST_CASE("importance polling is unbiased after scaling") {
  oi::RandomStream seed_rng(31, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const auto g = testsup::random_small_graph(seed_rng, 7, 12);
    const auto seeds = testsup::random_seed_set(
        seed_rng, g.node_count(), 1 + seed_rng.uniform_below(g.node_count() - 1));
    const auto nb = oi::build_neighborhood(g, seeds);
    const double outward = oi::exact_outward(g, seeds);
    if (nb.beta0 == 0.0) {
      CHECK(outward == doctest::Approx(0.0).scale(1.0));
      continue;
    }
    oi::IcSampler sampler(g);
    oi::RandomStream rng(77, static_cast<std::uint64_t>(trial));
    const int runs = 200000;
    double sum = 0, sum2 = 0;
    int lo = g.node_count(), hi = 0;
    for (int i = 0; i < runs; ++i) {
      const int y = sampler.iicp_outer_size(nb, rng);
      sum += y;
      sum2 += static_cast<double>(y) * y;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    CHECK(lo >= 1);
    CHECK(hi <= static_cast<int>(g.node_count() - seeds.size()));
    const double mean = sum / runs;
    const double sd = std::sqrt(std::max(0.0, sum2 / runs - mean * mean));
    CHECK(std::abs(mean * nb.beta0 - outward) <=
          3.0 * sd / std::sqrt(static_cast<double>(runs)) * nb.beta0 + 1e-9);
  }
}

TEST_CASE("forced stage-1 activation") {
  // single neighbor, no onward edges: Y is always 1
  const auto g = oi::ProbabilisticGraph::from_edges(2, {{0, 1, 0.05}});
  const auto nb = oi::build_neighborhood(g, {0});
  oi::IcSampler sampler(g);
  oi::RandomStream rng(2, 0);
  for (int i = 0; i < 1000; ++i) CHECK(sampler.iicp_outer_size(nb, rng) == 1);
}

TEST_CASE("forward polling matches the exact cascade distribution") {
  const auto g = testsup::make_g1();
  oi::IcSampler sampler(g);
  oi::RandomStream rng(303, 0);
  const int runs = 200000;
  std::map<int, std::uint64_t> counts;
  double sum = 0;
  for (int i = 0; i < runs; ++i) {
    const int m = sampler.forward_cascade_size({0}, rng);
    ++counts[m];
    sum += m;
  }
  CHECK(sum / runs == doctest::Approx(1.12).epsilon(0.01));
  const auto rep = oi::exact_distributions(g, {0});
  CHECK(testsup::tv_distance(rep.cascade_size_dist, counts, runs) < 0.01);

  SUBCASE("sink and full set are deterministic") {
    for (int i = 0; i < 100; ++i) {
      CHECK(sampler.forward_cascade_size({2}, rng) == 1);
      CHECK(sampler.forward_cascade_size({0, 1, 2, 3}, rng) == 4);
    }
  }
}

TEST_CASE("sampling is deterministic per stream") {
  const auto g = testsup::make_g1();
  const auto nb = oi::build_neighborhood(g, {0});
  auto run = [&](std::uint64_t seed, std::uint64_t index) {
    oi::IcSampler sampler(g);
    oi::RandomStream rng(seed, index);
    std::vector<int> ys;
    for (int i = 0; i < 200; ++i) ys.push_back(sampler.iicp_outer_size(nb, rng));
    return ys;
  };
  CHECK(run(5, 1) == run(5, 1));
  CHECK(run(5, 1) != run(5, 2));
  CHECK(run(5, 1) != run(6, 1));
}

TEST_CASE("linear threshold sampler") {
  SUBCASE("weight-sum validation names the node") {
    const auto bad = oi::ProbabilisticGraph::from_edges(3, {{0, 2, 0.7}, {1, 2, 0.7}});
    try {
      oi::LtSampler::validate_weights(bad);
      FAIL("expected DomainError");
    } catch (const oi::DomainError& e) {
      CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
  }
  SUBCASE("weighted-cascade graphs always select one in-edge") {
    // on a WC two-cycle the cascade from one node always covers both
    const auto g = oi::ProbabilisticGraph::from_edges(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    oi::LtSampler::validate_weights(g);
    oi::LtSampler sampler(g);
    oi::RandomStream rng(4, 0);
    for (int i = 0; i < 200; ++i) CHECK(sampler.forward_cascade_size({0}, rng) == 2);
  }
  SUBCASE("matches exhaustive enumeration of per-node choices") {
    oi::RandomStream seed_rng(41, 0);
    for (int trial = 0; trial < 6; ++trial) {
      auto g = oi::assign_wc_weights(testsup::random_small_graph(seed_rng, 6, 9));
      oi::LtSampler::validate_weights(g);
      const auto seeds = testsup::random_seed_set(
          seed_rng, g.node_count(), 1 + seed_rng.uniform_below(g.node_count() - 1));
      const auto exact = testsup::lt_exact(g, seeds);
      oi::LtSampler sampler(g);
      oi::RandomStream rng(90, static_cast<std::uint64_t>(trial));
      const int runs = 200000;
      std::map<int, std::uint64_t> counts;
      double sum = 0;
      for (int i = 0; i < runs; ++i) {
        const int m = sampler.forward_cascade_size(seeds, rng);
        ++counts[m];
        sum += m;
      }
      CHECK(sum / runs == doctest::Approx(exact.influence).epsilon(0.02));
      CHECK(testsup::tv_distance(exact.size_dist, counts, runs) < 0.01);
    }
  }
  SUBCASE("full seed set") {
    const auto g = testsup::make_g1();
    oi::LtSampler sampler(g);
    oi::RandomStream rng(1, 0);
    CHECK(sampler.forward_cascade_size({0, 1, 2, 3}, rng) == 4);
  }
}
