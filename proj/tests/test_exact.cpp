#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oi/exact.hpp"
#include "support.hpp"

using oi::NodeId;

TEST_CASE("example-graph influence and outward values") {
  const auto g = testsup::make_g1();
  CHECK(oi::exact_influence(g, {0}) == doctest::Approx(1.12).epsilon(1e-12));
  CHECK(oi::exact_influence(g, {1}) == doctest::Approx(1.20).epsilon(1e-12));
  CHECK(oi::exact_influence(g, {2}) == doctest::Approx(1.00).epsilon(1e-12));
  CHECK(oi::exact_outward(g, {0}) == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(oi::exact_outward(g, {1}) == doctest::Approx(0.20).epsilon(1e-12));
  CHECK(oi::exact_outward(g, {2}) == doctest::Approx(0.00).scale(1.0));
  CHECK(oi::exact_influence(g, {0, 1, 2, 3}) == doctest::Approx(4.0));
}

TEST_CASE("outward influence is non-monotone in the seed set") {
  const auto g = testsup::make_g1();
  CHECK(oi::exact_outward(g, {0}) == doctest::Approx(0.12));
  CHECK(oi::exact_outward(g, {0, 2}) == doctest::Approx(0.11));
  CHECK(oi::exact_outward(g, {0, 1}) == doctest::Approx(0.20));
}

TEST_CASE("capacity and precondition guards") {
  const auto g = testsup::make_g1();
  CHECK_THROWS_AS(oi::exact_influence(g, {}), oi::DomainError);
  // 21 edges: a star with 21 leaves
  std::vector<oi::ProbabilisticGraph::Edge> edges;
  for (NodeId v = 1; v <= 21; ++v) edges.emplace_back(0, v, 0.5);
  const auto big = oi::ProbabilisticGraph::from_edges(22, std::move(edges));
  CHECK_THROWS_AS(oi::exact_influence(big, {0}), oi::CapacityError);
  CHECK_THROWS_AS(oi::brute_force_opt(big, 1), oi::CapacityError);
}

TEST_CASE("cascade size distributions on the example graph") {
  const auto g = testsup::make_g1();
  const auto rep = oi::exact_distributions(g, {0});
  CHECK(rep.beta0 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rep.cascade_size_dist.at(1) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(rep.cascade_size_dist.at(2) == doctest::Approx(0.081).epsilon(1e-12));
  CHECK(rep.cascade_size_dist.at(3) == doctest::Approx(0.018).epsilon(1e-12));
  CHECK(rep.cascade_size_dist.at(4) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(rep.outer_size_dist.at(1) == doctest::Approx(0.81).epsilon(1e-12));
  CHECK(rep.outer_size_dist.at(2) == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(rep.outer_size_dist.at(3) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(rep.influence == doctest::Approx(1.12).epsilon(1e-12));
  CHECK(rep.outward == rep.influence - 1.0);

  SUBCASE("full seed set") {
    const auto full = oi::exact_distributions(g, {0, 1, 2, 3});
    CHECK(full.beta0 == 0.0);
    CHECK(full.cascade_size_dist.at(4) == doctest::Approx(1.0));
    CHECK(full.outer_size_dist.empty());
  }
  SUBCASE("single isolated node") {
    const auto iso = oi::exact_distributions(testsup::make_edgeless(1), {0});
    CHECK(iso.beta0 == 0.0);
    CHECK(iso.cascade_size_dist.at(1) == doctest::Approx(1.0));
  }
}

TEST_CASE("distribution probabilities sum to one") {
  oi::RandomStream rng(3, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = testsup::random_small_graph(rng, 7, 12);
    const auto seeds = testsup::random_seed_set(rng, g.node_count(),
                                                1 + rng.uniform_below(g.node_count()));
    const auto rep = oi::exact_distributions(g, seeds);
    double total = 0.0;
    for (const auto& [s, p] : rep.cascade_size_dist) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    if (rep.beta0 > 0) {
      double outer = 0.0;
      for (const auto& [y, p] : rep.outer_size_dist) outer += p;
      CHECK(outer == doctest::Approx(1.0).epsilon(1e-11));
      // beta0 from the product formula must match 1 - Pr[size = |S|]
      const auto it = rep.cascade_size_dist.find(static_cast<int>(seeds.size()));
      const double p_trivial = it == rep.cascade_size_dist.end() ? 0.0 : it->second;
      CHECK(rep.beta0 == doctest::Approx(1.0 - p_trivial).epsilon(1e-11));
    }
  }
}

TEST_CASE("outer-size scaling identity") {
  // E[Y] * beta0 == outward influence, exactly, on every small random graph
  oi::RandomStream rng(5, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testsup::random_small_graph(rng, 8, 12);
    const auto seeds = testsup::random_seed_set(
        rng, g.node_count(), 1 + rng.uniform_below(g.node_count() - 1));
    const auto rep = oi::exact_distributions(g, seeds);
    if (rep.beta0 == 0.0) {
      CHECK(rep.outward == doctest::Approx(0.0).scale(1.0));
      continue;
    }
    double ey = 0.0;
    for (const auto& [y, p] : rep.outer_size_dist) ey += y * p;
    CHECK(ey * rep.beta0 == doctest::Approx(rep.outward).epsilon(1e-12));
  }
}

TEST_CASE("variance transfer identity") {
  // Var[Z] = beta0 Var[M] - (1 - beta0) outward^2 with Z = Y beta0 + |S|
  const auto check_identity = [](const oi::ProbabilisticGraph& g,
                                 const std::vector<NodeId>& seeds) {
    const auto rep = oi::exact_distributions(g, seeds);
    if (rep.beta0 == 0.0) return;
    double em = 0, em2 = 0;
    for (const auto& [m, p] : rep.cascade_size_dist) {
      em += m * p;
      em2 += static_cast<double>(m) * m * p;
    }
    const double var_m = em2 - em * em;
    double ey = 0, ey2 = 0;
    for (const auto& [y, p] : rep.outer_size_dist) {
      ey += y * p;
      ey2 += static_cast<double>(y) * y * p;
    }
    const double var_z = rep.beta0 * rep.beta0 * (ey2 - ey * ey);
    const double rhs = rep.beta0 * var_m - (1.0 - rep.beta0) * rep.outward * rep.outward;
    CHECK(var_z == doctest::Approx(rhs).epsilon(1e-10));
  };

  SUBCASE("example graph frozen values") {
    const auto g = testsup::make_g1();
    const auto rep = oi::exact_distributions(g, {0});
    double em = 0, em2 = 0;
    for (const auto& [m, p] : rep.cascade_size_dist) {
      em += m * p;
      em2 += static_cast<double>(m) * m * p;
    }
    CHECK(em2 - em * em == doctest::Approx(0.1476).epsilon(1e-12));  // Var[M]
    double ey = 0, ey2 = 0;
    for (const auto& [y, p] : rep.outer_size_dist) {
      ey += y * p;
      ey2 += static_cast<double>(y) * y * p;
    }
    const double var_z = 0.01 * (ey2 - ey * ey);
    CHECK(var_z == doctest::Approx(0.0018).epsilon(1e-12));  // Var[Z]
    check_identity(g, {0});
  }
  SUBCASE("random graphs") {
    oi::RandomStream rng(9, 0);
    for (int trial = 0; trial < 50; ++trial) {
      const auto g = testsup::random_small_graph(rng, 8, 12);
      const auto seeds = testsup::random_seed_set(
          rng, g.node_count(), 1 + rng.uniform_below(g.node_count() - 1));
      check_identity(g, seeds);
    }
  }
}

TEST_CASE("reverse-sample hit probabilities") {
  const auto g = testsup::make_g1();
  SUBCASE("single seed at the source") {
    const auto hp = oi::exact_rois_hit(g, {0});
    CHECK(hp.hit == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(hp.hit_outside == doctest::Approx(0.4).epsilon(1e-12));  // gamma_0 = 0
  }
  SUBCASE("full seed set") {
    const auto hp = oi::exact_rois_hit(g, {0, 1, 2, 3});
    CHECK(hp.hit == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hp.hit_outside == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("zero-edge graph rejected") {
    CHECK_THROWS_AS(oi::exact_rois_hit(testsup::make_edgeless(2), {0}), oi::DomainError);
  }
}

TEST_CASE("reverse-sample identities on random graphs") {
  // influence = hit * Gamma + sum (1 - gamma_v), outward = hit_outside * Gamma
  oi::RandomStream rng(13, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testsup::random_small_graph(rng, 8, 12);
    const auto seeds = testsup::random_seed_set(
        rng, g.node_count(), 1 + rng.uniform_below(g.node_count()));
    double big_gamma = 0.0, seed_complement = 0.0;
    std::vector<double> gamma(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
      double miss = 1.0;
      for (const auto& a : g.in_neighbors(v)) miss *= 1.0 - a.weight;
      gamma[v] = 1.0 - miss;
      big_gamma += gamma[v];
    }
    for (NodeId s : seeds) seed_complement += 1.0 - gamma[s];
    const auto hp = oi::exact_rois_hit(g, seeds);
    CHECK(hp.hit * big_gamma + seed_complement ==
          doctest::Approx(oi::exact_influence(g, seeds)).epsilon(1e-11));
    CHECK(hp.hit_outside * big_gamma ==
          doctest::Approx(oi::exact_outward(g, seeds)).epsilon(1e-10));
  }
}

TEST_CASE("submodularity of outward influence and influence spread") {
  oi::RandomStream rng(17, 0);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const auto g = testsup::random_small_graph(rng, 6, 10);
    const NodeId n = g.node_count();
    if (n < 3) continue;
    for (NodeId x = 0; x < n; ++x) {
      // random nested pair S subset T not containing x
      std::vector<NodeId> others;
      for (NodeId v = 0; v < n; ++v)
        if (v != x) others.push_back(v);
      std::vector<NodeId> t_set;
      for (NodeId v : others)
        if (rng.bernoulli(0.6)) t_set.push_back(v);
      if (t_set.empty()) t_set.push_back(others[0]);
      std::vector<NodeId> s_set;
      for (NodeId v : t_set)
        if (rng.bernoulli(0.5)) s_set.push_back(v);
      if (s_set.empty()) s_set.push_back(t_set[0]);

      auto with = [&](const std::vector<NodeId>& base) {
        auto c = base;
        c.push_back(x);
        return c;
      };
      const double d_small = oi::exact_outward(g, with(s_set)) - oi::exact_outward(g, s_set);
      const double d_large = oi::exact_outward(g, with(t_set)) - oi::exact_outward(g, t_set);
      CHECK(d_small >= d_large - 1e-12);
      const double i_small =
          oi::exact_influence(g, with(s_set)) - oi::exact_influence(g, s_set);
      const double i_large =
          oi::exact_influence(g, with(t_set)) - oi::exact_influence(g, t_set);
      CHECK(i_small >= i_large - 1e-12);
      CHECK(oi::exact_influence(g, t_set) >=
            oi::exact_influence(g, s_set) - 1e-12);  // monotone
      ++checked;
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("brute-force optimum") {
  const auto g = testsup::make_g1();
  SUBCASE("k = 1 picks the middle node") {
    const auto [set, val] = oi::brute_force_opt(g, 1);
    CHECK(set == std::vector<NodeId>{1});
    CHECK(val == doctest::Approx(1.20).epsilon(1e-12));
  }
  SUBCASE("k = n is everything") {
    const auto [set, val] = oi::brute_force_opt(g, 4);
    CHECK(set.size() == 4);
    CHECK(val == doctest::Approx(4.0));
  }
  SUBCASE("ties break lexicographically") {
    const auto [set, val] = oi::brute_force_opt(testsup::make_edgeless(3), 2);
    CHECK(set == std::vector<NodeId>{0, 1});
    CHECK(val == doctest::Approx(2.0));
  }
}
