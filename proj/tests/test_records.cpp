#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oi/run_record.hpp"
#include "support.hpp"

namespace {

oi::RunRecord sample_record() {
  oi::RunRecord r;
  r.method = "siea";
  r.seed_set = "3;17;42";
  r.estimate = 1.1200000000000001;
  r.samples = 12345;
  r.observed_influence = 13830.25;
  r.wall_ms = 1.5;
  r.rng_seed = 7;
  r.threads = 2;
  r.eps = 0.01;
  r.delta = 0.01;
  return r;
}

}  // namespace

TEST_CASE("csv round trip") {
  auto r = sample_record();
  oi::attach_truth(r, 1.12);
  const std::string text = oi::csv_header() + "\n" + oi::to_csv_row(r) + "\n";
  const auto parsed = oi::parse_csv(text);
  REQUIRE(parsed.size() == 1);
  const auto& p = parsed[0];
  CHECK(p.method == r.method);
  CHECK(p.seed_set == r.seed_set);
  CHECK(p.estimate == r.estimate);  // 17 significant digits survive exactly
  CHECK(p.truth == r.truth);
  CHECK(p.rel_error_pct == r.rel_error_pct);
  CHECK(p.samples == r.samples);
  CHECK(p.observed_influence == r.observed_influence);
  CHECK(p.wall_ms == r.wall_ms);
  CHECK(p.rng_seed == r.rng_seed);
  CHECK(p.threads == r.threads);
  CHECK(p.eps == r.eps);
  CHECK(p.delta == r.delta);
}

TEST_CASE("csv and json encode the same fields") {
  auto r1 = sample_record();
  oi::attach_truth(r1, 1.12);
  auto r2 = sample_record();
  r2.method = "exact-outward";
  r2.truth.reset();

  const auto from_csv =
      oi::parse_csv(oi::csv_header() + "\n" + oi::to_csv_row(r1) + "\n" + oi::to_csv_row(r2) + "\n");
  const auto from_json = oi::parse_json(oi::to_json({r1, r2}));
  REQUIRE(from_csv.size() == 2);
  REQUIRE(from_json.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(from_csv[i].method == from_json[i].method);
    CHECK(from_csv[i].seed_set == from_json[i].seed_set);
    CHECK(from_csv[i].estimate == from_json[i].estimate);
    CHECK(from_csv[i].truth == from_json[i].truth);
    CHECK(from_csv[i].rel_error_pct == from_json[i].rel_error_pct);
    CHECK(from_csv[i].samples == from_json[i].samples);
    CHECK(from_csv[i].observed_influence == from_json[i].observed_influence);
    CHECK(from_csv[i].wall_ms == from_json[i].wall_ms);
    CHECK(from_csv[i].rng_seed == from_json[i].rng_seed);
    CHECK(from_csv[i].threads == from_json[i].threads);
  }
}

TEST_CASE("relative error only appears with positive truth") {
  auto r = sample_record();
  oi::attach_truth(r, 0.0);
  CHECK(r.truth.has_value());
  CHECK_FALSE(r.rel_error_pct.has_value());  // exact-zero case, no percentage
  const auto parsed = oi::parse_csv(oi::csv_header() + "\n" + oi::to_csv_row(r) + "\n");
  CHECK_FALSE(parsed[0].rel_error_pct.has_value());
}

TEST_CASE("maximization fields ride along when asked") {
  auto r = sample_record();
  r.method = "out-ssa";
  r.bound = 0.75;
  r.iterations = 3;
  const std::string text =
      oi::csv_header(true) + "\n" + oi::to_csv_row(r, true) + "\n";
  const auto parsed = oi::parse_csv(text);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].bound == r.bound);
  CHECK(parsed[0].iterations == r.iterations);
}
