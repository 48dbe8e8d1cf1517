#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oi {

/// One benchmark/estimation record.  rel_error_pct is present iff truth is
/// present and positive; zero-truth cases go through the exact_zero flag so a
/// sink seed never divides by zero.
struct RunRecord {
  std::string method;
  std::string seed_set;  // external labels joined with ';'
  double estimate = 0.0;
  std::optional<double> truth;
  std::optional<double> rel_error_pct;
  std::uint64_t samples = 0;
  double observed_influence = 0.0;
  double wall_ms = 0.0;
  std::uint64_t rng_seed = 0;
  int threads = 1;
  double eps = 0.0;
  double delta = 0.0;
  // Only meaningful for maximization records.
  std::optional<double> bound;
  std::optional<int> iterations;
};

std::string csv_header(bool with_im_fields = false);
std::string to_csv_row(const RunRecord& r, bool with_im_fields = false);
std::string to_json(const std::vector<RunRecord>& rs);

std::vector<RunRecord> parse_csv(const std::string& text);
std::vector<RunRecord> parse_json(const std::string& text);

/// Fills truth-dependent fields: positive truth yields a relative error,
/// otherwise the truth is recorded without one.
void attach_truth(RunRecord& r, double truth);

std::string format_double(double v);  // shortest 17-significant-digit form

}  // namespace oi
