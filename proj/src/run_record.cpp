#include "oi/run_record.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "oi/common.hpp"
#include "oi/estimators.hpp"

namespace oi {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header(bool with_im_fields) {
  std::string h =
      "method,seed_set,estimate,truth,rel_error_pct,samples,observed_influence,"
      "wall_ms,rng_seed,threads,eps,delta";
  if (with_im_fields) h += ",bound,iterations";
  return h;
}

std::string to_csv_row(const RunRecord& r, bool with_im_fields) {
  std::ostringstream out;
  out << r.method << ',' << r.seed_set << ',' << format_double(r.estimate) << ',';
  if (r.truth) out << format_double(*r.truth);
  out << ',';
  if (r.rel_error_pct) out << format_double(*r.rel_error_pct);
  out << ',' << r.samples << ',' << format_double(r.observed_influence) << ','
      << format_double(r.wall_ms) << ',' << r.rng_seed << ',' << r.threads << ','
      << format_double(r.eps) << ',' << format_double(r.delta);
  if (with_im_fields) {
    out << ',';
    if (r.bound) out << format_double(*r.bound);
    out << ',';
    if (r.iterations) out << *r.iterations;
  }
  return out.str();
}

std::string to_json(const std::vector<RunRecord>& rs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RunRecord& r : rs) {
    nlohmann::json o;
    o["method"] = r.method;
    o["seed_set"] = r.seed_set;
    o["estimate"] = r.estimate;
    o["truth"] = r.truth ? nlohmann::json(*r.truth) : nlohmann::json(nullptr);
    o["rel_error_pct"] =
        r.rel_error_pct ? nlohmann::json(*r.rel_error_pct) : nlohmann::json(nullptr);
    o["samples"] = r.samples;
    o["observed_influence"] = r.observed_influence;
    o["wall_ms"] = r.wall_ms;
    o["rng_seed"] = r.rng_seed;
    o["threads"] = r.threads;
    o["eps"] = r.eps;
    o["delta"] = r.delta;
    if (r.bound) o["bound"] = *r.bound;
    if (r.iterations) o["iterations"] = *r.iterations;
    arr.push_back(std::move(o));
  }
  return arr.dump(2);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<RunRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty csv");
  const bool with_im = line.find(",bound,") != std::string::npos ||
                       line.rfind(",bound") != std::string::npos;
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() < 12) throw ParseError("short csv row");
    RunRecord r;
    r.method = f[0];
    r.seed_set = f[1];
    r.estimate = std::stod(f[2]);
    if (!f[3].empty()) r.truth = std::stod(f[3]);
    if (!f[4].empty()) r.rel_error_pct = std::stod(f[4]);
    r.samples = std::stoull(f[5]);
    r.observed_influence = std::stod(f[6]);
    r.wall_ms = std::stod(f[7]);
    r.rng_seed = std::stoull(f[8]);
    r.threads = std::stoi(f[9]);
    r.eps = std::stod(f[10]);
    r.delta = std::stod(f[11]);
    if (with_im && f.size() >= 14) {
      if (!f[12].empty()) r.bound = std::stod(f[12]);
      if (!f[13].empty()) r.iterations = std::stoi(f[13]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunRecord> parse_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<RunRecord> out;
  for (const auto& o : arr) {
    RunRecord r;
    r.method = o.at("method").get<std::string>();
    r.seed_set = o.at("seed_set").get<std::string>();
    r.estimate = o.at("estimate").get<double>();
    if (!o.at("truth").is_null()) r.truth = o.at("truth").get<double>();
    if (!o.at("rel_error_pct").is_null())
      r.rel_error_pct = o.at("rel_error_pct").get<double>();
    r.samples = o.at("samples").get<std::uint64_t>();
    r.observed_influence = o.at("observed_influence").get<double>();
    r.wall_ms = o.at("wall_ms").get<double>();
    r.rng_seed = o.at("rng_seed").get<std::uint64_t>();
    r.threads = o.at("threads").get<int>();
    r.eps = o.at("eps").get<double>();
    r.delta = o.at("delta").get<double>();
    if (o.contains("bound")) r.bound = o.at("bound").get<double>();
    if (o.contains("iterations")) r.iterations = o.at("iterations").get<int>();
    out.push_back(std::move(r));
  }
  return out;
}

void attach_truth(RunRecord& r, double truth) {
  r.truth = truth;
  if (truth > 0.0) r.rel_error_pct = relative_error_pct(r.estimate, truth);
}

}  // namespace oi
