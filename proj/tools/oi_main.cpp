// Command-line front end: estimate / exact / oracle / im / bench.
// Exit codes: 0 ok, 1 usage, 2 data, 3 capacity.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oi/estimators.hpp"
#include "oi/exact.hpp"
#include "oi/graph.hpp"
#include "oi/im.hpp"
#include "oi/rois.hpp"
#include "oi/run_record.hpp"

namespace {

using Clock = std::chrono::steady_clock;
using oi::NodeId;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct GraphOpts {
  std::string path;
  std::string weights = "wc";
};

struct SeedOpts {
  std::string seeds;      // explicit "a,b,c"
  NodeId seed_size = 0;   // random sets of this size...
  std::uint64_t num_sets = 0;  // ...this many of them
};

struct OutputOpts {
  std::string out = "-";
  std::string format = "csv";
  bool timing = true;
};

oi::WeightingModel parse_weights(const std::string& spec) {
  if (spec == "wc") return oi::WeightingModel::weighted_cascade();
  if (spec == "file") return oi::WeightingModel::from_file();
  if (spec.rfind("const=", 0) == 0)
    return oi::WeightingModel::constant(std::stod(spec.substr(6)));
  throw CLI::ValidationError("--weights", "expected wc, const=P or file");
}

oi::ProbabilisticGraph load_graph(const GraphOpts& o) {
  std::ifstream in(o.path);
  if (!in) throw oi::ParseError("cannot open graph file " + o.path);
  return oi::load_edge_list(in, parse_weights(o.weights));
}

std::vector<std::vector<NodeId>> resolve_seed_sets(const oi::ProbabilisticGraph& g,
                                                   const SeedOpts& o,
                                                   const oi::StreamContext& root) {
  const bool explicit_set = !o.seeds.empty();
  const bool random_sets = o.num_sets > 0 || o.seed_size > 0;
  if (explicit_set == random_sets)
    throw CLI::ValidationError("seeds",
                               "give exactly one of --seeds or --seed-size/--num-sets");
  std::vector<std::vector<NodeId>> sets;
  if (explicit_set) {
    std::vector<NodeId> s;
    std::stringstream ss(o.seeds);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      s.push_back(g.id_of_label(std::stoll(tok)));
    }
    if (s.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
    sets.push_back(std::move(s));
    return sets;
  }
  if (o.seed_size == 0 || o.num_sets == 0)
    throw CLI::ValidationError("seeds", "--seed-size and --num-sets must both be positive");
  if (o.seed_size > g.node_count())
    throw oi::DomainError("seed size exceeds node count");
  // uniform sets without replacement (partial Fisher-Yates per set)
  oi::RandomStream rng = root.stream(999, 0);
  std::vector<NodeId> ids(g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) ids[i] = i;
  for (std::uint64_t s = 0; s < o.num_sets; ++s) {
    for (NodeId i = 0; i < o.seed_size; ++i) {
      const auto j = i + rng.uniform_below(static_cast<std::uint32_t>(ids.size() - i));
      std::swap(ids[i], ids[j]);
    }
    std::vector<NodeId> set(ids.begin(), ids.begin() + o.seed_size);
    std::sort(set.begin(), set.end());
    sets.push_back(std::move(set));
  }
  return sets;
}

std::string label_string(const oi::ProbabilisticGraph& g, const std::vector<NodeId>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(g.label_of(s[i]));
  }
  return out;
}

class RecordSink {
 public:
  RecordSink(const OutputOpts& o, bool with_im_fields)
      : opts_(o), with_im_(with_im_fields) {
    if (o.out != "-") {
      file_.open(o.out);
      if (!file_) throw oi::ParseError("cannot open output file " + o.out);
    }
    if (o.format == "csv") stream() << oi::csv_header(with_im_) << '\n';
  }
  void add(oi::RunRecord r) {
    if (!opts_.timing) r.wall_ms = 0.0;
    if (opts_.format == "csv") stream() << oi::to_csv_row(r, with_im_) << '\n';
    records_.push_back(std::move(r));
  }
  ~RecordSink() {
    if (opts_.format == "json") stream() << oi::to_json(records_) << '\n';
  }

 private:
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  OutputOpts opts_;
  bool with_im_;
  std::ofstream file_;
  std::vector<oi::RunRecord> records_;
};

struct MethodSpec {
  enum class Kind { kSoiea, kSiea, kSieaLt, kMc, kMcOut } kind;
  std::uint64_t mc_samples = 0;
  std::string label;
};

MethodSpec parse_method(const std::string& m) {
  if (m == "soiea") return {MethodSpec::Kind::kSoiea, 0, m};
  if (m == "siea") return {MethodSpec::Kind::kSiea, 0, m};
  if (m == "siea-lt") return {MethodSpec::Kind::kSieaLt, 0, m};
  if (m.rfind("mc=", 0) == 0) {
    const auto t = std::stoull(m.substr(3));
    if (t == 0) throw CLI::ValidationError("--method", "mc budget must be positive");
    return {MethodSpec::Kind::kMc, t, m};
  }
  if (m.rfind("mc-out=", 0) == 0) {
    const auto t = std::stoull(m.substr(7));
    if (t == 0) throw CLI::ValidationError("--method", "mc budget must be positive");
    return {MethodSpec::Kind::kMcOut, t, m};
  }
  throw CLI::ValidationError("--method", "unknown method " + m);
}

oi::EstimationResult run_method(const oi::ProbabilisticGraph& g, const MethodSpec& m,
                                const std::vector<NodeId>& seeds, double eps, double delta,
                                const oi::StreamContext& ctx, const oi::ExecPolicy& exec,
                                const oi::RsaOptions& opts = {}) {
  switch (m.kind) {
    case MethodSpec::Kind::kSoiea: return oi::soiea(g, seeds, eps, delta, ctx, exec, opts);
    case MethodSpec::Kind::kSiea: return oi::siea(g, seeds, eps, delta, ctx, exec, opts);
    case MethodSpec::Kind::kSieaLt: return oi::siea_lt(g, seeds, eps, delta, ctx, exec, opts);
    case MethodSpec::Kind::kMc: return oi::mc_fixed_influence(g, seeds, m.mc_samples, ctx, exec);
    case MethodSpec::Kind::kMcOut: return oi::mc_fixed_outward(g, seeds, m.mc_samples, ctx, exec);
  }
  throw std::logic_error("unhandled method");
}

// ---------------------------------------------------------------------------

struct CommonArgs {
  GraphOpts graph;
  SeedOpts seeds;
  OutputOpts output;
  std::uint64_t rng_seed = 1;
  int threads = 1;
  int batch = 256;
  double eps = 0.1;
  double delta = 0.01;
  bool variance_budget_normalized = false;

  oi::RsaOptions rsa_options() const { return {variance_budget_normalized}; }
};

void add_graph_flags(CLI::App* cmd, GraphOpts& g, bool required = true) {
  auto* opt = cmd->add_option("--graph", g.path, "edge-list file");
  if (required) opt->required();
  cmd->add_option("--weights", g.weights, "wc | const=P | file")->capture_default_str();
}

void add_seed_flags(CLI::App* cmd, SeedOpts& s) {
  cmd->add_option("--seeds", s.seeds, "comma-separated node labels of one seed set");
  cmd->add_option("--seed-size", s.seed_size, "size of random seed sets");
  cmd->add_option("--num-sets", s.num_sets, "number of random seed sets");
}

void add_output_flags(CLI::App* cmd, OutputOpts& o) {
  cmd->add_option("--out", o.out, "output file, - for stdout")->capture_default_str();
  cmd->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_flag("--timing,!--no-timing", o.timing, "report wall-clock times")
      ->capture_default_str();
}

void add_run_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--rng-seed", a.rng_seed, "master random seed")->capture_default_str();
  cmd->add_option("--threads", a.threads, "worker threads")->capture_default_str();
  cmd->add_option("--batch", a.batch, "samples per worker batch")->capture_default_str();
  cmd->add_flag("--variance-budget-normalized", a.variance_budget_normalized,
                "divide the variance-probe budget by the stream range");
}

int cmd_estimate(const CommonArgs& a, const std::string& method) {
  const auto g = load_graph(a.graph);
  const oi::StreamContext root{a.rng_seed, 0};
  const oi::ExecPolicy exec{a.threads, a.batch};
  const MethodSpec m = parse_method(method);
  const auto sets = resolve_seed_sets(g, a.seeds, root);

  RecordSink sink(a.output, false);
  std::uint64_t run = 0;
  for (const auto& seeds : sets) {
    const auto t0 = Clock::now();
    const oi::EstimationResult r =
        run_method(g, m, seeds, a.eps, a.delta, root.sub(run), exec, a.rsa_options());
    oi::RunRecord rec;
    rec.method = m.label;
    rec.seed_set = label_string(g, seeds);
    rec.estimate = r.estimate;
    rec.samples = r.samples_used;
    rec.observed_influence = r.observed_sum;
    rec.wall_ms = elapsed_ms(t0);
    rec.rng_seed = a.rng_seed;
    rec.threads = a.threads;
    rec.eps = a.eps;
    rec.delta = a.delta;
    sink.add(std::move(rec));
    ++run;
  }
  return 0;
}

int cmd_exact(const CommonArgs& a) {
  const auto g = load_graph(a.graph);
  const oi::StreamContext root{a.rng_seed, 0};
  const auto sets = resolve_seed_sets(g, a.seeds, root);

  RecordSink sink(a.output, false);
  for (const auto& seeds : sets) {
    const auto t0 = Clock::now();
    const double inf = oi::exact_influence(g, seeds);
    const double ms = elapsed_ms(t0);
    for (bool outward : {false, true}) {
      oi::RunRecord rec;
      rec.method = outward ? "exact-outward" : "exact-influence";
      rec.seed_set = label_string(g, seeds);
      rec.estimate = outward ? inf - static_cast<double>(seeds.size()) : inf;
      rec.wall_ms = ms;
      rec.rng_seed = a.rng_seed;
      rec.threads = a.threads;
      sink.add(std::move(rec));
    }
  }
  return 0;
}

int cmd_oracle_build(const CommonArgs& a, std::uint64_t samples, const std::string& sketch_out,
                     std::uint64_t max_mb) {
  const auto g = load_graph(a.graph);
  const oi::StreamContext root{a.rng_seed, 0};
  const oi::ExecPolicy exec{a.threads, a.batch};
  const auto store =
      oi::SketchStore::build(g, samples, root.sub(0), exec, max_mb * 1024 * 1024);
  std::ofstream out(sketch_out, std::ios::binary);
  if (!out) throw oi::ParseError("cannot open sketch output " + sketch_out);
  store.save(out);
  std::cerr << "sketch: " << store.size() << " samples over " << store.node_count()
            << " nodes -> " << sketch_out << '\n';
  return 0;
}

int cmd_oracle_query(const CommonArgs& a, const std::string& sketch_path,
                     const std::string& mode) {
  std::ifstream in(sketch_path, std::ios::binary);
  if (!in) throw oi::ParseError("cannot open sketch file " + sketch_path);
  const auto store = oi::SketchStore::load(in);

  // A graph is only needed to translate external labels; without one the
  // seed labels are taken as dense ids.
  std::unique_ptr<oi::ProbabilisticGraph> g;
  if (!a.graph.path.empty()) g = std::make_unique<oi::ProbabilisticGraph>(load_graph(a.graph));

  const oi::StreamContext root{a.rng_seed, 0};
  std::vector<std::vector<NodeId>> sets;
  if (!a.seeds.seeds.empty()) {
    std::vector<NodeId> s;
    std::stringstream ss(a.seeds.seeds);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      const auto label = std::stoll(tok);
      s.push_back(g ? g->id_of_label(label) : static_cast<NodeId>(label));
    }
    if (s.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
    sets.push_back(std::move(s));
  } else {
    if (a.seeds.seed_size == 0 || a.seeds.num_sets == 0)
      throw CLI::ValidationError("seeds", "give --seeds or --seed-size/--num-sets");
    oi::RandomStream rng = root.stream(999, 0);
    std::vector<NodeId> ids(store.node_count());
    for (NodeId i = 0; i < store.node_count(); ++i) ids[i] = i;
    for (std::uint64_t s = 0; s < a.seeds.num_sets; ++s) {
      for (NodeId i = 0; i < a.seeds.seed_size; ++i) {
        const auto j = i + rng.uniform_below(static_cast<std::uint32_t>(ids.size() - i));
        std::swap(ids[i], ids[j]);
      }
      std::vector<NodeId> set(ids.begin(), ids.begin() + a.seeds.seed_size);
      std::sort(set.begin(), set.end());
      sets.push_back(std::move(set));
    }
  }

  RecordSink sink(a.output, false);
  oi::SketchQueryScratch scratch;
  for (const auto& seeds : sets) {
    const auto t0 = Clock::now();
    const double est = mode == "influence" ? store.query_influence(seeds, &scratch)
                                           : store.query_outward(seeds, &scratch);
    oi::RunRecord rec;
    rec.method = "oracle-" + mode;
    if (g) {
      rec.seed_set = label_string(*g, seeds);
    } else {
      for (std::size_t i = 0; i < seeds.size(); ++i)
        rec.seed_set += (i ? ";" : "") + std::to_string(seeds[i]);
    }
    rec.estimate = est;
    rec.samples = store.size();
    rec.wall_ms = elapsed_ms(t0);
    rec.rng_seed = a.rng_seed;
    rec.threads = a.threads;
    sink.add(std::move(rec));
  }
  return 0;
}

int cmd_im(const CommonArgs& a, const std::string& algo, NodeId k, std::uint64_t samples,
           double rho, bool auto_tune, double delta1, double delta2, double eps2,
           double eps3) {
  const auto g = load_graph(a.graph);
  const oi::StreamContext root{a.rng_seed, 0};
  const oi::ExecPolicy exec{a.threads, a.batch};

  RecordSink sink(a.output, true);
  oi::RunRecord rec;
  rec.seed_set = "";
  rec.rng_seed = a.rng_seed;
  rec.threads = a.threads;
  rec.eps = a.eps;
  rec.delta = a.delta;
  const auto t0 = Clock::now();

  if (algo == "brute") {
    const auto [set, value] = oi::brute_force_opt(g, k);
    rec.method = "brute";
    rec.seed_set = label_string(g, set);
    rec.estimate = value;
    rec.bound = 1.0;
    rec.iterations = 0;
  } else if (algo == "greedy") {
    const auto store = oi::SketchStore::build(g, samples, root.sub(0), exec);
    const auto gr = oi::greedy_with_bound(store, k);
    rec.method = "greedy";
    rec.seed_set = label_string(g, gr.seed_set);
    rec.estimate = gr.estimate;
    rec.samples = store.size();
    rec.bound = gr.bound;
    rec.iterations = 1;
  } else if (algo == "out-ssa") {
    oi::PrecisionParams params;
    if (auto_tune) {
      params = oi::tune_parameters(g, k, a.eps, a.delta, delta1, delta2, rho,
                                   root.sub(3), exec);
      std::cerr << "tuned eps1=" << params.eps1 << " eps2=" << params.eps2
                << " eps3=" << params.eps3 << (params.converged ? "" : " (not converged)")
                << '\n';
    } else {
      params = oi::default_precision_params(a.eps, a.delta, rho);
      if (eps2 > 0.0) params.eps2 = eps2;
      if (eps3 > 0.0) params.eps3 = eps3;
      params.delta1 = delta1;
      params.delta2 = delta2;
      params.rho = rho;
    }
    const auto res = oi::out_ssa(g, k, params, root.sub(1), exec);
    rec.method = "out-ssa";
    rec.seed_set = label_string(g, res.seed_set);
    rec.estimate = res.estimate;
    rec.bound = res.bound;
    rec.iterations = res.iterations;
  } else {
    throw CLI::ValidationError("--algo", "expected out-ssa, greedy or brute");
  }
  rec.wall_ms = elapsed_ms(t0);
  sink.add(std::move(rec));
  return 0;
}

int cmd_bench(const CommonArgs& a, const std::string& methods_csv, const std::string& mode,
              const std::string& truth_mode, const std::string& records_path) {
  const auto g = load_graph(a.graph);
  const oi::StreamContext root{a.rng_seed, 0};
  const oi::ExecPolicy exec{a.threads, a.batch};

  if (a.seeds.num_sets == 0)
    throw CLI::ValidationError("--num-sets", "bench needs at least one seed set");
  const auto sets = resolve_seed_sets(g, a.seeds, root);

  std::vector<MethodSpec> methods;
  {
    std::stringstream ss(methods_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      MethodSpec m = parse_method(tok);
      const bool outward_ok = m.kind == MethodSpec::Kind::kSoiea ||
                              m.kind == MethodSpec::Kind::kMc ||
                              m.kind == MethodSpec::Kind::kMcOut;
      const bool influence_ok = m.kind != MethodSpec::Kind::kSoiea &&
                                m.kind != MethodSpec::Kind::kMcOut;
      if (mode == "outward" && !outward_ok)
        throw CLI::ValidationError("--methods", m.label + " does not estimate outward influence");
      if (mode == "influence" && !influence_ok)
        throw CLI::ValidationError("--methods", m.label + " does not estimate influence");
      // plain mc in outward mode means the outward variant
      if (mode == "outward" && m.kind == MethodSpec::Kind::kMc)
        m.kind = MethodSpec::Kind::kMcOut;
      methods.push_back(std::move(m));
    }
  }
  if (methods.empty()) throw CLI::ValidationError("--methods", "no methods given");

  const bool outward = mode == "outward";
  const double gold_eps = 0.005;
  const double gold_delta = 1.0 / g.node_count();

  struct Agg {
    std::uint64_t sets = 0, zero_truth = 0, samples = 0;
    double err_sum = 0, err_max = 0, time_ms = 0;
  };
  std::vector<Agg> agg(methods.size());

  std::unique_ptr<RecordSink> records;
  if (!records_path.empty()) {
    OutputOpts ro;
    ro.out = records_path;
    ro.format = "csv";
    ro.timing = a.output.timing;
    records = std::make_unique<RecordSink>(ro, false);
  }

  std::uint64_t run = 0;
  for (std::size_t si = 0; si < sets.size(); ++si) {
    const auto& seeds = sets[si];
    double truth;
    if (truth_mode == "exact") {
      truth = outward ? oi::exact_outward(g, seeds) : oi::exact_influence(g, seeds);
    } else {  // siea-gold: the (0.005, 1/n) pseudo ground truth of the estimator family
      const auto gold_ctx = root.sub(1000000 + si);
      truth = outward ? oi::soiea(g, seeds, gold_eps, gold_delta, gold_ctx, exec,
                                  a.rsa_options())
                            .estimate
                      : oi::siea(g, seeds, gold_eps, gold_delta, gold_ctx, exec,
                                 a.rsa_options())
                            .estimate;
    }

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto t0 = Clock::now();
      const oi::EstimationResult r = run_method(g, methods[mi], seeds, a.eps, a.delta,
                                                root.sub(run), exec, a.rsa_options());
      const double ms = elapsed_ms(t0);
      ++run;

      oi::RunRecord rec;
      rec.method = methods[mi].label;
      rec.seed_set = label_string(g, seeds);
      rec.estimate = r.estimate;
      oi::attach_truth(rec, truth);
      rec.samples = r.samples_used;
      rec.observed_influence = r.observed_sum;
      rec.wall_ms = ms;
      rec.rng_seed = a.rng_seed;
      rec.threads = a.threads;
      rec.eps = a.eps;
      rec.delta = a.delta;

      Agg& ag = agg[mi];
      ++ag.sets;
      ag.samples += r.samples_used;
      ag.time_ms += ms;
      if (rec.rel_error_pct) {
        ag.err_sum += *rec.rel_error_pct;
        ag.err_max = std::max(ag.err_max, *rec.rel_error_pct);
      } else {
        ++ag.zero_truth;
      }
      if (records) records->add(std::move(rec));
    }
  }

  std::ofstream file;
  if (a.output.out != "-") {
    file.open(a.output.out);
    if (!file) throw oi::ParseError("cannot open output file " + a.output.out);
  }
  std::ostream& out = file.is_open() ? file : std::cout;
  out << "method,mode,truth,sets,zero_truth_sets,avg_rel_error_pct,max_rel_error_pct,"
         "avg_samples,total_time_s\n";
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const Agg& ag = agg[mi];
    const std::uint64_t scored = ag.sets - ag.zero_truth;
    out << methods[mi].label << ',' << mode << ',' << truth_mode << ',' << ag.sets << ','
        << ag.zero_truth << ','
        << oi::format_double(scored ? ag.err_sum / static_cast<double>(scored) : 0.0) << ','
        << oi::format_double(ag.err_max) << ','
        << (ag.sets ? ag.samples / ag.sets : 0) << ','
        << oi::format_double(a.output.timing ? ag.time_ms / 1000.0 : 0.0) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"outward influence and cascade size estimation toolkit"};
  app.require_subcommand(1);

  CommonArgs a;
  std::string method = "siea";
  std::string algo = "out-ssa";
  std::string sketch_path, sketch_out, oracle_mode = "influence";
  std::string methods_csv = "soiea,mc=10000";
  std::string bench_mode = "outward", truth_mode = "siea-gold", records_path;
  std::uint64_t samples = 100000, max_mb = 0;
  NodeId k = 1;
  double rho = 0.4, delta1 = 0.0, delta2 = 0.0, eps2 = 0.0, eps3 = 0.0;
  bool auto_tune = false;

  auto* est = app.add_subcommand("estimate", "run an influence estimator");
  add_graph_flags(est, a.graph);
  add_seed_flags(est, a.seeds);
  add_output_flags(est, a.output);
  add_run_flags(est, a);
  est->add_option("--method", method, "soiea | siea | siea-lt | mc=T | mc-out=T")
      ->capture_default_str();
  est->add_option("--eps", a.eps, "relative error")->capture_default_str();
  est->add_option("--delta", a.delta, "failure probability")->capture_default_str();

  auto* ex = app.add_subcommand("exact", "enumeration oracle (tiny graphs)");
  add_graph_flags(ex, a.graph);
  add_seed_flags(ex, a.seeds);
  add_output_flags(ex, a.output);
  add_run_flags(ex, a);

  auto* oracle = app.add_subcommand("oracle", "reverse-sample sketch oracle");
  oracle->require_subcommand(1);
  auto* ob = oracle->add_subcommand("build", "sample and persist a sketch");
  add_graph_flags(ob, a.graph);
  add_run_flags(ob, a);
  ob->add_option("--samples", samples, "reverse samples to draw")->capture_default_str();
  ob->add_option("--sketch-out", sketch_out, "output sketch file")->required();
  ob->add_option("--max-sketch-mb", max_mb, "memory budget, 0 = unlimited")
      ->capture_default_str();
  auto* oq = oracle->add_subcommand("query", "query a persisted sketch");
  oq->add_option("--sketch", sketch_path, "sketch file")->required();
  add_graph_flags(oq, a.graph, /*required=*/false);
  add_seed_flags(oq, a.seeds);
  add_output_flags(oq, a.output);
  add_run_flags(oq, a);
  oq->add_option("--mode", oracle_mode, "influence | outward")
      ->check(CLI::IsMember({"influence", "outward"}))
      ->capture_default_str();

  auto* im = app.add_subcommand("im", "influence maximization");
  add_graph_flags(im, a.graph);
  add_output_flags(im, a.output);
  add_run_flags(im, a);
  im->add_option("--algo", algo, "out-ssa | greedy | brute")->capture_default_str();
  im->add_option("--k", k, "seed budget")->capture_default_str();
  im->add_option("--samples", samples, "sketch size for greedy")->capture_default_str();
  im->add_option("--rho", rho, "desired approximation factor")->capture_default_str();
  im->add_option("--eps", a.eps, "precision budget")->capture_default_str();
  im->add_option("--delta", a.delta, "failure probability")->capture_default_str();
  im->add_option("--delta1", delta1, "first-stage failure share");
  im->add_option("--delta2", delta2, "second-stage failure share");
  im->add_option("--eps2", eps2, "verification precision override");
  im->add_option("--eps3", eps3, "sampling precision override");
  im->add_flag("--auto-tune", auto_tune, "tune precision parameters first");

  auto* bench = app.add_subcommand("bench", "relative-error benchmark harness");
  add_graph_flags(bench, a.graph);
  add_seed_flags(bench, a.seeds);
  add_output_flags(bench, a.output);
  add_run_flags(bench, a);
  bench->add_option("--methods", methods_csv, "comma-separated method list")
      ->capture_default_str();
  bench->add_option("--mode", bench_mode, "outward | influence")
      ->check(CLI::IsMember({"outward", "influence"}))
      ->capture_default_str();
  bench->add_option("--truth", truth_mode, "exact | siea-gold")
      ->check(CLI::IsMember({"exact", "siea-gold"}))
      ->capture_default_str();
  bench->add_option("--records", records_path, "write per-run records to this csv");
  bench->add_option("--eps", a.eps, "method precision")->capture_default_str();
  bench->add_option("--delta", a.delta, "method failure probability")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (est->parsed()) return cmd_estimate(a, method);
    if (ex->parsed()) return cmd_exact(a);
    if (oracle->parsed()) {
      if (ob->parsed()) return cmd_oracle_build(a, samples, sketch_out, max_mb);
      return cmd_oracle_query(a, sketch_path, oracle_mode);
    }
    if (im->parsed()) {
      const double d1 = delta1 > 0.0 ? delta1 : a.delta / 2.0;
      const double d2 = delta2 > 0.0 ? delta2 : a.delta / 2.0;
      return cmd_im(a, algo, k, samples, rho, auto_tune, d1, d2, eps2, eps3);
    }
    if (bench->parsed()) return cmd_bench(a, methods_csv, bench_mode, truth_mode, records_path);
  } catch (const oi::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return 3;
  } catch (const oi::ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const oi::DomainError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
