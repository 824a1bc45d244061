#include "subsam/cli.hpp"

#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "subsam/bench.hpp"
#include "subsam/graph.hpp"
#include "subsam/workload.hpp"

namespace subsam {
namespace {

struct CommonOpts {
  std::string method = "odss";
  std::uint64_t n = 1000;
  double mu = 10.0;
  std::string dist = "exponential";
  std::uint64_t repeats = 100;
  std::uint64_t updates = 1000;
  std::uint64_t seed = 1;
  std::string graph_path;
  std::uint64_t count = 1;
  std::string scale = "none";
  std::string out_path;
  unsigned jobs = 1;
  std::string row_repr = "cdf";
  std::string format = "csv";
};

WorkloadSpec make_spec(const CommonOpts& o) {
  WorkloadSpec spec;
  spec.dist = distribution_from_name(o.dist);
  spec.n = static_cast<std::size_t>(o.n);
  spec.mu_target = o.mu;
  spec.seed = o.seed;
  return spec;
}

RowRepr row_repr_from_name(const std::string& name) {
  if (name == "cdf") return RowRepr::cdf;
  if (name == "dense") return RowRepr::dense;
  throw std::invalid_argument("unknown row representation: " + name);
}

Scaling scaling_from_name(const std::string& name) {
  if (name == "none") return Scaling::none;
  if (name == "out_sum_1") return Scaling::out_sum_1;
  throw std::invalid_argument("unknown scaling: " + name);
}

// Writes either to --out or to stdout.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (file_.is_open() && !file_) throw std::runtime_error("write to output file failed");
  }

 private:
  std::ofstream file_;
};

int cmd_bench_query(const CommonOpts& o) {
  BenchRecord rec = bench_query(o.method, make_spec(o), static_cast<std::size_t>(o.repeats),
                                row_repr_from_name(o.row_repr));
  OutputSink sink(o.out_path);
  write_csv(sink.stream(), rec.rows());
  sink.finish();
  return 0;
}

int cmd_bench_update(const CommonOpts& o) {
  BenchRecord rec = bench_update(o.method, make_spec(o), static_cast<std::size_t>(o.updates),
                                 row_repr_from_name(o.row_repr));
  OutputSink sink(o.out_path);
  write_csv(sink.stream(), rec.rows());
  sink.finish();
  return 0;
}

int cmd_error_test(const CommonOpts& o) {
  WorkloadSpec spec = make_spec(o);
  double err = error_protocol(o.method, spec, static_cast<std::size_t>(o.repeats),
                              static_cast<std::size_t>(o.updates), o.updates > 0,
                              row_repr_from_name(o.row_repr));
  CsvRow row;
  row.method = o.method;
  row.n = spec.n;
  row.mu = spec.mu_target;
  row.metric = "max_abs_error";
  row.value = err;
  row.seed = spec.seed;
  OutputSink sink(o.out_path);
  write_csv(sink.stream(), {row});
  sink.finish();
  return 0;
}

int cmd_tradeoff(const CommonOpts& o) {
  const WorkloadSpec spec = make_spec(o);
  const RowRepr repr = row_repr_from_name(o.row_repr);
  const std::size_t repeats = static_cast<std::size_t>(o.repeats);
  const std::size_t updates = static_cast<std::size_t>(o.updates);

  struct Cell {
    std::string method;
    bool update;
  };
  std::vector<Cell> cells;
  for (const char* m : {"naive", "hybrid", "odss", "basic"}) cells.push_back({m, false});
  for (const char* m : {"naive", "hybrid", "odss"}) cells.push_back({m, true});

  auto run_cell = [&](const Cell& c) {
    return c.update ? bench_update(c.method, spec, updates, repr)
                    : bench_query(c.method, spec, repeats, repr);
  };

  std::vector<BenchRecord> records(cells.size());
  if (o.jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) records[i] = run_cell(cells[i]);
  } else {
    // Bounded fan-out; results land in fixed cell order regardless of timing.
    std::vector<std::future<BenchRecord>> pending(cells.size());
    std::size_t launched = 0, joined = 0;
    while (joined < cells.size()) {
      while (launched < cells.size() && launched - joined < o.jobs) {
        pending[launched] = std::async(std::launch::async, run_cell, cells[launched]);
        ++launched;
      }
      records[joined] = pending[joined].get();
      ++joined;
    }
  }

  std::vector<CsvRow> rows;
  for (const BenchRecord& rec : records)
    for (const CsvRow& row : rec.rows()) rows.push_back(row);
  OutputSink sink(o.out_path);
  write_csv(sink.stream(), rows);
  sink.finish();
  return 0;
}

Loaded load_graph_for(const CommonOpts& o) {
  if (o.graph_path.empty()) throw std::invalid_argument("--graph is required");
  std::ifstream in(o.graph_path);
  if (!in) throw std::runtime_error("cannot open graph file: " + o.graph_path);
  return load_edge_list(in, scaling_from_name(o.scale), o.seed);
}

int cmd_world(const CommonOpts& o) {
  Loaded loaded = load_graph_for(o);
  // Edges are reported by their position in the input file (load order).
  std::unordered_map<std::uint64_t, std::size_t> edge_id;
  edge_id.reserve(loaded.edges.size());
  for (std::size_t i = 0; i < loaded.edges.size(); ++i) {
    const Edge& e = loaded.edges[i];
    edge_id.emplace((static_cast<std::uint64_t>(e.from) << 32) | e.to, i);
  }
  OutputSink sink(o.out_path);
  std::ostream& out = sink.stream();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> world;
  for (std::uint64_t i = 0; i < o.count; ++i) {
    loaded.graph->possible_world(world);
    for (std::size_t j = 0; j < world.size(); ++j) {
      const std::uint64_t key =
          (static_cast<std::uint64_t>(world[j].first) << 32) | world[j].second;
      if (j != 0) out << ' ';
      out << edge_id.at(key);
    }
    out << '\n';
  }
  sink.finish();
  return 0;
}

int cmd_rrset(const CommonOpts& o) {
  Loaded loaded = load_graph_for(o);
  OutputSink sink(o.out_path);
  std::ostream& out = sink.stream();
  std::vector<std::uint32_t> nodes;
  for (std::uint64_t i = 0; i < o.count; ++i) {
    loaded.graph->rr_set(nodes);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (j != 0) out << ' ';
      out << nodes[j];
    }
    out << '\n';
  }
  sink.finish();
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"dynamic subset sampling benchmark toolkit"};
  app.require_subcommand(1);

  CommonOpts o;

  auto add_common = [&](CLI::App* sub, bool with_workload) {
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--out", o.out_path, "output file (default: stdout)");
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv"}));
    if (with_workload) {
      sub->add_option("--method", o.method, "sampler to benchmark")
          ->check(CLI::IsMember({"naive", "hybrid", "odss", "basic"}));
      sub->add_option("--n", o.n, "number of elements")->check(CLI::PositiveNumber);
      sub->add_option("--mu", o.mu, "target sum of probabilities")->check(CLI::PositiveNumber);
      sub->add_option("--dist", o.dist, "probability distribution")
          ->check(CLI::IsMember({"normal", "half_normal", "exponential", "log_normal"}));
      sub->add_option("--row-repr", o.row_repr, "lookup row layout")
          ->check(CLI::IsMember({"dense", "cdf"}));
    }
  };

  CLI::App* bq = app.add_subcommand("bench-query", "time repeated subset queries");
  add_common(bq, true);
  bq->add_option("--repeats", o.repeats, "number of queries")->check(CLI::PositiveNumber);

  CLI::App* bu = app.add_subcommand("bench-update", "time delete/insert update pairs");
  add_common(bu, true);
  bu->add_option("--updates", o.updates, "number of update pairs")->check(CLI::PositiveNumber);

  CLI::App* et = app.add_subcommand("error-test", "measure per-element frequency error");
  add_common(et, true);
  et->add_option("--repeats", o.repeats, "number of queries")->check(CLI::PositiveNumber);
  et->add_option("--updates", o.updates, "insert/delete churn before measuring (0 = static)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* to = app.add_subcommand("tradeoff", "query and update benches across all methods");
  add_common(to, true);
  to->add_option("--repeats", o.repeats, "queries per method")->check(CLI::PositiveNumber);
  to->add_option("--updates", o.updates, "update pairs per method")->check(CLI::PositiveNumber);
  to->add_option("--jobs", o.jobs, "run up to N method cells concurrently")
      ->check(CLI::PositiveNumber);

  CLI::App* wo = app.add_subcommand("world", "sample possible worlds from an edge list");
  add_common(wo, false);
  wo->add_option("--graph", o.graph_path, "edge list file")->required();
  wo->add_option("--count", o.count, "number of worlds")->check(CLI::PositiveNumber);
  wo->add_option("--scale", o.scale, "edge probability scaling")
      ->check(CLI::IsMember({"none", "out_sum_1"}));

  CLI::App* rr = app.add_subcommand("rrset", "sample reverse-reachable sets");
  add_common(rr, false);
  rr->add_option("--graph", o.graph_path, "edge list file")->required();
  rr->add_option("--count", o.count, "number of sets")->check(CLI::PositiveNumber);
  rr->add_option("--scale", o.scale, "edge probability scaling")
      ->check(CLI::IsMember({"none", "out_sum_1"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error to the right stream
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(bq)) return cmd_bench_query(o);
    if (app.got_subcommand(bu)) return cmd_bench_update(o);
    if (app.got_subcommand(et)) return cmd_error_test(o);
    if (app.got_subcommand(to)) return cmd_tradeoff(o);
    if (app.got_subcommand(wo)) return cmd_world(o);
    if (app.got_subcommand(rr)) return cmd_rrset(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace subsam
