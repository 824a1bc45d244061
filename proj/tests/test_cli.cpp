#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "subsam/bench.hpp"
#include "subsam/cli.hpp"

namespace {

struct CliResult {
  int code = -1;
  std::string out;  // --out file contents (when requested)
  std::string stdout_text;
  std::string stderr_text;
};

// Runs the tool in-process with captured streams.
CliResult run(std::vector<std::string> args, const std::string& out_file = "") {
  if (!out_file.empty()) {
    std::remove(out_file.c_str());
    args.push_back("--out");
    args.push_back(out_file);
  }
  std::vector<const char*> argv = {"subsam-bench"};
  for (const std::string& a : args) argv.push_back(a.c_str());

  std::ostringstream cout_sink, cerr_sink;
  std::streambuf* old_cout = std::cout.rdbuf(cout_sink.rdbuf());
  std::streambuf* old_cerr = std::cerr.rdbuf(cerr_sink.rdbuf());
  CliResult r;
  r.code = subsam::run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_cout);
  std::cerr.rdbuf(old_cerr);
  r.stdout_text = cout_sink.str();
  r.stderr_text = cerr_sink.str();

  if (!out_file.empty()) {
    std::ifstream in(out_file, std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    r.out = content.str();
  }
  return r;
}

std::string write_fixture_graph() {
  const std::string path = "/tmp/subsam_cli_fixture_graph.txt";
  std::ofstream out(path);
  out << "# three-node cycle\n"
         "0 1 0.5\n"
         "1 2 0.9\n"
         "2 0 0.25\n";
  return path;
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char ch : text) n += ch == '\n';
  return n;
}

}  // namespace

TEST_CASE("bench-query emits one parsable record") {
  CliResult r = run({"bench-query", "--method", "odss", "--n", "400", "--mu", "8",
                     "--repeats", "25", "--seed", "5"},
                    "/tmp/subsam_cli_bq.csv");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::vector<subsam::CsvRow> rows = subsam::read_csv(in);
  REQUIRE(!rows.empty());
  bool saw_time = false, saw_draws = false;
  for (const auto& row : rows) {
    CHECK(row.method == "odss");
    CHECK(row.n == 400);
    CHECK(row.seed == 5);
    saw_time = saw_time || row.metric == "query_ns_mean";
    saw_draws = saw_draws || row.metric == "rng_draws_per_query";
  }
  CHECK(saw_time);
  CHECK(saw_draws);
}

TEST_CASE("subcommands default to stdout") {
  CliResult r = run({"bench-query", "--method", "naive", "--n", "50", "--mu", "2",
                     "--repeats", "10", "--seed", "1"});
  CHECK(r.code == 0);
  CHECK(r.stdout_text.rfind("method,n,mu,metric,value,seed\n", 0) == 0);
}

TEST_CASE("error-test is byte-deterministic for a fixed seed") {
  std::vector<std::string> args = {"error-test", "--method", "odss",  "--n",
                                   "200",        "--mu",     "5",     "--repeats",
                                   "20000",      "--updates", "50",   "--seed", "9"};
  CliResult a = run(args, "/tmp/subsam_cli_err_a.csv");
  CliResult b = run(args, "/tmp/subsam_cli_err_b.csv");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);

  std::istringstream in(a.out);
  std::vector<subsam::CsvRow> rows = subsam::read_csv(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].metric == "max_abs_error");
  CHECK(rows[0].value < 0.05);
  CHECK(rows[0].seed == 9);
}

TEST_CASE("world emits count lines of stable edge ids") {
  std::string graph = write_fixture_graph();
  std::vector<std::string> args = {"world", "--graph", graph, "--count", "100",
                                   "--seed", "3"};
  CliResult a = run(args, "/tmp/subsam_cli_world_a.txt");
  CliResult b = run(args, "/tmp/subsam_cli_world_b.txt");
  REQUIRE(a.code == 0);
  CHECK(line_count(a.out) == 100);
  CHECK(a.out == b.out);  // identical argv + seed -> identical bytes

  std::istringstream in(a.out);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::uint64_t id = 0;
    while (fields >> id) CHECK(id < 3);
  }

  CliResult other = run({"world", "--graph", graph, "--count", "100", "--seed", "4"},
                        "/tmp/subsam_cli_world_c.txt");
  CHECK(other.out != a.out);
}

TEST_CASE("rrset emits count lines of node ids") {
  std::string graph = write_fixture_graph();
  CliResult r = run({"rrset", "--graph", graph, "--count", "100", "--seed", "3"},
                    "/tmp/subsam_cli_rrset.txt");
  REQUIRE(r.code == 0);
  CHECK(line_count(r.out) == 100);
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) {
    REQUIRE(!line.empty());  // every set contains at least its start node
    std::istringstream fields(line);
    std::uint64_t id = 0;
    while (fields >> id) CHECK(id < 3);
  }
}

TEST_CASE("rrset honors scaling") {
  std::string path = "/tmp/subsam_cli_weighted.txt";
  {
    std::ofstream out(path);
    out << "0 1\n1 0 2\n1 2 2\n";  // weights, no probabilities
  }
  CliResult r = run({"rrset", "--graph", path, "--count", "10", "--seed", "1",
                     "--scale", "out_sum_1"},
                    "/tmp/subsam_cli_rrset_scaled.txt");
  CHECK(r.code == 0);
  CHECK(line_count(r.out) == 10);
  // The same file without scaling lacks mandatory probabilities.
  CliResult bad = run({"rrset", "--graph", path, "--count", "10", "--seed", "1"});
  CHECK(bad.code == 2);
}

TEST_CASE("tradeoff covers every method and is draw-stable across jobs") {
  std::vector<std::string> base = {"tradeoff", "--n", "200", "--mu", "4",
                                   "--repeats", "20", "--updates", "10",
                                   "--seed", "7"};
  std::vector<std::string> par = base;
  par.push_back("--jobs");
  par.push_back("3");
  CliResult seq = run(base, "/tmp/subsam_cli_tr_seq.csv");
  CliResult conc = run(par, "/tmp/subsam_cli_tr_par.csv");
  REQUIRE(seq.code == 0);
  REQUIRE(conc.code == 0);

  auto strip_timing = [](const std::string& text) {
    std::istringstream in(text);
    std::vector<subsam::CsvRow> rows = subsam::read_csv(in);
    std::vector<std::string> kept;
    for (const auto& row : rows) {
      if (row.metric.find("_ns_") != std::string::npos) continue;
      kept.push_back(row.method + "/" + row.metric + "=" + subsam::format_g6(row.value));
    }
    return kept;
  };
  CHECK(strip_timing(seq.out) == strip_timing(conc.out));

  std::istringstream in(seq.out);
  std::vector<subsam::CsvRow> rows = subsam::read_csv(in);
  bool q_basic = false, u_odss = false, u_basic = false;
  for (const auto& row : rows) {
    q_basic = q_basic || (row.method == "basic" && row.metric == "query_ns_mean");
    u_odss = u_odss || (row.method == "odss" && row.metric == "update_ns_mean");
    u_basic = u_basic || (row.method == "basic" && row.metric == "update_ns_mean");
  }
  CHECK(q_basic);
  CHECK(u_odss);
  CHECK(!u_basic);  // query-only method is excluded from the update grid
}

TEST_CASE("bench-update reports bounded structural work") {
  CliResult r = run({"bench-update", "--method", "odss", "--n", "300", "--mu", "6",
                     "--updates", "40", "--seed", "2"},
                    "/tmp/subsam_cli_bu.csv");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::vector<subsam::CsvRow> rows = subsam::read_csv(in);
  bool saw = false;
  for (const auto& row : rows) {
    if (row.metric == "slot_writes_per_update") {
      saw = true;
      CHECK(row.value > 0.0);
      CHECK(row.value <= 12.0);
    }
  }
  CHECK(saw);
}

TEST_CASE("exit codes distinguish usage errors from runtime failures") {
  CHECK(run({"nosuch"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"bench-query", "--method", "zigzag"}).code == 1);
  CHECK(run({"bench-query", "--n", "0"}).code == 1);
  CHECK(run({"world", "--count", "5"}).code == 1);  // --graph is required
  CHECK(run({"bench-query", "--format", "json"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"bench-query", "--help"}).code == 0);

  // Well-formed argv, failing operation.
  CHECK(run({"world", "--graph", "/tmp/subsam_cli_missing_graph.txt"}).code == 2);
  CHECK(run({"bench-update", "--method", "basic", "--n", "50", "--mu", "2"}).code == 2);

  CliResult usage = run({"bench-query", "--method", "zigzag"});
  CHECK(!usage.stderr_text.empty());
  CliResult runtime = run({"bench-update", "--method", "basic", "--n", "50", "--mu", "2"});
  CHECK(runtime.stderr_text.find("query-only") != std::string::npos);
}

TEST_CASE("row representation flag reaches the sampler") {
  for (const char* repr : {"dense", "cdf"}) {
    CliResult r = run({"bench-query", "--method", "odss", "--n", "100", "--mu", "4",
                       "--repeats", "10", "--seed", "6", "--row-repr", repr},
                      "/tmp/subsam_cli_repr.csv");
    CHECK(r.code == 0);
  }
  CHECK(run({"bench-query", "--row-repr", "sparse"}).code == 1);
}
