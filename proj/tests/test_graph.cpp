#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "subsam/graph.hpp"
#include "subsam/stats.hpp"

using namespace subsam;

TEST_CASE("edge list parsing") {
  std::istringstream in(
      "# leading comment\n"
      "0 1 0.5\n"
      "\n"
      "1 2 0.9   # trailing comment\n"
      "2 0 0.25\n");
  Loaded loaded = load_edge_list(in, Scaling::none, 1);
  REQUIRE(loaded.edges.size() == 3);
  CHECK(loaded.graph->node_count() == 3);
  CHECK(loaded.graph->edge_count() == 3);
  CHECK(loaded.graph->has_edge(0, 1));
  CHECK(loaded.graph->edge_prob(1, 2) == 0.9);
  CHECK(loaded.graph->out_degree(0) == 1);
  CHECK(loaded.graph->in_degree(0) == 1);
  CHECK(loaded.edges[2].from == 2);
  CHECK(loaded.edges[2].prob == 0.25);
}

TEST_CASE("edge list rejects malformed lines with their line number") {
  auto load_text = [](const std::string& text, Scaling sc = Scaling::none) {
    std::istringstream in(text);
    return load_edge_list(in, sc, 1);
  };
  CHECK_THROWS_WITH_AS(load_text("0 1 0.5\n0\n"), doctest::Contains("line 2"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(load_text("0 1\n"), doctest::Contains("line 1"),
                       std::runtime_error);  // probability required
  CHECK_THROWS_WITH_AS(load_text("0 1 1.5\n"), doctest::Contains("line 1"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(load_text("0 1 0.5 9\n"), doctest::Contains("line 1"),
                       std::runtime_error);  // trailing tokens
  CHECK_THROWS_WITH_AS(load_text("zzz 1 0.5\n"), doctest::Contains("line 1"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(load_text("0 1 0.5\n0 1 0.7\n"), doctest::Contains("line 2"),
                       std::runtime_error);  // duplicate edge
  CHECK_THROWS_AS(load_text("# only comments\n"), std::runtime_error);
  CHECK_THROWS_AS(load_text("4294967296 1 0.5\n"), std::runtime_error);  // id > 32 bits
}

TEST_CASE("out-weight scaling normalizes per source node") {
  std::istringstream in(
      "0 1\n"
      "0 2\n"
      "1 0 3\n"
      "1 2 1\n");
  Loaded loaded = load_edge_list(in, Scaling::out_sum_1, 1);
  CHECK(loaded.graph->edge_prob(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(loaded.graph->edge_prob(0, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(loaded.graph->edge_prob(1, 0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(loaded.graph->edge_prob(1, 2) == doctest::Approx(0.25).epsilon(1e-15));

  std::istringstream zero("0 1 0\n0 2 0\n");
  CHECK_THROWS_AS(load_edge_list(zero, Scaling::out_sum_1, 1), std::runtime_error);
}

TEST_CASE("sparse node ids size the graph to the maximum id") {
  std::istringstream in("0 70000 0.5\n");
  Loaded loaded = load_edge_list(in, Scaling::none, 1);
  CHECK(loaded.graph->node_count() == 70001);
  CHECK(loaded.graph->out_degree(0) == 1);
}

TEST_CASE("edge updates mirror both adjacency sides") {
  DynamicGraph g(4, 9);
  g.insert_edge(0, 1, 0.5);
  g.insert_edge(1, 2, 0.25);
  CHECK(g.edge_count() == 2);
  CHECK(g.out_degree(0) == 1);
  CHECK(g.in_degree(1) == 1);
  CHECK_THROWS_AS(g.insert_edge(0, 1, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(g.insert_edge(0, 2, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(g.insert_edge(0, 9, 0.5), std::out_of_range);
  g.delete_edge(0, 1);
  CHECK(g.edge_count() == 1);
  CHECK(!g.has_edge(0, 1));
  CHECK(g.in_degree(1) == 0);
  CHECK_THROWS_AS(g.delete_edge(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(g.edge_prob(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(DynamicGraph(0, 1), std::invalid_argument);
  // Self-loops and 2-cycles are legal.
  g.insert_edge(3, 3, 0.5);
  g.insert_edge(2, 1, 0.5);
  CHECK(g.has_edge(3, 3));
}

TEST_CASE("possible worlds include each edge independently") {
  DynamicGraph g(3, 31);
  g.insert_edge(0, 1, 0.5);
  g.insert_edge(1, 2, 0.9);
  g.insert_edge(2, 0, 0.25);
  const std::vector<double> probs = {0.5, 0.9, 0.25};

  std::map<std::pair<std::uint32_t, std::uint32_t>, int> bit = {
      {{0, 1}, 0}, {{1, 2}, 1}, {{2, 0}, 2}};
  const std::uint64_t trials = 200000;
  std::vector<std::uint64_t> counts(8, 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> world;
  for (std::uint64_t t = 0; t < trials; ++t) {
    g.possible_world(world);
    std::uint32_t mask = 0;
    std::uint32_t prev_from = 0;
    for (const auto& e : world) {
      CHECK(e.first >= prev_from);  // ascending source order
      prev_from = e.first;
      mask |= 1u << bit.at(e);
    }
    ++counts[mask];
  }
  CHECK(subsam::chi_square_gof(counts, subsam::exact_subset_probs(probs)).pvalue > 0.001);
}

TEST_CASE("reverse-reachable sets follow the activation law on a path") {
  // a=0 -> b=1 with 0.3, b=1 -> c=2 with 0.6; sets grown backwards from c.
  DynamicGraph g(3, 77);
  g.insert_edge(0, 1, 0.3);
  g.insert_edge(1, 2, 0.6);
  const std::uint64_t trials = 100000;
  std::uint64_t n1 = 0, n2 = 0, n3 = 0;
  std::vector<std::uint32_t> out;
  for (std::uint64_t t = 0; t < trials; ++t) {
    g.rr_set_from(2, out);
    REQUIRE(!out.empty());
    CHECK(out[0] == 2);  // start node activates first
    if (out.size() == 1) {
      ++n1;
    } else if (out.size() == 2) {
      CHECK(out[1] == 1);
      ++n2;
    } else {
      REQUIRE(out.size() == 3);
      CHECK(out[1] == 1);
      CHECK(out[2] == 0);
      ++n3;
    }
  }
  std::vector<std::uint64_t> counts = {n1, n2, n3};
  // P[{c}] = 0.4, P[{c,b}] = 0.6 * 0.7, P[{c,b,a}] = 0.6 * 0.3.
  std::vector<double> law = {0.4, 0.42, 0.18};
  CHECK(subsam::chi_square_gof(counts, law).pvalue > 0.001);
}

TEST_CASE("reverse-reachable sets never loop on cycles") {
  DynamicGraph g(2, 5);
  g.insert_edge(0, 1, 1.0);
  g.insert_edge(1, 0, 1.0);
  std::vector<std::uint32_t> out;
  for (int t = 0; t < 1000; ++t) {
    g.rr_set_from(0, out);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == 0);
    CHECK(out[1] == 1);
  }
}

TEST_CASE("random start nodes are uniform") {
  DynamicGraph g(3, 131);
  g.insert_edge(0, 1, 0.5);
  const std::uint64_t trials = 30000;
  std::vector<std::uint64_t> starts(3, 0);
  std::vector<std::uint32_t> out;
  for (std::uint64_t t = 0; t < trials; ++t) {
    g.rr_set(out);
    ++starts[out[0]];
  }
  std::vector<double> probs(3, 1.0 / 3.0);
  CHECK(subsam::chi_square_gof(starts, probs).pvalue > 0.001);
}

TEST_CASE("edge churn keeps both samplers in line with the adjacency") {
  DynamicGraph g(16, 17);
  std::mt19937_64 drive(888);
  auto rnd01 = [&] { return (drive() >> 11) * 0x1.0p-53; };
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> shadow;

  for (int step = 0; step < 2000; ++step) {
    auto u = static_cast<std::uint32_t>(drive() % 16);
    auto v = static_cast<std::uint32_t>(drive() % 16);
    auto key = std::make_pair(u, v);
    if (shadow.count(key)) {
      g.delete_edge(u, v);
      shadow.erase(key);
    } else {
      double p = rnd01();
      g.insert_edge(u, v, p);
      shadow[key] = p;
    }
  }

  CHECK(g.edge_count() == shadow.size());
  for (const auto& [key, p] : shadow) {
    CHECK(g.has_edge(key.first, key.second));
    CHECK(g.edge_prob(key.first, key.second) == p);
  }

  // Worlds drawn after churn still match the per-edge marginals.
  const std::uint64_t trials = 60000;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> hits;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> world;
  for (std::uint64_t t = 0; t < trials; ++t) {
    g.possible_world(world);
    for (const auto& e : world) ++hits[e];
  }
  for (const auto& [key, p] : shadow) {
    double freq = static_cast<double>(hits[key]) / static_cast<double>(trials);
    CHECK(testutil::freq_close(freq, p, trials));
  }
}

TEST_CASE("graph sampling is reproducible per seed") {
  auto make = [](std::uint64_t seed) {
    DynamicGraph g(4, seed);
    g.insert_edge(0, 1, 0.4);
    g.insert_edge(1, 2, 0.7);
    g.insert_edge(2, 3, 0.2);
    return g;
  };
  DynamicGraph a = make(9), b = make(9), c = make(10);
  std::vector<std::uint32_t> oa, ob, oc;
  bool all_equal = true, any_diff = false;
  for (int t = 0; t < 300; ++t) {
    a.rr_set(oa);
    b.rr_set(ob);
    c.rr_set(oc);
    all_equal = all_equal && oa == ob;
    any_diff = any_diff || oa != oc;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}
