#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subsam/odss.hpp"
#include "subsam/rng.hpp"

namespace subsam {

enum class Scaling { none, out_sum_1 };

struct Edge {
  std::uint32_t from;
  std::uint32_t to;
  double prob;
};

// Directed graph with an independent retention probability per edge and a
// dynamic subset sampler per node side: the out-sampler of u draws the
// surviving out-edges of u (possible worlds), the in-sampler of v draws the
// in-neighbors that would have activated v (reverse-reachable sets). Edge
// insert/delete touches exactly one out- and one in-sampler, each O(1)
// amortized; samplers are sized to the next power of two of the degree and
// rebuilt (doubled) on overflow.
class DynamicGraph {
 public:
  DynamicGraph(std::size_t node_count, std::uint64_t seed);

  std::size_t node_count() const { return out_adj_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool has_edge(std::uint32_t u, std::uint32_t v) const;
  double edge_prob(std::uint32_t u, std::uint32_t v) const;
  std::size_t out_degree(std::uint32_t u) const;
  std::size_t in_degree(std::uint32_t v) const;

  void insert_edge(std::uint32_t u, std::uint32_t v, double prob);
  void delete_edge(std::uint32_t u, std::uint32_t v);

  // One independent-retention draw over all edges, appended as (from, to)
  // pairs in ascending from-node order.
  void possible_world(std::vector<std::pair<std::uint32_t, std::uint32_t>>& out);

  // Reverse-reachable set from a uniformly random start node (or a fixed
  // one): repeatedly ask each newly activated node which in-neighbors would
  // have activated it; already-active nodes are not reactivated. Nodes are
  // appended in activation order, start first.
  void rr_set(std::vector<std::uint32_t>& out);
  void rr_set_from(std::uint32_t start, std::vector<std::uint32_t>& out);

 private:
  struct NodeSide {
    std::unordered_map<std::uint32_t, double> adj;
    std::unique_ptr<OdssSampler> sampler;
  };

  void check_node(std::uint32_t v) const;
  static void side_insert(NodeSide& side, std::uint32_t nbr, double prob,
                          std::uint64_t seed);
  static void side_erase(NodeSide& side, std::uint32_t nbr);

  std::uint64_t seed_;
  std::vector<NodeSide> out_adj_;
  std::vector<NodeSide> in_adj_;
  std::size_t edge_count_ = 0;
  RandomSource start_src_;  // drives uniform start-node picks only
  std::vector<std::uint32_t> visit_epoch_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint64_t> nbr_buf_;
};

struct Loaded {
  std::unique_ptr<DynamicGraph> graph;
  std::vector<Edge> edges;  // file order (stable edge ids), post-scaling probabilities
};

// Parses whitespace-separated "u v p" lines ('#' starts a comment; blank
// lines are skipped). Under out_sum_1 the probability column is optional
// (default weight 1) and each node's out-weights are normalized to sum 1;
// under none the column is mandatory and must lie in [0, 1].
Loaded load_edge_list(std::istream& in, Scaling scaling, std::uint64_t seed);

}  // namespace subsam
