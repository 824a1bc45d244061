#include "subsam/graph.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace subsam {

namespace {

std::uint64_t next_pow2(std::uint64_t x) {
  return x <= 1 ? 1 : std::uint64_t{1} << std::bit_width(x - 1);
}

}  // namespace

DynamicGraph::DynamicGraph(std::size_t node_count, std::uint64_t seed)
    : seed_(seed),
      out_adj_(node_count),
      in_adj_(node_count),
      start_src_(mix_seed(seed, 0x5747)),
      visit_epoch_(node_count, 0) {
  if (node_count == 0) throw std::invalid_argument("DynamicGraph: need at least one node");
}

void DynamicGraph::check_node(std::uint32_t v) const {
  if (v >= out_adj_.size()) throw std::out_of_range("node id out of range");
}

void DynamicGraph::side_insert(NodeSide& side, std::uint32_t nbr, double prob,
                               std::uint64_t seed) {
  if (!side.sampler) {
    side.sampler = std::make_unique<OdssSampler>(
        std::vector<std::uint64_t>{}, std::vector<double>{},
        next_pow2(side.adj.size() + 1), seed);
  }
  side.adj.emplace(nbr, prob);
  side.sampler->insert_or_grow(nbr, prob);
}

void DynamicGraph::side_erase(NodeSide& side, std::uint32_t nbr) {
  side.adj.erase(nbr);
  side.sampler->erase(nbr);
}

bool DynamicGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
  check_node(u);
  check_node(v);
  return out_adj_[u].adj.count(v) != 0;
}

double DynamicGraph::edge_prob(std::uint32_t u, std::uint32_t v) const {
  check_node(u);
  check_node(v);
  auto it = out_adj_[u].adj.find(v);
  if (it == out_adj_[u].adj.end()) throw std::invalid_argument("edge_prob: no such edge");
  return it->second;
}

std::size_t DynamicGraph::out_degree(std::uint32_t u) const {
  check_node(u);
  return out_adj_[u].adj.size();
}

std::size_t DynamicGraph::in_degree(std::uint32_t v) const {
  check_node(v);
  return in_adj_[v].adj.size();
}

void DynamicGraph::insert_edge(std::uint32_t u, std::uint32_t v, double prob) {
  check_node(u);
  check_node(v);
  if (!(prob >= 0.0) || prob > 1.0) {
    throw std::invalid_argument("insert_edge: probability must be in [0, 1]");
  }
  if (out_adj_[u].adj.count(v)) throw std::invalid_argument("insert_edge: duplicate edge");
  side_insert(out_adj_[u], v, prob, mix_seed(seed_, 2 * u));
  side_insert(in_adj_[v], u, prob, mix_seed(seed_, 2 * std::uint64_t{v} + 1));
  ++edge_count_;
}

void DynamicGraph::delete_edge(std::uint32_t u, std::uint32_t v) {
  check_node(u);
  check_node(v);
  if (!out_adj_[u].adj.count(v)) throw std::invalid_argument("delete_edge: no such edge");
  side_erase(out_adj_[u], v);
  side_erase(in_adj_[v], u);
  --edge_count_;
}

void DynamicGraph::possible_world(
    std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
  out.clear();
  for (std::uint32_t u = 0; u < out_adj_.size(); ++u) {
    NodeSide& side = out_adj_[u];
    if (side.adj.empty()) continue;
    side.sampler->query(nbr_buf_);
    for (std::uint64_t v : nbr_buf_) {
      out.emplace_back(u, static_cast<std::uint32_t>(v));
    }
  }
}

void DynamicGraph::rr_set(std::vector<std::uint32_t>& out) {
  rr_set_from(static_cast<std::uint32_t>(start_src_.uniform_int(out_adj_.size())), out);
}

void DynamicGraph::rr_set_from(std::uint32_t start, std::vector<std::uint32_t>& out) {
  check_node(start);
  out.clear();
  ++epoch_;
  if (epoch_ == 0) {  // counter wrapped: reset stamps once
    std::fill(visit_epoch_.begin(), visit_epoch_.end(), 0);
    epoch_ = 1;
  }
  visit_epoch_[start] = epoch_;
  out.push_back(start);
  // out doubles as the BFS queue: nodes are activated exactly once.
  for (std::size_t head = 0; head < out.size(); ++head) {
    NodeSide& side = in_adj_[out[head]];
    if (side.adj.empty()) continue;
    side.sampler->query(nbr_buf_);
    for (std::uint64_t raw : nbr_buf_) {
      auto u = static_cast<std::uint32_t>(raw);
      if (visit_epoch_[u] == epoch_) continue;
      visit_epoch_[u] = epoch_;
      out.push_back(u);
    }
  }
}

Loaded load_edge_list(std::istream& in, Scaling scaling, std::uint64_t seed) {
  std::vector<Edge> edges;
  std::unordered_map<std::uint64_t, std::size_t> seen;  // (u,v) -> first line
  std::uint64_t max_node = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::uint64_t u = 0, v = 0;
    if (!(ss >> u)) {
      std::string stray;
      if (ss.clear(), ss >> stray) {
        throw std::runtime_error("load_edge_list: line " + std::to_string(lineno) +
                                 ": malformed node id");
      }
      continue;  // blank or comment-only line
    }
    if (!(ss >> v)) {
      throw std::runtime_error("load_edge_list: line " + std::to_string(lineno) +
                               ": missing target node");
    }
    double p = 1.0;
    bool have_p = static_cast<bool>(ss >> p);
    if (!have_p) {
      ss.clear();
      if (scaling == Scaling::none) {
        throw std::runtime_error("load_edge_list: line " + std::to_string(lineno) +
                                 ": missing probability (required without scaling)");
      }
    }
    std::string stray;
    if (ss >> stray) {
      throw std::runtime_error("load_edge_list: line " + std::to_string(lineno) +
                               ": trailing tokens");
    }
    if (scaling == Scaling::none && (!(p >= 0.0) || p > 1.0)) {
      throw std::runtime_error("load_edge_list: line " + std::to_string(lineno) +
                               ": probability outside [0, 1]");
    }
    if (scaling == Scaling::out_sum_1 && !(p >= 0.0)) {
      throw std::runtime_error("load_edge_list: line " + std::to_string(lineno) +
                               ": negative weight");
    }
    max_node = std::max({max_node, u, v});
    if (max_node >= (std::uint64_t{1} << 32)) {
      throw std::runtime_error("load_edge_list: node ids must fit in 32 bits");
    }
    auto [dup, fresh] = seen.emplace((u << 32) | v, lineno);
    if (!fresh) {
      throw std::runtime_error("load_edge_list: line " + std::to_string(lineno) +
                               ": duplicate edge (first at line " +
                               std::to_string(dup->second) + ")");
    }
    edges.push_back(Edge{static_cast<std::uint32_t>(u),
                         static_cast<std::uint32_t>(v), p});
  }
  if (edges.empty()) throw std::runtime_error("load_edge_list: no edges in input");

  if (scaling == Scaling::out_sum_1) {
    std::unordered_map<std::uint32_t, double> out_sum;
    for (const Edge& e : edges) out_sum[e.from] += e.prob;
    for (Edge& e : edges) {
      double s = out_sum[e.from];
      if (s <= 0.0) {
        throw std::runtime_error("load_edge_list: node " + std::to_string(e.from) +
                                 " has zero total out-weight");
      }
      e.prob /= s;
    }
  }

  Loaded loaded{std::make_unique<DynamicGraph>(static_cast<std::size_t>(max_node) + 1, seed),
                std::move(edges)};
  for (const Edge& e : loaded.edges) loaded.graph->insert_edge(e.from, e.to, e.prob);
  return loaded;
}

}  // namespace subsam
