#include "subsam/baselines.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace subsam {

namespace {

void check_prob(double p) {
  if (!(p >= 0.0) || p > 1.0) {
    throw std::invalid_argument("probability must be in [0, 1]");
  }
}

// Recomputes the mean/threshold split after any membership change.
void repartition(HybridState& st) {
  st.x_members.clear();
  st.y_members.clear();
  if (st.probs.empty()) {
    st.mean_prob = 0.0;
    st.threshold = 0.0;
    return;
  }
  st.mean_prob = std::accumulate(st.probs.begin(), st.probs.end(), 0.0) /
                 static_cast<double>(st.probs.size());
  st.threshold = std::sqrt(st.mean_prob);
  for (std::size_t i = 0; i < st.probs.size(); ++i) {
    // Ties at the threshold go to the geometric bucket.
    if (st.probs[i] <= st.threshold) {
      st.x_members.push_back(i);
    } else {
      st.y_members.push_back(i);
    }
  }
}

}  // namespace

std::vector<std::size_t> naive_query(const std::vector<double>& probs, RandomSource& src) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    check_prob(probs[i]);
    if (src.uniform01() < probs[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> geoss_query(std::size_t n, double p, RandomSource& src) {
  check_prob(p);
  std::vector<std::size_t> out;
  if (p == 0.0 || n == 0) return out;
  std::uint64_t pos = 0;
  while (true) {
    std::uint64_t j = src.geometric(p);
    if (j > n - pos) break;
    pos += j;
    out.push_back(static_cast<std::size_t>(pos - 1));
    if (pos == n) break;
  }
  return out;
}

HybridState hybrid_build(const std::vector<std::uint64_t>& ids,
                         const std::vector<double>& probs) {
  if (ids.size() != probs.size()) {
    throw std::invalid_argument("hybrid_build: ids/probs size mismatch");
  }
  HybridState st;
  st.ids = ids;
  st.probs = probs;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    check_prob(probs[i]);
    if (!st.pos.emplace(ids[i], i).second) {
      throw std::invalid_argument("hybrid_build: duplicate id");
    }
  }
  repartition(st);
  return st;
}

void hybrid_query(const HybridState& st, RandomSource& src,
                  std::vector<std::uint64_t>& out, HybridQueryStats* stats) {
  out.clear();
  if (stats) {
    stats->x_candidates.assign(st.x_members.size(), 0);
    stats->x_accepts.assign(st.x_members.size(), 0);
  }
  const double t = st.threshold;
  if (t > 0.0 && !st.x_members.empty()) {
    const std::uint64_t nx = st.x_members.size();
    std::uint64_t pos = 0;
    while (true) {
      std::uint64_t j = src.geometric(t);
      if (j > nx - pos) break;
      pos += j;
      std::size_t slot = st.x_members[static_cast<std::size_t>(pos - 1)];
      if (stats) ++stats->x_candidates[pos - 1];
      double p = st.probs[slot];
      bool accept = p > 0.0 && (p >= t || src.uniform01() < p / t);
      if (accept) {
        out.push_back(st.ids[slot]);
        if (stats) ++stats->x_accepts[pos - 1];
      }
      if (pos == nx) break;
    }
  }
  for (std::size_t slot : st.y_members) {
    if (src.uniform01() < st.probs[slot]) out.push_back(st.ids[slot]);
  }
}

void hybrid_insert(HybridState& st, std::uint64_t id, double prob) {
  check_prob(prob);
  if (st.pos.count(id)) throw std::invalid_argument("hybrid_insert: duplicate id");
  st.pos.emplace(id, st.ids.size());
  st.ids.push_back(id);
  st.probs.push_back(prob);
  repartition(st);
}

void hybrid_erase(HybridState& st, std::uint64_t id) {
  auto it = st.pos.find(id);
  if (it == st.pos.end()) throw std::invalid_argument("hybrid_erase: unknown id");
  std::size_t i = it->second;
  std::size_t last = st.ids.size() - 1;
  if (i != last) {
    st.ids[i] = st.ids[last];
    st.probs[i] = st.probs[last];
    st.pos[st.ids[i]] = i;
  }
  st.ids.pop_back();
  st.probs.pop_back();
  st.pos.erase(it);
  repartition(st);
}

void hybrid_modify(HybridState& st, std::uint64_t id, double prob) {
  check_prob(prob);
  auto it = st.pos.find(id);
  if (it == st.pos.end()) throw std::invalid_argument("hybrid_modify: unknown id");
  st.probs[it->second] = prob;
  repartition(st);
}

}  // namespace subsam
