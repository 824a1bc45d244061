#include "subsam/odss.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace subsam {

namespace {

std::uint64_t level1_capacity(std::uint64_t n_cap) {
  // Level 1 holds one pseudo-element per level-0 bucket.
  return static_cast<std::uint64_t>(n_cap <= 1 ? 1 : std::bit_width(n_cap - 1)) + 1;
}

}  // namespace

int log2_star(double n) {
  int count = 0;
  while (n > 1.0) {
    n = std::log2(n);
    ++count;
  }
  return count;
}

OdssSampler::OdssSampler(const std::vector<std::uint64_t>& ids,
                         const std::vector<double>& probs, std::uint64_t n_cap,
                         std::uint64_t seed, RowRepr repr, std::size_t row_cache_rows)
    : n_cap_(n_cap),
      m_(0),
      level0_(n_cap == 0 ? 1 : n_cap),
      level1_(level1_capacity(n_cap == 0 ? 1 : n_cap)),
      repr_(repr),
      cache_rows_(row_cache_rows),
      cache_(row_cache_rows, repr),
      src_(seed) {
  if (n_cap == 0) throw std::invalid_argument("OdssSampler: n_cap must be positive");
  if (ids.size() != probs.size()) {
    throw std::invalid_argument("OdssSampler: ids/probs size mismatch");
  }
  if (ids.size() > n_cap) throw std::length_error("OdssSampler: more elements than n_cap");
  m_ = level1_.group_count();
  build(ids, probs);
}

void OdssSampler::build(const std::vector<std::uint64_t>& ids,
                        const std::vector<double>& probs) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    level0_.insert(ids[i], probs[i], counters_);
  }
  // Every level-0 bucket is represented at level 1, empty ones with mass 0,
  // so level widths never depend on which buckets happen to be occupied.
  for (int k = 1; k <= level0_.group_count(); ++k) {
    level1_.insert(static_cast<std::uint64_t>(k), level0_.group_prob(k), counters_);
  }
  level2_probs_.resize(static_cast<std::size_t>(m_));
  for (int j = 1; j <= m_; ++j) {
    level2_probs_[static_cast<std::size_t>(j - 1)] = level1_.group_prob(j);
  }
  digits_ = digits_from_probs(level2_probs_, m_);
  row_index_ = row_index(digits_, m_);
}

void OdssSampler::rebuild(std::uint64_t new_cap) {
  std::vector<std::uint64_t> ids;
  std::vector<double> probs;
  ids.reserve(level0_.size());
  probs.reserve(level0_.size());
  for (int k = 1; k <= level0_.group_count(); ++k) {
    for (const ElementSlot& s : level0_.group_slots(k)) {
      ids.push_back(s.id);
      probs.push_back(s.prob);
    }
  }
  n_cap_ = new_cap;
  level0_ = GroupedLevel(new_cap);
  level1_ = GroupedLevel(level1_capacity(new_cap));
  m_ = level1_.group_count();
  level2_probs_.clear();
  cache_ = RowCache(cache_rows_, repr_);
  build(ids, probs);
}

void OdssSampler::sync_from_group(int k) {
  double pg = level0_.group_prob(k);
  auto [from, to] = level1_.update_prob(static_cast<std::uint64_t>(k), pg, counters_);
  if (from != to) {
    // The pseudo-element migrated: two level-1 buckets changed size, so
    // their success probabilities — and possibly their digits — moved.
    refresh_level2(from);
    refresh_level2(to);
  }
}

void OdssSampler::refresh_level2(int j) {
  double p2 = level1_.group_prob(j);
  level2_probs_[static_cast<std::size_t>(j - 1)] = p2;
  int d_new = digit_of(p2, m_);
  int& d_ref = digits_[static_cast<std::size_t>(j - 1)];
  if (d_new != d_ref) {
    row_index_ = adjust_index(row_index_, j, d_ref, d_new, m_);
    d_ref = d_new;
    ++counters_.slot_writes;
  }
}

void OdssSampler::insert(std::uint64_t id, double prob) {
  if (level0_.size() >= n_cap_) throw std::length_error("insert: capacity exhausted");
  int k = level0_.insert(id, prob, counters_);
  sync_from_group(k);
}

void OdssSampler::insert_or_grow(std::uint64_t id, double prob) {
  if (level0_.size() >= n_cap_) rebuild(n_cap_ * 2);
  insert(id, prob);
}

void OdssSampler::erase(std::uint64_t id) {
  int k = level0_.erase(id, counters_);
  sync_from_group(k);
}

void OdssSampler::modify(std::uint64_t id, double prob) {
  erase(id);
  insert(id, prob);
}

void OdssSampler::query(std::vector<std::uint64_t>& out) {
  out.clear();
  l2buf_.clear();
  l1buf_.clear();
  table_query(level2_probs_, digits_, row_index_, cache_, src_, counters_, l2buf_);
  for (int pos : l2buf_) {
    level1_.sample_within(pos + 1, src_, l1buf_, counters_);
  }
  for (std::uint64_t g : l1buf_) {
    level0_.sample_within(static_cast<int>(g), src_, out, counters_);
  }
}

std::vector<std::uint64_t> OdssSampler::query() {
  std::vector<std::uint64_t> out;
  query(out);
  return out;
}

double OdssSampler::level_mass(int level) const {
  switch (level) {
    case 0:
      return level0_.mass();
    case 1:
      return level1_.recompute_mass();  // <= K0 terms, exact enough
    case 2: {
      double sum = 0.0;
      for (double p : level2_probs_) sum += p;
      return sum;
    }
    default:
      throw std::out_of_range("level_mass: level must be 0, 1 or 2");
  }
}

bool OdssSampler::level_mass_bounded() const {
  double mu = level_mass(0);
  return level_mass(1) <= 2.0 * mu + 1.0 && level_mass(2) <= 4.0 * mu + 3.0;
}

bool OdssSampler::verify_links(double tol) const {
  for (int k = 1; k <= level0_.group_count(); ++k) {
    if (std::fabs(level1_.prob_of(static_cast<std::uint64_t>(k)) -
                  level0_.group_prob(k)) > tol) {
      return false;
    }
  }
  for (int j = 1; j <= m_; ++j) {
    if (std::fabs(level2_probs_[static_cast<std::size_t>(j - 1)] -
                  level1_.group_prob(j)) > tol) {
      return false;
    }
  }
  if (digits_ != digits_from_probs(level2_probs_, m_)) return false;
  if (row_index_ != row_index(digits_, m_)) return false;
  if (std::fabs(level0_.mass() - level0_.recompute_mass()) > tol * (1.0 + level0_.size())) {
    return false;
  }
  return true;
}

BasicSampler::BasicSampler(const std::vector<std::uint64_t>& ids,
                           const std::vector<double>& probs, std::uint64_t seed,
                           int levels)
    : src_(seed) {
  if (ids.size() != probs.size()) {
    throw std::invalid_argument("BasicSampler: ids/probs size mismatch");
  }
  if (levels < 0) throw std::invalid_argument("BasicSampler: levels must be >= 0");
  int depth = levels;
  if (depth == 0) {
    depth = log2_star(static_cast<double>(ids.size()));
    if (depth < 1) depth = 1;
  }
  Counters scratch;
  std::vector<std::uint64_t> cur_ids = ids;
  std::vector<double> cur_probs = probs;
  for (int l = 0; l < depth; ++l) {
    GroupedLevel& level = levels_.emplace_back(
        cur_ids.empty() ? 1 : static_cast<std::uint64_t>(cur_ids.size()));
    for (std::size_t i = 0; i < cur_ids.size(); ++i) {
      level.insert(cur_ids[i], cur_probs[i], scratch);
    }
    cur_ids.clear();
    cur_probs.clear();
    for (int k = 1; k <= level.group_count(); ++k) {
      cur_ids.push_back(static_cast<std::uint64_t>(k));
      cur_probs.push_back(level.group_prob(k));
    }
  }
  top_probs_ = std::move(cur_probs);
}

std::size_t BasicSampler::size() const { return levels_.front().size(); }

double BasicSampler::level_mass(int level) const {
  if (level < 0 || level > levels()) throw std::out_of_range("level_mass: bad level");
  if (level == levels()) {
    double sum = 0.0;
    for (double p : top_probs_) sum += p;
    return sum;
  }
  return levels_[static_cast<std::size_t>(level)].recompute_mass();
}

void BasicSampler::query(std::vector<std::uint64_t>& out) {
  out.clear();
  bufa_.clear();
  // Coin-flip pass over the top-level bucket probabilities.
  for (std::size_t k = 0; k < top_probs_.size(); ++k) {
    double p = top_probs_[k];
    bool take;
    if (p <= 0.0) {
      take = false;
    } else if (p >= 1.0) {
      take = true;
    } else {
      std::uint64_t before = src_.invocations();
      take = src_.uniform01() < p;
      counters_.rng_draws += src_.invocations() - before;
    }
    if (take) bufa_.push_back(static_cast<std::uint64_t>(k + 1));
  }
  // Descend: bucket ids at level l resolve to element ids of level l, which
  // are bucket ids of level l-1 (and user ids at level 0).
  for (int l = levels() - 1; l >= 0; --l) {
    bufb_.clear();
    for (std::uint64_t k : bufa_) {
      levels_[static_cast<std::size_t>(l)].sample_within(static_cast<int>(k), src_, bufb_, counters_);
    }
    bufa_.swap(bufb_);
  }
  out = bufa_;
}

std::vector<std::uint64_t> BasicSampler::query() {
  std::vector<std::uint64_t> out;
  query(out);
  return out;
}

}  // namespace subsam
