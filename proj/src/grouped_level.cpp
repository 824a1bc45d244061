#include "subsam/grouped_level.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace subsam {

namespace {

int ceil_log2_u64(std::uint64_t x) {
  return x <= 1 ? 0 : std::bit_width(x - 1);
}

void check_prob(double p) {
  if (!(p >= 0.0) || p > 1.0) {
    throw std::invalid_argument("probability must be in [0, 1]");
  }
}

}  // namespace

int group_index_of(double p, int group_count) {
  check_prob(p);
  if (group_count < 1) throw std::invalid_argument("group_count must be positive");
  if (p == 0.0) return group_count;
  int exp = 0;
  double f = std::frexp(p, &exp);  // p = f * 2^exp, f in [0.5, 1)
  // f == 0.5 means p is exactly 2^(exp-1), the upper boundary of its range.
  int k = (f == 0.5) ? 2 - exp : 1 - exp;
  if (k < 1) k = 1;
  return k > group_count ? group_count : k;
}

double group_success_prob(int k, std::size_t size) {
  if (k < 1) throw std::invalid_argument("group index must be positive");
  if (size == 0) return 0.0;
  double q = std::ldexp(1.0, 1 - k);
  if (q >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(size) * std::log1p(-q));
}

GroupedLevel::GroupedLevel(std::uint64_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("GroupedLevel: capacity must be positive");
  k_count_ = ceil_log2_u64(capacity) + 1;
  slots_.resize(static_cast<std::size_t>(k_count_));
  group_prob_.assign(static_cast<std::size_t>(k_count_), 0.0);
}

void GroupedLevel::check_group(int k) const {
  if (k < 1 || k > k_count_) throw std::out_of_range("group index out of range");
}

void GroupedLevel::mass_add(double x) {
  double y = x - mass_comp_;
  double t = mass_ + y;
  mass_comp_ = (t - mass_) - y;
  mass_ = t;
}

int GroupedLevel::insert(std::uint64_t id, double prob, Counters& c) {
  check_prob(prob);
  if (index_.count(id)) throw std::invalid_argument("insert: duplicate id");
  if (index_.size() >= capacity_) throw std::length_error("insert: capacity exhausted");
  int k = group_index_of(prob, k_count_);
  auto& arr = slots_[static_cast<std::size_t>(k - 1)];
  arr.push_back(ElementSlot{id, prob});
  ++c.slot_writes;
  index_.emplace(id, Pos{static_cast<std::uint32_t>(k),
                         static_cast<std::uint32_t>(arr.size() - 1)});
  group_prob_[static_cast<std::size_t>(k - 1)] = group_success_prob(k, arr.size());
  mass_add(prob);
  return k;
}

int GroupedLevel::erase(std::uint64_t id, Counters& c) {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("erase: unknown id");
  Pos pos = it->second;
  int k = static_cast<int>(pos.group);
  auto& arr = slots_[static_cast<std::size_t>(k - 1)];
  double prob = arr[pos.offset].prob;
  if (pos.offset + 1 != arr.size()) {
    arr[pos.offset] = arr.back();
    index_[arr[pos.offset].id].offset = pos.offset;
    ++c.slot_writes;
  }
  arr.pop_back();
  index_.erase(it);
  group_prob_[static_cast<std::size_t>(k - 1)] = group_success_prob(k, arr.size());
  mass_add(-prob);
  return k;
}

std::pair<int, int> GroupedLevel::update_prob(std::uint64_t id, double prob, Counters& c) {
  check_prob(prob);
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("update_prob: unknown id");
  int k_old = static_cast<int>(it->second.group);
  int k_new = group_index_of(prob, k_count_);
  auto& arr = slots_[static_cast<std::size_t>(k_old - 1)];
  if (k_new == k_old) {
    double before = arr[it->second.offset].prob;
    arr[it->second.offset].prob = prob;
    ++c.slot_writes;
    mass_add(prob - before);
    return {k_old, k_old};
  }
  erase(id, c);
  insert(id, prob, c);
  return {k_old, k_new};
}

double GroupedLevel::prob_of(std::uint64_t id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("prob_of: unknown id");
  return slots_[it->second.group - 1][it->second.offset].prob;
}

double GroupedLevel::group_bound(int k) const {
  check_group(k);
  return std::ldexp(1.0, 1 - k);
}

double GroupedLevel::group_prob(int k) const {
  check_group(k);
  return group_prob_[static_cast<std::size_t>(k - 1)];
}

std::size_t GroupedLevel::group_size(int k) const {
  check_group(k);
  return slots_[static_cast<std::size_t>(k - 1)].size();
}

const std::vector<ElementSlot>& GroupedLevel::group_slots(int k) const {
  check_group(k);
  return slots_[static_cast<std::size_t>(k - 1)];
}

double GroupedLevel::recompute_mass() const {
  double sum = 0.0, comp = 0.0;
  for (const auto& arr : slots_) {
    for (const ElementSlot& s : arr) {
      double y = s.prob - comp;
      double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
  }
  return sum;
}

void GroupedLevel::sample_within(int k, RandomSource& src,
                                 std::vector<std::uint64_t>& out, Counters& c) const {
  check_group(k);
  const auto& arr = slots_[static_cast<std::size_t>(k - 1)];
  if (arr.empty()) throw std::invalid_argument("sample_within: empty group");
  ++c.groups_visited;
  const double q = std::ldexp(1.0, 1 - k);
  const double pg = group_prob_[static_cast<std::size_t>(k - 1)];
  const std::uint64_t nk = arr.size();

  std::uint64_t before = src.invocations();
  std::uint64_t h = 0;
  std::uint64_t r = src.truncated_first(q, pg, nk);
  c.rng_draws += src.invocations() - before;

  while (h + r <= nk) {
    h += r;
    const ElementSlot& slot = arr[h - 1];
    ++c.candidates_generated;
    bool accept;
    if (slot.prob <= 0.0) {
      accept = false;  // zero mass: rejected without a coin flip
    } else if (slot.prob >= q) {
      accept = true;  // at the bucket bound: accepted without a coin flip
    } else {
      accept = src.uniform01() < slot.prob / q;
    }
    if (accept) {
      out.push_back(slot.id);
      ++c.acceptances;
    }
    if (h == nk) break;  // no further skip can land in range
    before = src.invocations();
    r = src.geometric(q);
    c.rng_draws += src.invocations() - before;
  }
}

}  // namespace subsam
