#include "subsam/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "subsam/baselines.hpp"
#include "subsam/odss.hpp"
#include "subsam/rng.hpp"

namespace subsam {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::nano>(b - a).count();
}

class NaiveDyn final : public DynamicSubsetSampler {
 public:
  NaiveDyn(const std::vector<std::uint64_t>& ids, const std::vector<double>& probs,
           std::uint64_t seed)
      : src_(seed) {
    ids_ = ids;
    probs_ = probs;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!pos_.emplace(ids_[i], i).second) {
        throw std::invalid_argument("naive: duplicate id");
      }
      if (!(probs_[i] >= 0.0) || probs_[i] > 1.0) {
        throw std::invalid_argument("naive: probability out of range");
      }
    }
  }

  void query(std::vector<std::uint64_t>& out) override {
    out.clear();
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (src_.uniform01() < probs_[i]) out.push_back(ids_[i]);
    }
  }

  void insert(std::uint64_t id, double prob) override {
    if (!(prob >= 0.0) || prob > 1.0) throw std::invalid_argument("naive: probability out of range");
    if (!pos_.emplace(id, ids_.size()).second) {
      throw std::invalid_argument("naive: duplicate id");
    }
    ids_.push_back(id);
    probs_.push_back(prob);
  }

  void erase(std::uint64_t id) override {
    auto it = pos_.find(id);
    if (it == pos_.end()) throw std::invalid_argument("naive: unknown id");
    std::size_t i = it->second;
    std::size_t last = ids_.size() - 1;
    if (i != last) {
      ids_[i] = ids_[last];
      probs_[i] = probs_[last];
      pos_[ids_[i]] = i;
    }
    ids_.pop_back();
    probs_.pop_back();
    pos_.erase(it);
  }

  void modify(std::uint64_t id, double prob) override {
    if (!(prob >= 0.0) || prob > 1.0) throw std::invalid_argument("naive: probability out of range");
    auto it = pos_.find(id);
    if (it == pos_.end()) throw std::invalid_argument("naive: unknown id");
    probs_[it->second] = prob;
  }

  std::size_t size() const override { return ids_.size(); }
  std::uint64_t rng_invocations() const override { return src_.invocations(); }

 private:
  std::vector<std::uint64_t> ids_;
  std::vector<double> probs_;
  std::unordered_map<std::uint64_t, std::size_t> pos_;
  RandomSource src_;
};

class HybridDyn final : public DynamicSubsetSampler {
 public:
  HybridDyn(const std::vector<std::uint64_t>& ids, const std::vector<double>& probs,
            std::uint64_t seed)
      : st_(hybrid_build(ids, probs)), src_(seed) {}

  void query(std::vector<std::uint64_t>& out) override { hybrid_query(st_, src_, out); }
  void insert(std::uint64_t id, double prob) override { hybrid_insert(st_, id, prob); }
  void erase(std::uint64_t id) override { hybrid_erase(st_, id); }
  void modify(std::uint64_t id, double prob) override { hybrid_modify(st_, id, prob); }
  std::size_t size() const override { return st_.ids.size(); }
  std::uint64_t rng_invocations() const override { return src_.invocations(); }

 private:
  HybridState st_;
  RandomSource src_;
};

class OdssDyn final : public DynamicSubsetSampler {
 public:
  OdssDyn(const std::vector<std::uint64_t>& ids, const std::vector<double>& probs,
          std::uint64_t n_cap, std::uint64_t seed, RowRepr repr)
      : sampler_(ids, probs, n_cap, seed, repr) {}

  void query(std::vector<std::uint64_t>& out) override { sampler_.query(out); }
  void insert(std::uint64_t id, double prob) override { sampler_.insert(id, prob); }
  void erase(std::uint64_t id) override { sampler_.erase(id); }
  void modify(std::uint64_t id, double prob) override { sampler_.modify(id, prob); }
  std::size_t size() const override { return sampler_.size(); }
  std::uint64_t rng_invocations() const override { return sampler_.rng_invocations(); }
  const Counters* counters() const override { return &sampler_.counters(); }

 private:
  OdssSampler sampler_;
};

class BasicDyn final : public DynamicSubsetSampler {
 public:
  BasicDyn(const std::vector<std::uint64_t>& ids, const std::vector<double>& probs,
           std::uint64_t seed)
      : sampler_(ids, probs, seed) {}

  void query(std::vector<std::uint64_t>& out) override { sampler_.query(out); }
  void insert(std::uint64_t, double) override { reject(); }
  void erase(std::uint64_t) override { reject(); }
  void modify(std::uint64_t, double) override { reject(); }
  std::size_t size() const override { return sampler_.size(); }
  std::uint64_t rng_invocations() const override { return sampler_.rng_invocations(); }
  const Counters* counters() const override { return &sampler_.counters(); }

 private:
  [[noreturn]] static void reject() {
    throw std::invalid_argument("basic: query-only method does not support updates");
  }
  BasicSampler sampler_;
};

std::vector<std::uint64_t> iota_ids(std::uint64_t n) {
  std::vector<std::uint64_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::uint64_t{0});
  return ids;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string format_g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows, bool header) {
  if (header) os << "method,n,mu,metric,value,seed\n";
  for (const CsvRow& r : rows) {
    os << r.method << ',' << r.n << ',' << format_g6(r.mu) << ',' << r.metric
       << ',' << format_g6(r.value) << ',' << r.seed << '\n';
  }
}

std::vector<CsvRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "method,n,mu,metric,value,seed") {
    throw std::runtime_error("read_csv: missing or malformed header");
  }
  std::vector<CsvRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    CsvRow r;
    std::string field;
    auto next = [&](const char* what) {
      if (!std::getline(ss, field, ',')) {
        throw std::runtime_error("read_csv: line " + std::to_string(lineno) +
                                 ": missing field " + what);
      }
      return field;
    };
    try {
      r.method = next("method");
      r.n = std::stoull(next("n"));
      r.mu = std::stod(next("mu"));
      r.metric = next("metric");
      r.value = std::stod(next("value"));
      r.seed = std::stoull(next("seed"));
    } catch (const std::logic_error&) {
      throw std::runtime_error("read_csv: line " + std::to_string(lineno) +
                               ": malformed numeric field");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::unique_ptr<DynamicSubsetSampler> make_sampler(
    const std::string& method, const std::vector<std::uint64_t>& ids,
    const std::vector<double>& probs, std::uint64_t n_cap, std::uint64_t seed,
    RowRepr repr) {
  if (method == "naive") return std::make_unique<NaiveDyn>(ids, probs, seed);
  if (method == "hybrid") return std::make_unique<HybridDyn>(ids, probs, seed);
  if (method == "odss") return std::make_unique<OdssDyn>(ids, probs, n_cap, seed, repr);
  if (method == "basic") return std::make_unique<BasicDyn>(ids, probs, seed);
  throw std::invalid_argument("unknown method: " + method);
}

std::vector<CsvRow> BenchRecord::rows() const {
  std::vector<CsvRow> out;
  out.reserve(metrics.size());
  for (const auto& [metric, value] : metrics) {
    out.push_back(CsvRow{method, n, mu, metric, value, seed});
  }
  return out;
}

BenchRecord bench_query(const std::string& method, const WorkloadSpec& spec,
                        std::uint64_t repeats, RowRepr repr) {
  if (repeats == 0) throw std::invalid_argument("bench_query: repeats must be positive");
  std::vector<double> probs = gen_workload(spec);
  auto ids = iota_ids(spec.n);
  auto sampler = make_sampler(method, ids, probs, spec.n, mix_seed(spec.seed, 1), repr);

  std::vector<std::uint64_t> out;
  sampler->query(out);  // warm-up: faults in structures and lazy rows

  const std::uint64_t batches = 5;
  std::uint64_t per_batch = (repeats + batches - 1) / batches;
  std::vector<double> batch_means;
  double total_ns = 0.0;
  std::uint64_t total_queries = 0;
  std::uint64_t inv_before = sampler->rng_invocations();
  Counters c_before;
  if (sampler->counters()) c_before = *sampler->counters();
  double output_sum = 0.0;
  for (std::uint64_t b = 0; b < batches; ++b) {
    auto t0 = Clock::now();
    for (std::uint64_t i = 0; i < per_batch; ++i) {
      sampler->query(out);
      output_sum += static_cast<double>(out.size());
    }
    auto t1 = Clock::now();
    double ns = elapsed_ns(t0, t1);
    batch_means.push_back(ns / static_cast<double>(per_batch));
    total_ns += ns;
    total_queries += per_batch;
  }

  BenchRecord rec;
  rec.method = method;
  rec.n = spec.n;
  rec.mu = spec.mu_target;
  rec.seed = spec.seed;
  auto per_query = static_cast<double>(total_queries);
  rec.metrics.emplace_back("query_ns_mean", total_ns / per_query);
  rec.metrics.emplace_back("query_ns_median", median(batch_means));
  rec.metrics.emplace_back("output_size_mean", output_sum / per_query);
  rec.metrics.emplace_back(
      "rng_invocations_per_query",
      static_cast<double>(sampler->rng_invocations() - inv_before) / per_query);
  if (const Counters* c = sampler->counters()) {
    Counters d = *c - c_before;
    rec.metrics.emplace_back("rng_draws_per_query",
                             static_cast<double>(d.rng_draws) / per_query);
    rec.metrics.emplace_back("candidates_per_query",
                             static_cast<double>(d.candidates_generated) / per_query);
  }
  return rec;
}

BenchRecord bench_update(const std::string& method, const WorkloadSpec& spec,
                         std::uint64_t ops, RowRepr repr) {
  if (ops == 0) throw std::invalid_argument("bench_update: ops must be positive");
  if (method == "basic") {
    throw std::invalid_argument("bench_update: basic is query-only");
  }
  std::vector<double> probs = gen_workload(spec);
  auto ids = iota_ids(spec.n);
  auto sampler = make_sampler(method, ids, probs, spec.n, mix_seed(spec.seed, 1), repr);

  // Update stream: delete a uniformly random live element, then insert a
  // fresh id with a probability copied uniformly from the workload.
  RandomSource drive(mix_seed(spec.seed, 2));
  std::vector<std::uint64_t> live = ids;
  std::uint64_t next_id = spec.n;

  const std::uint64_t batches = 5;
  std::uint64_t per_batch = (ops + batches - 1) / batches;
  std::vector<double> batch_means;
  double total_ns = 0.0;
  std::uint64_t total_ops = 0;
  Counters c_before;
  if (sampler->counters()) c_before = *sampler->counters();
  for (std::uint64_t b = 0; b < batches; ++b) {
    auto t0 = Clock::now();
    for (std::uint64_t i = 0; i < per_batch; ++i) {
      std::size_t victim = static_cast<std::size_t>(drive.uniform_int(live.size()));
      sampler->erase(live[victim]);
      double p = probs[static_cast<std::size_t>(drive.uniform_int(probs.size()))];
      std::uint64_t id = next_id++;
      sampler->insert(id, p);
      live[victim] = id;
    }
    auto t1 = Clock::now();
    double ns = elapsed_ns(t0, t1);
    batch_means.push_back(ns / (2.0 * static_cast<double>(per_batch)));
    total_ns += ns;
    total_ops += 2 * per_batch;
  }

  BenchRecord rec;
  rec.method = method;
  rec.n = spec.n;
  rec.mu = spec.mu_target;
  rec.seed = spec.seed;
  rec.metrics.emplace_back("update_ns_mean", total_ns / static_cast<double>(total_ops));
  rec.metrics.emplace_back("update_ns_median", median(batch_means));
  if (const Counters* c = sampler->counters()) {
    Counters d = *c - c_before;
    rec.metrics.emplace_back("slot_writes_per_update",
                             static_cast<double>(d.slot_writes) /
                                 static_cast<double>(total_ops));
  }
  return rec;
}

double empirical_error(DynamicSubsetSampler& sampler,
                       const std::vector<std::pair<std::uint64_t, double>>& live,
                       std::uint64_t repeats) {
  if (repeats == 0) throw std::invalid_argument("empirical_error: repeats must be positive");
  std::unordered_map<std::uint64_t, std::uint64_t> tally;
  tally.reserve(live.size() * 2);
  std::vector<std::uint64_t> out;
  for (std::uint64_t r = 0; r < repeats; ++r) {
    sampler.query(out);
    for (std::uint64_t id : out) ++tally[id];
  }
  double worst = 0.0;
  for (const auto& [id, p] : live) {
    auto it = tally.find(id);
    double freq = it == tally.end()
                      ? 0.0
                      : static_cast<double>(it->second) / static_cast<double>(repeats);
    worst = std::max(worst, std::fabs(freq - p));
  }
  return worst;
}

double error_protocol(const std::string& method, const WorkloadSpec& spec,
                      std::uint64_t repeats, std::uint64_t update_count,
                      bool dynamic_phase, RowRepr repr) {
  std::vector<double> probs = gen_workload(spec);
  auto ids = iota_ids(spec.n);
  auto sampler = make_sampler(method, ids, probs, spec.n + update_count,
                              mix_seed(spec.seed, 3), repr);

  std::vector<std::pair<std::uint64_t, double>> live;
  live.reserve(spec.n + update_count);
  for (std::uint64_t i = 0; i < spec.n; ++i) live.emplace_back(ids[i], probs[i]);

  if (dynamic_phase) {
    RandomSource drive(mix_seed(spec.seed, 4));
    for (std::uint64_t i = 0; i < update_count; ++i) {
      double p = live[static_cast<std::size_t>(drive.uniform_int(live.size()))].second;
      std::uint64_t id = spec.n + i;
      sampler->insert(id, p);
      live.emplace_back(id, p);
    }
    for (std::uint64_t i = 0; i < update_count; ++i) {
      std::size_t victim = static_cast<std::size_t>(drive.uniform_int(live.size()));
      sampler->erase(live[victim].first);
      live[victim] = live.back();
      live.pop_back();
    }
  }
  return empirical_error(*sampler, live, repeats);
}

}  // namespace subsam
