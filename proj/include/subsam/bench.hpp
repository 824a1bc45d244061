#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "subsam/counters.hpp"
#include "subsam/lookup_table.hpp"
#include "subsam/workload.hpp"

namespace subsam {

// Long-format measurement row. Numeric fields serialize with 6 significant
// digits, which round-trips through parse + reserialize byte-exactly.
struct CsvRow {
  std::string method;
  std::uint64_t n = 0;
  double mu = 0.0;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
};

std::string format_g6(double x);
void write_csv(std::ostream& os, const std::vector<CsvRow>& rows, bool header = true);
std::vector<CsvRow> read_csv(std::istream& is);

// Uniform dynamic interface over the competing samplers, as driven by the
// benchmarks. Methods: "naive", "hybrid", "odss", "basic" (query-only).
class DynamicSubsetSampler {
 public:
  virtual ~DynamicSubsetSampler() = default;
  virtual void query(std::vector<std::uint64_t>& out) = 0;
  virtual void insert(std::uint64_t id, double prob) = 0;
  virtual void erase(std::uint64_t id) = 0;
  virtual void modify(std::uint64_t id, double prob) = 0;
  virtual std::size_t size() const = 0;
  virtual std::uint64_t rng_invocations() const = 0;
  // Non-null only for samplers that meter structural work.
  virtual const Counters* counters() const { return nullptr; }
};

std::unique_ptr<DynamicSubsetSampler> make_sampler(
    const std::string& method, const std::vector<std::uint64_t>& ids,
    const std::vector<double>& probs, std::uint64_t n_cap, std::uint64_t seed,
    RowRepr repr = RowRepr::cdf);

struct BenchRecord {
  std::string method;
  std::uint64_t n = 0;
  double mu = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> metrics;

  std::vector<CsvRow> rows() const;
};

// Times `repeats` queries split over >= 5 batches; reports per-query mean
// and median-of-batch-means nanoseconds plus draw counts per query.
BenchRecord bench_query(const std::string& method, const WorkloadSpec& spec,
                        std::uint64_t repeats, RowRepr repr = RowRepr::cdf);

// Times `ops` delete+insert pairs (occupancy returns to n after each pair).
// Rejects query-only methods.
BenchRecord bench_update(const std::string& method, const WorkloadSpec& spec,
                         std::uint64_t ops, RowRepr repr = RowRepr::cdf);

// Max absolute deviation between empirical inclusion frequency and stored
// probability over the live elements, after `repeats` queries.
double empirical_error(DynamicSubsetSampler& sampler,
                       const std::vector<std::pair<std::uint64_t, double>>& live,
                       std::uint64_t repeats);

// Full error protocol: build from the workload, optionally apply
// update_count insertions followed by update_count deletions (inserted
// probabilities drawn uniformly from the live empirical values, deletions
// uniform over live elements), then measure empirical_error over `repeats`
// queries.
double error_protocol(const std::string& method, const WorkloadSpec& spec,
                      std::uint64_t repeats, std::uint64_t update_count,
                      bool dynamic_phase = true, RowRepr repr = RowRepr::cdf);

}  // namespace subsam
