#pragma once

#include <cstdint>
#include <vector>

#include "rnnsched/cachesim.hpp"
#include "rnnsched/catalog.hpp"
#include "rnnsched/metrics.hpp"
#include "rnnsched/tracegen.hpp"

namespace rnnsched {

struct SimOptions {
  CacheConfig cache;
  Schedule schedule = Schedule::A;
  std::uint32_t warm_runs = 1;
  // Matvec blocking budget; 0 = half the cache capacity (or 6 MB when
  // the cache is unbounded).
  std::uint64_t block_bytes = 0;
};

struct SimResult {
  MemoryTrace trace;
  TrafficStats stats;
};

std::uint64_t effective_block_bytes(const SimOptions& opts);

MemoryTrace trace_benchmark(const BenchmarkSpec& spec, const SimOptions& opts);

SimResult simulate_benchmark(const BenchmarkSpec& spec, const SimOptions& opts);

DREReport report_benchmark(const BenchmarkSpec& spec, const SimOptions& opts);

struct CompareRow {
  std::size_t input_length = 0;
  std::uint64_t traffic_a = 0;
  std::uint64_t traffic_a_plus = 0;
  double ratio = 0.0;  // A / A+
};

/// Schedule A vs A+ traffic at several input lengths. weights_only
/// restricts the accounting to G (and attention) traffic.
std::vector<CompareRow> compare_schedules(const BenchmarkSpec& spec, const CacheConfig& cache,
                                          const std::vector<std::size_t>& lengths,
                                          bool weights_only = true);

}  // namespace rnnsched
