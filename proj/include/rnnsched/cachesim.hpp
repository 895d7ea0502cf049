#pragma once

#include <cstdint>
#include <vector>

#include "rnnsched/tracegen.hpp"

namespace rnnsched {

struct CacheConfig {
  std::uint64_t capacity_bytes = 12ull << 20;  // 0 = unbounded (never evicts)
  std::uint32_t line_bytes = 64;
  std::uint32_t ways = 0;  // 0 = fully associative
  bool writeback_flush = true;

  void validate() const;
  std::uint64_t capacity_lines() const { return capacity_bytes / line_bytes; }
};

struct TensorTraffic {
  std::uint64_t read_bytes = 0;
  std::uint64_t write_bytes = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t writebacks = 0;
};

/// Traffic crossing the memory boundary. mem_read_bytes is always
/// misses * line_bytes (write-allocate fetches included);
/// mem_write_bytes is writebacks * line_bytes.
struct TrafficStats {
  std::uint64_t mem_read_bytes = 0;
  std::uint64_t mem_write_bytes = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t writebacks = 0;
  std::uint32_t runs = 1;
  std::vector<TensorTraffic> per_tensor;

  double avg_rw_bytes() const {
    return static_cast<double>(mem_read_bytes + mem_write_bytes) / runs;
  }
};

TrafficStats simulate(const MemoryTrace& trace, const CacheConfig& cache);

/// Replays the trace `runs` times through the same cache without
/// resetting it, flushing dirty lines once at the very end (if
/// configured). Totals accumulate; avg_rw_bytes() divides by runs.
TrafficStats simulate_warm(const MemoryTrace& trace, const CacheConfig& cache, std::uint32_t runs);

/// Straightforward move-to-front LRU with linear search and no fast
/// paths. Slow; exists as the oracle the optimized simulator is
/// validated against.
TrafficStats simulate_reference(const MemoryTrace& trace, const CacheConfig& cache);

/// Distinct line-granular bytes touched by the trace.
std::uint64_t unique_footprint(const MemoryTrace& trace, std::uint32_t line_bytes = 64);

/// Read+write traffic, optionally restricted to weight tensors
/// (G1/G2/standalone weights), via the per-tensor breakdown.
std::uint64_t traffic_bytes(const TrafficStats& stats, const MemoryTrace& trace,
                            bool weights_only);

/// Read traffic only, same filtering.
std::uint64_t read_traffic_bytes(const TrafficStats& stats, const MemoryTrace& trace,
                                 bool weights_only);

}  // namespace rnnsched
