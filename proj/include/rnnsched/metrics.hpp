#pragma once

#include <cstdint>
#include <string>

#include "rnnsched/cachesim.hpp"
#include "rnnsched/model.hpp"
#include "rnnsched/tracegen.hpp"

namespace rnnsched {

/// Working set of one inference: weights + word embeddings +
/// intermediate values. The intermediate inventory is schedule-tagged:
/// per-layer h, c and the gate buffer for both schedules, plus the X'
/// matrix (g*n*T) under A+. Attention weights, when modelled, count as
/// weights.
std::uint64_t working_set_bytes(const NetworkConfig& config, Schedule schedule,
                                std::size_t attention_rows = 0);

/// DataReuseEfficiency = AvgRW / WorkingSet. Throws on a zero working
/// set.
double dre(double avg_rw_bytes, std::uint64_t working_set);

struct DREReport {
  std::string name;
  Schedule schedule = Schedule::A;
  std::uint64_t working_set = 0;
  double avg_rw = 0.0;  // bytes per run
  double dre_value = 0.0;
  std::uint64_t mem_read_bytes = 0;
  std::uint64_t mem_write_bytes = 0;
  std::uint32_t runs = 1;
};

DREReport make_report(const std::string& name, const NetworkConfig& config, Schedule schedule,
                      const TrafficStats& stats, std::size_t attention_rows = 0);

}  // namespace rnnsched
