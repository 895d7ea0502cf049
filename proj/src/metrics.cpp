#include "rnnsched/metrics.hpp"

#include <stdexcept>

namespace rnnsched {

std::uint64_t working_set_bytes(const NetworkConfig& config, Schedule schedule,
                                std::size_t attention_rows) {
  config.validate();
  const std::size_t g = config.gates();
  std::uint64_t elems = 0;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const std::uint64_t n = config.layer_hidden(l);
    const std::uint64_t n_in = config.layer_input(l);
    elems += (n_in + n) * g * n;                                   // G
    elems += n + (config.cell_type == CellType::LSTM ? n : 0);     // h (+ c)
    elems += g * n;                                                // gate buffer
    if (schedule == Schedule::APlus) elems += g * n * config.input_length;  // X'
  }
  if (config.vocab_size > 0) {
    elems += static_cast<std::uint64_t>(config.vocab_size) * config.layer_input(0);
    elems += static_cast<std::uint64_t>(config.layer_hidden(config.num_layers - 1)) *
             config.vocab_size;
  }
  elems += static_cast<std::uint64_t>(attention_rows) * attention_rows;
  return elems * config.element_bytes;
}

double dre(double avg_rw_bytes, std::uint64_t working_set) {
  if (working_set == 0) throw std::invalid_argument("working set must be positive");
  return avg_rw_bytes / static_cast<double>(working_set);
}

DREReport make_report(const std::string& name, const NetworkConfig& config, Schedule schedule,
                      const TrafficStats& stats, std::size_t attention_rows) {
  DREReport r;
  r.name = name;
  r.schedule = schedule;
  r.working_set = working_set_bytes(config, schedule, attention_rows);
  r.avg_rw = stats.avg_rw_bytes();
  r.dre_value = dre(r.avg_rw, r.working_set);
  r.mem_read_bytes = stats.mem_read_bytes;
  r.mem_write_bytes = stats.mem_write_bytes;
  r.runs = stats.runs;
  return r;
}

}  // namespace rnnsched
