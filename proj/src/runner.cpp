#include "rnnsched/runner.hpp"

namespace rnnsched {

std::uint64_t effective_block_bytes(const SimOptions& opts) {
  if (opts.block_bytes != 0) return opts.block_bytes;
  if (opts.cache.capacity_bytes == 0) return 6ull << 20;
  return std::max<std::uint64_t>(opts.cache.line_bytes, opts.cache.capacity_bytes / 2);
}

MemoryTrace trace_benchmark(const BenchmarkSpec& spec, const SimOptions& opts) {
  NetworkLayout layout = build_layout(spec.config, LayoutExtras{spec.attention_rows});
  TraceOptions topts;
  topts.block_bytes = effective_block_bytes(opts);
  topts.layer_a_plus_ok = spec.a_plus_eligible;
  return trace_schedule(layout, opts.schedule, topts);
}

SimResult simulate_benchmark(const BenchmarkSpec& spec, const SimOptions& opts) {
  SimResult r;
  r.trace = trace_benchmark(spec, opts);
  r.stats = simulate_warm(r.trace, opts.cache, opts.warm_runs);
  return r;
}

DREReport report_benchmark(const BenchmarkSpec& spec, const SimOptions& opts) {
  SimResult r = simulate_benchmark(spec, opts);
  return make_report(spec.name, spec.config, opts.schedule, r.stats, spec.attention_rows);
}

std::vector<CompareRow> compare_schedules(const BenchmarkSpec& spec, const CacheConfig& cache,
                                          const std::vector<std::size_t>& lengths,
                                          bool weights_only) {
  std::vector<CompareRow> rows;
  for (std::size_t t : lengths) {
    BenchmarkSpec s = spec;
    s.config.input_length = t;
    SimOptions opts;
    opts.cache = cache;
    CompareRow row;
    row.input_length = t;

    opts.schedule = Schedule::A;
    SimResult a = simulate_benchmark(s, opts);
    row.traffic_a = traffic_bytes(a.stats, a.trace, weights_only);

    opts.schedule = Schedule::APlus;
    SimResult ap = simulate_benchmark(s, opts);
    row.traffic_a_plus = traffic_bytes(ap.stats, ap.trace, weights_only);

    row.ratio = ap.stats.mem_read_bytes == 0 && row.traffic_a_plus == 0
                    ? 1.0
                    : static_cast<double>(row.traffic_a) / static_cast<double>(row.traffic_a_plus);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rnnsched
