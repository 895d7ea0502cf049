// Acceptance gate: one pass/fail line per criterion, nonzero exit on
// any failure.

#include <cstdio>
#include <random>
#include <vector>

#include "rnnsched/executor.hpp"
#include "rnnsched/metrics.hpp"
#include "rnnsched/runner.hpp"
#include "support/generators.hpp"

using namespace rnnsched;

namespace {

int failures = 0;

void report(int criterion, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %d (%s): %s%s%s\n", criterion, name, ok ? "pass" : "FAIL",
              detail.empty() ? "" : "; ", detail.c_str());
  if (!ok) ++failures;
}

// 1. n=512 single-layer LSTM, 4 MB cache: weight read traffic is
//    exactly 800 MB under schedule A and 404 MB under A+.
void criterion_synthetic_traffic() {
  BenchmarkSpec spec;
  spec.name = "synthetic-512";
  spec.config.hidden_size = 512;
  spec.config.input_length = 100;

  SimOptions opts;
  opts.cache.capacity_bytes = 4ull << 20;

  opts.schedule = Schedule::A;
  const SimResult a = simulate_benchmark(spec, opts);
  const std::uint64_t read_a = read_traffic_bytes(a.stats, a.trace, true);

  opts.schedule = Schedule::APlus;
  const SimResult ap = simulate_benchmark(spec, opts);
  const std::uint64_t read_ap = read_traffic_bytes(ap.stats, ap.trace, true);

  const bool ok = read_a == 800ull << 20 && read_ap == 404ull << 20;
  report(1, "synthetic 512-unit weight traffic", ok,
         "A=" + std::to_string(read_a >> 20) + " MB, A+=" + std::to_string(read_ap >> 20) +
             " MB (want 800/404)");
}

// 2. Numeric equivalence of the two schedule executors over randomized
//    small configs, single precision, 1e-5 relative.
void criterion_schedule_equivalence() {
  std::mt19937_64 rng(0x0eed);
  double worst = 0.0;
  const int trials = 220;
  for (int i = 0; i < trials; ++i) {
    const NetworkConfig c = testsupport::random_small_config(rng);
    const auto [layout, weights] = build_network(c, rng());
    const Matrix inputs = make_inputs(c, rng());
    const auto a = run_schedule_a<float>(c, weights, inputs);
    const auto ap = run_schedule_a_plus<float>(c, weights, inputs);
    worst = std::max(worst, max_relative_difference(a, ap));
  }
  report(2, "schedule numeric equivalence", worst <= 1e-5,
         "worst relative difference " + std::to_string(worst) + " over " +
             std::to_string(trials) + " configs");
}

// 3. Optimized simulator vs the brute-force LRU reference on random
//    traces: identical hit/miss/writeback counts.
void criterion_lru_oracle() {
  std::mt19937_64 rng(0xcafe);
  const int trials = 120;
  int mismatches = 0;
  for (int i = 0; i < trials; ++i) {
    CacheConfig cache;
    const std::uint64_t lines = 4ull << (rng() % 5);
    cache.capacity_bytes = rng() % 8 == 0 ? 0 : lines * 64;
    if (cache.capacity_bytes != 0 && rng() % 4 == 0) cache.ways = rng() % 2 ? 2 : 4;
    cache.writeback_flush = rng() % 4 != 0;
    const MemoryTrace t = testsupport::random_trace(rng, (lines + rng() % lines) * 64);

    const TrafficStats fast = simulate(t, cache);
    const TrafficStats ref = simulate_reference(t, cache);
    if (fast.hits != ref.hits || fast.misses != ref.misses ||
        fast.writebacks != ref.writebacks)
      ++mismatches;
  }
  report(3, "lru simulator oracle equivalence", mismatches == 0,
         std::to_string(trials - mismatches) + "/" + std::to_string(trials) + " traces match");
}

// 4. bytener fits a 12 MB cache, so the schedules tie: ratio 1.0 +- 0.02.
void criterion_bytener_parity() {
  const BenchmarkSpec spec = find_benchmark("bytener");
  CacheConfig cache;
  const auto rows = compare_schedules(spec, cache, {100});
  const double ratio = rows.at(0).ratio;
  report(4, "bytener schedule parity", ratio >= 0.98 && ratio <= 1.02,
         "ratio " + std::to_string(ratio));
}

// 5. lm ratio in [1.20, 1.40] at T in {10,100}; gnmt in [1.35, 1.75].
void criterion_ratio_bands() {
  CacheConfig cache;
  bool ok = true;
  std::string detail;

  const auto lm = compare_schedules(find_benchmark("lm"), cache, {10, 100});
  for (const auto& row : lm) {
    ok = ok && row.ratio >= 1.20 && row.ratio <= 1.40;
    detail += "lm@" + std::to_string(row.input_length) + "=" + std::to_string(row.ratio) + " ";
  }
  const auto gnmt = compare_schedules(find_benchmark("gnmt"), cache, {10, 100});
  for (const auto& row : gnmt) {
    ok = ok && row.ratio >= 1.35 && row.ratio <= 1.75;
    detail += "gnmt@" + std::to_string(row.input_length) + "=" + std::to_string(row.ratio) + " ";
  }
  report(5, "lm and gnmt improvement bands", ok, detail);
}

// 6. For every grid benchmark whose per-layer G exceeds the 12 MB
//    cache, schedule A DRE is non-decreasing in input length.
void criterion_dre_monotonic() {
  CacheConfig cache;
  int checked = 0;
  bool ok = true;
  std::string detail;

  for (const BenchmarkSpec& base : grid()) {
    if (base.config.input_length != 1) continue;  // one representative per shape
    const NetworkConfig& c = base.config;
    const std::uint64_t g_bytes = std::uint64_t(c.layer_input(0) + c.hidden_size) * c.gates() *
                                  c.hidden_size * c.element_bytes;
    if (g_bytes <= cache.capacity_bytes) continue;

    double prev = -1.0;
    for (std::size_t t : {1, 10, 50, 100}) {
      BenchmarkSpec spec = base;
      spec.config.input_length = t;
      SimOptions opts;
      opts.cache = cache;
      opts.schedule = Schedule::A;
      const DREReport r = report_benchmark(spec, opts);
      ++checked;
      if (r.dre_value < prev - 1e-12) {
        ok = false;
        if (detail.size() < 200)
          detail += base.name + "@" + std::to_string(t) + " drops; ";
      }
      prev = r.dre_value;
    }
  }
  report(6, "dre non-decreasing in input length", ok && checked > 0,
         detail.empty() ? std::to_string(checked) + " benchmarks checked" : detail);
}

// 7. A benchmark that fits the cache: cold avg_rw equals the
//    line-rounded footprint, warm-run DRE tends to zero.
void criterion_ideal_system() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"bytener", "lstm-n256-l2-t50-v60"}) {
    const BenchmarkSpec spec = find_benchmark(name);
    SimOptions opts;
    opts.cache.writeback_flush = false;

    // cold: every unique line misses exactly once, nothing comes back
    const SimResult cold = simulate_benchmark(spec, opts);
    const std::uint64_t footprint = unique_footprint(cold.trace, opts.cache.line_bytes);
    if (cold.stats.avg_rw_bytes() != double(footprint)) {
      ok = false;
      detail += std::string(name) + " cold avg_rw != footprint; ";
    }

    // warm: the resident working set amortizes the cold misses away
    opts.warm_runs = 100;
    const SimResult warm = simulate_benchmark(spec, opts);
    const DREReport r =
        make_report(spec.name, spec.config, opts.schedule, warm.stats, spec.attention_rows);
    if (r.dre_value >= 0.05) {
      ok = false;
      detail += std::string(name) + " warm dre " + std::to_string(r.dre_value) + "; ";
    }
  }
  report(7, "ideal-system cold footprint and warm dre", ok,
         detail.empty() ? "cold == footprint, warm dre < 0.05" : detail);
}

}  // namespace

int main() {
  criterion_synthetic_traffic();
  criterion_schedule_equivalence();
  criterion_lru_oracle();
  criterion_bytener_parity();
  criterion_ratio_bands();
  criterion_dre_monotonic();
  criterion_ideal_system();
  if (failures != 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
