// Command-line driver: run single benchmarks or sweeps, compare
// schedules, emit CSV/JSON reports.

#include <atomic>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rnnsched/catalog.hpp"
#include "rnnsched/executor.hpp"
#include "rnnsched/metrics.hpp"
#include "rnnsched/runner.hpp"

namespace {

using namespace rnnsched;

struct CacheFlags {
  double cache_mb = 12.0;
  std::uint32_t line_bytes = 64;
  std::uint32_t assoc = 0;
  bool no_flush = false;

  CacheConfig to_config() const {
    CacheConfig c;
    c.capacity_bytes = static_cast<std::uint64_t>(cache_mb * double(1ull << 20) + 0.5);
    c.line_bytes = line_bytes;
    c.ways = assoc;
    c.writeback_flush = !no_flush;
    c.validate();
    return c;
  }
};

void add_cache_flags(CLI::App* app, CacheFlags& f) {
  app->add_option("--cache-mb", f.cache_mb, "LLC capacity in MiB (0 = unbounded)")
      ->capture_default_str();
  app->add_option("--line-bytes", f.line_bytes, "Cache line size in bytes")
      ->capture_default_str();
  app->add_option("--assoc", f.assoc, "Set associativity (0 = fully associative)")
      ->capture_default_str();
  app->add_flag("--no-flush", f.no_flush, "Skip the final dirty-line flush");
}

BenchmarkSpec load_benchmark(const std::string& arg) {
  if (arg.ends_with(".json")) {
    std::ifstream in(arg);
    if (!in) throw std::runtime_error("cannot open " + arg);
    nlohmann::json j;
    in >> j;
    if (j.contains("config")) return j.get<BenchmarkSpec>();
    BenchmarkSpec s;
    s.config = j.get<NetworkConfig>();
    s.name = arg;
    return s;
  }
  return find_benchmark(arg);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path);
  return file;
}

// ---- run -------------------------------------------------------------

int cmd_run(const std::string& bench, Schedule schedule, const CacheFlags& cf,
            std::uint32_t warm_runs, bool weights_only, const std::string& format,
            const std::string& out_path, const std::string& dump_path) {
  const BenchmarkSpec spec = load_benchmark(bench);
  SimOptions opts;
  opts.cache = cf.to_config();
  opts.schedule = schedule;
  opts.warm_runs = warm_runs;
  const SimResult r = simulate_benchmark(spec, opts);

  if (!dump_path.empty()) {
    std::ofstream d(dump_path);
    if (!d) throw std::runtime_error("cannot open " + dump_path);
    dump_trace(r.trace, d);
  }

  const std::uint64_t rd = read_traffic_bytes(r.stats, r.trace, weights_only);
  const std::uint64_t wr = traffic_bytes(r.stats, r.trace, weights_only) - rd;
  const std::uint64_t ws =
      working_set_bytes(spec.config, schedule, spec.attention_rows);
  const double avg_rw = double(rd + wr) / warm_runs;
  const double dre_value = dre(avg_rw, ws);

  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  if (format == "json") {
    nlohmann::json j{{"name", spec.name},
                     {"schedule", schedule_name(schedule)},
                     {"working_set_bytes", ws},
                     {"mem_read_bytes", rd},
                     {"mem_write_bytes", wr},
                     {"avg_rw_bytes", avg_rw},
                     {"dre", dre_value},
                     {"runs", warm_runs},
                     {"weights_only", weights_only},
                     {"hits", r.stats.hits},
                     {"misses", r.stats.misses},
                     {"writebacks", r.stats.writebacks}};
    out << j.dump(2) << '\n';
  } else {
    out << "name,schedule,working_set_bytes,mem_read_bytes,mem_write_bytes,"
           "avg_rw_bytes,dre,runs\n";
    out << spec.name << ',' << schedule_name(schedule) << ',' << ws << ',' << rd << ',' << wr
        << ',' << avg_rw << ',' << dre_value << ',' << warm_runs << '\n';
  }
  return 0;
}

// ---- compare ---------------------------------------------------------

int cmd_compare(const std::string& bench, const CacheFlags& cf,
                const std::vector<std::size_t>& lengths, bool full,
                const std::string& out_path) {
  const BenchmarkSpec spec = load_benchmark(bench);
  const auto rows = compare_schedules(spec, cf.to_config(), lengths, !full);

  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  out << "name,input_length,traffic_a_bytes,traffic_a_plus_bytes,ratio\n";
  for (const CompareRow& row : rows)
    out << spec.name << ',' << row.input_length << ',' << row.traffic_a << ','
        << row.traffic_a_plus << ',' << row.ratio << '\n';
  return 0;
}

// ---- sweep -----------------------------------------------------------

std::string sweep_rows(const BenchmarkSpec& spec, const CacheConfig& cache) {
  std::ostringstream os;
  double avg_a = 0.0;
  for (Schedule schedule : {Schedule::A, Schedule::APlus}) {
    SimOptions opts;
    opts.cache = cache;
    opts.schedule = schedule;
    const SimResult r = simulate_benchmark(spec, opts);
    const std::uint64_t ws =
        working_set_bytes(spec.config, schedule, spec.attention_rows);
    const double avg = r.stats.avg_rw_bytes();
    if (schedule == Schedule::A) avg_a = avg;
    os << spec.name << ',' << cell_name(spec.config.cell_type) << ','
       << spec.config.hidden_size << ',' << spec.config.num_layers << ','
       << spec.config.input_length << ',' << spec.config.vocab_size << ','
       << schedule_name(schedule) << ',' << ws << ',' << r.stats.mem_read_bytes << ','
       << r.stats.mem_write_bytes << ',' << dre(avg, ws) << ',' << (avg_a / avg) << '\n';
  }
  return os.str();
}

int cmd_sweep(const std::string& filter_expr, bool apps, const CacheFlags& cf,
              unsigned threads, const std::string& out_path) {
  std::vector<BenchmarkSpec> specs = apps ? applications() : grid();
  if (!filter_expr.empty()) specs = filter_grid(specs, GridFilter::parse(filter_expr));
  const CacheConfig cache = cf.to_config();

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> results(specs.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t i = cursor.fetch_add(1); i < specs.size(); i = cursor.fetch_add(1))
      results[i] = sweep_rows(specs[i], cache);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  out << "name,cell,n,layers,T,vocab,schedule,working_set_bytes,mem_read_bytes,"
         "mem_write_bytes,dre,ratio_vs_a\n";
  for (const std::string& rows : results) out << rows;
  return 0;
}

// ---- verify ----------------------------------------------------------

NetworkConfig random_small_config(std::mt19937_64& rng) {
  NetworkConfig c;
  c.cell_type = rng() % 2 ? CellType::LSTM : CellType::GRU;
  c.hidden_size = 1 + rng() % 64;
  c.input_size = 1 + rng() % 64;
  c.num_layers = 1 + rng() % 4;
  c.input_length = 1 + rng() % 20;
  c.standard_output_gate = rng() % 2 != 0;
  return c;
}

bool verify_equivalence(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const NetworkConfig c = random_small_config(rng);
    const auto [layout, weights] = build_network(c, rng());
    const Matrix inputs = make_inputs(c, rng());
    const auto a = run_schedule_a<float>(c, weights, inputs);
    const auto ap = run_schedule_a_plus<float>(c, weights, inputs);
    worst = std::max(worst, max_relative_difference(a, ap));
  }
  std::cout << "schedule equivalence: worst relative difference " << worst << " over " << trials
            << " configs -> " << (worst <= 1e-5 ? "pass" : "FAIL") << '\n';
  return worst <= 1e-5;
}

MemoryTrace random_trace(std::mt19937_64& rng, std::uint64_t big_bytes) {
  MemoryTrace t;
  const std::size_t ntens = 2 + rng() % 4;
  std::uint64_t base = 0;
  for (std::size_t i = 0; i < ntens; ++i) {
    TensorHandle h;
    h.id = static_cast<std::uint32_t>(i);
    h.role = i == 0 ? TensorRole::RecurrentWeight : TensorRole::HiddenState;
    h.byte_len = i == 0 ? big_bytes : 64 * (1 + rng() % 64);
    h.base_address = base + 64 * (rng() % 4);
    h.name = "t" + std::to_string(i);
    base = h.base_address + h.byte_len;
    t.tensors.push_back(h);
  }
  const std::size_t nevents = 50 + rng() % 1000;
  for (std::size_t e = 0; e < nevents; ++e) {
    const auto tensor = static_cast<std::uint32_t>(rng() % ntens);
    const TensorHandle& h = t.tensors[tensor];
    const AccessKind kind = rng() % 10 < 7 ? AccessKind::Read : AccessKind::Write;
    if (tensor == 0 && kind == AccessKind::Read && rng() % 4 == 0) {
      // full-tensor sweep, the case the optimized path accelerates
      t.add(tensor, kind, Phase{}, 0, h.byte_len);
      continue;
    }
    const std::uint64_t offset = rng() % h.byte_len;
    const std::uint64_t len = 1 + rng() % std::min<std::uint64_t>(h.byte_len - offset, 4096);
    t.add(tensor, kind, Phase{}, offset, len);
  }
  return t;
}

bool verify_lru(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  int failures = 0;
  for (int i = 0; i < trials; ++i) {
    CacheConfig cache;
    cache.line_bytes = 64;
    const std::uint64_t lines = 4ull << (rng() % 5);
    cache.capacity_bytes = rng() % 8 == 0 ? 0 : lines * cache.line_bytes;
    if (cache.capacity_bytes != 0 && rng() % 4 == 0) cache.ways = rng() % 2 ? 2 : 4;
    cache.writeback_flush = rng() % 4 != 0;

    const MemoryTrace trace = random_trace(rng, (lines + rng() % lines) * cache.line_bytes);
    const TrafficStats fast = simulate(trace, cache);
    const TrafficStats ref = simulate_reference(trace, cache);
    if (fast.hits != ref.hits || fast.misses != ref.misses ||
        fast.writebacks != ref.writebacks) {
      ++failures;
      std::cout << "  trace " << i << ": fast " << fast.hits << '/' << fast.misses << '/'
                << fast.writebacks << " vs reference " << ref.hits << '/' << ref.misses << '/'
                << ref.writebacks << '\n';
    }
  }
  std::cout << "lru oracle: " << (trials - failures) << '/' << trials << " traces match -> "
            << (failures == 0 ? "pass" : "FAIL") << '\n';
  return failures == 0;
}

int cmd_verify(std::uint64_t seed, int eq_trials, int trace_trials) {
  const bool ok = verify_equivalence(seed, eq_trials) & verify_lru(seed + 1, trace_trials);
  return ok ? 0 : 1;
}

// ---- catalog ---------------------------------------------------------

int cmd_catalog(bool apps, bool as_json, const std::string& filter_expr,
                const std::string& out_path) {
  std::vector<BenchmarkSpec> specs = apps ? applications() : grid();
  if (!filter_expr.empty()) specs = filter_grid(specs, GridFilter::parse(filter_expr));

  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  if (as_json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : specs) j.push_back(s);
    out << j.dump(2) << '\n';
  } else {
    for (const auto& s : specs) out << s.name << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RNN inference scheduling and cache-traffic explorer"};
  app.require_subcommand(1);
  int rc = 0;

  // run
  auto* run = app.add_subcommand("run", "Simulate one benchmark and report traffic and DRE");
  std::string run_bench, run_schedule = "a", run_format = "json", run_out, run_dump;
  CacheFlags run_cache;
  std::uint32_t run_warm = 1;
  bool run_weights_only = false;
  run->add_option("benchmark", run_bench, "Catalog name or JSON config path")->required();
  run->add_option("--schedule", run_schedule, "a or a+")->capture_default_str();
  add_cache_flags(run, run_cache);
  run->add_option("--warm-runs", run_warm, "Back-to-back inference count")->capture_default_str();
  run->add_flag("--weights-only", run_weights_only, "Count weight-tensor traffic only");
  run->add_option("--out", run_format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  run->add_option("--output", run_out, "Write the report to a file instead of stdout");
  run->add_option("--dump-trace", run_dump, "Write the raw access trace to a file");
  run->callback([&] {
    rc = cmd_run(run_bench, schedule_from_name(run_schedule), run_cache, run_warm,
                 run_weights_only, run_format, run_out, run_dump);
  });

  // compare
  auto* compare =
      app.add_subcommand("compare", "Schedule A vs A+ traffic across input lengths");
  std::string cmp_bench, cmp_out;
  CacheFlags cmp_cache;
  std::vector<std::size_t> cmp_lengths{10, 20, 50, 100};
  bool cmp_full = false;
  compare->add_option("benchmark", cmp_bench, "Catalog name or JSON config path")->required();
  add_cache_flags(compare, cmp_cache);
  compare->add_option("--lengths", cmp_lengths, "Input lengths to compare at")
      ->delimiter(',')
      ->capture_default_str();
  compare->add_flag("--full", cmp_full, "Count all traffic, not just weight tensors");
  compare->add_option("--output", cmp_out, "Write CSV to a file instead of stdout");
  compare->callback([&] { rc = cmd_compare(cmp_bench, cmp_cache, cmp_lengths, cmp_full, cmp_out); });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "DRE report over the benchmark grid, as CSV");
  std::string sweep_filter, sweep_out;
  CacheFlags sweep_cache;
  bool sweep_apps = false;
  unsigned sweep_threads = 0;
  sweep->add_option("--filter", sweep_filter,
                    "Grid subset, e.g. cell=lstm,n=512,layers=2,t=100,vocab=60");
  sweep->add_flag("--apps", sweep_apps, "Sweep the application models instead of the grid");
  add_cache_flags(sweep, sweep_cache);
  sweep->add_option("--threads", sweep_threads, "Worker threads (0 = hardware default)")
      ->capture_default_str();
  sweep->add_option("--output", sweep_out, "Write CSV to a file instead of stdout");
  sweep->callback(
      [&] { rc = cmd_sweep(sweep_filter, sweep_apps, sweep_cache, sweep_threads, sweep_out); });

  // verify
  auto* verify =
      app.add_subcommand("verify", "Run the schedule-equivalence and LRU-oracle property suites");
  std::uint64_t verify_seed = 0x5eed;
  int verify_eq = 200, verify_traces = 100;
  verify->add_option("--seed", verify_seed, "Base RNG seed")->capture_default_str();
  verify->add_option("--equivalence-trials", verify_eq)->capture_default_str();
  verify->add_option("--trace-trials", verify_traces)->capture_default_str();
  verify->callback([&] { rc = cmd_verify(verify_seed, verify_eq, verify_traces); });

  // catalog
  auto* catalog = app.add_subcommand("catalog", "List or export the benchmark catalog");
  std::string cat_filter, cat_out;
  bool cat_apps = false, cat_json = false;
  catalog->add_flag("--apps", cat_apps, "Application models instead of the grid");
  catalog->add_flag("--json", cat_json, "Export full specs as JSON");
  catalog->add_option("--filter", cat_filter, "Grid subset expression");
  catalog->add_option("--output", cat_out, "Write to a file instead of stdout");
  catalog->callback([&] { rc = cmd_catalog(cat_apps, cat_json, cat_filter, cat_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
