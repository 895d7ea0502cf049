#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rnnsched/executor.hpp"
#include "rnnsched/metrics.hpp"
#include "rnnsched/runner.hpp"

namespace py = pybind11;
using namespace rnnsched;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trace-driven memory traffic model for RNN inference scheduling";

  py::enum_<CellType>(m, "CellType")
      .value("LSTM", CellType::LSTM)
      .value("GRU", CellType::GRU);

  py::enum_<Schedule>(m, "Schedule")
      .value("A", Schedule::A)
      .value("APlus", Schedule::APlus);

  py::class_<NetworkConfig>(m, "NetworkConfig")
      .def(py::init<>())
      .def_readwrite("cell_type", &NetworkConfig::cell_type)
      .def_readwrite("hidden_size", &NetworkConfig::hidden_size)
      .def_readwrite("input_size", &NetworkConfig::input_size)
      .def_readwrite("num_layers", &NetworkConfig::num_layers)
      .def_readwrite("input_length", &NetworkConfig::input_length)
      .def_readwrite("vocab_size", &NetworkConfig::vocab_size)
      .def_readwrite("element_bytes", &NetworkConfig::element_bytes)
      .def_readwrite("softmax_every_step", &NetworkConfig::softmax_every_step)
      .def_readwrite("standard_output_gate", &NetworkConfig::standard_output_gate)
      .def_readwrite("layer_sizes", &NetworkConfig::layer_sizes)
      .def("validate", &NetworkConfig::validate);

  py::class_<CacheConfig>(m, "CacheConfig")
      .def(py::init<>())
      .def_readwrite("capacity_bytes", &CacheConfig::capacity_bytes)
      .def_readwrite("line_bytes", &CacheConfig::line_bytes)
      .def_readwrite("ways", &CacheConfig::ways)
      .def_readwrite("writeback_flush", &CacheConfig::writeback_flush);

  py::class_<BenchmarkSpec>(m, "BenchmarkSpec")
      .def(py::init<>())
      .def_readwrite("name", &BenchmarkSpec::name)
      .def_readwrite("config", &BenchmarkSpec::config)
      .def_readwrite("a_plus_eligible", &BenchmarkSpec::a_plus_eligible)
      .def_readwrite("attention_rows", &BenchmarkSpec::attention_rows)
      .def_readwrite("note", &BenchmarkSpec::note);

  m.def("applications", &applications);
  m.def("grid", &grid);
  m.def("find_benchmark", &find_benchmark, py::arg("name"));
  m.def("total_weight_bytes", &total_weight_bytes, py::arg("config"));
  m.def("working_set_bytes", &working_set_bytes, py::arg("config"), py::arg("schedule"),
        py::arg("attention_rows") = 0);
  m.def("dre", &dre, py::arg("avg_rw_bytes"), py::arg("working_set"));

  m.def(
      "run_final_hidden",
      [](const NetworkConfig& c, Schedule s, std::uint64_t weight_seed,
         std::uint64_t input_seed) {
        const auto [layout, weights] = build_network(c, weight_seed);
        const Matrix inputs = make_inputs(c, input_seed);
        const auto r = s == Schedule::A ? run_schedule_a<float>(c, weights, inputs)
                                        : run_schedule_a_plus<float>(c, weights, inputs);
        return r.final_h;
      },
      py::arg("config"), py::arg("schedule") = Schedule::A, py::arg("weight_seed") = 0x5eed,
      py::arg("input_seed") = 0x1234,
      "Final hidden state per layer after a seeded single-precision run");

  m.def(
      "simulate",
      [](const BenchmarkSpec& spec, Schedule s, const CacheConfig& cache,
         std::uint32_t warm_runs, bool weights_only) {
        SimOptions opts;
        opts.cache = cache;
        opts.schedule = s;
        opts.warm_runs = warm_runs;
        const SimResult r = simulate_benchmark(spec, opts);
        const std::uint64_t rd = read_traffic_bytes(r.stats, r.trace, weights_only);
        const std::uint64_t rw = traffic_bytes(r.stats, r.trace, weights_only);
        const std::uint64_t ws =
            working_set_bytes(spec.config, s, spec.attention_rows);
        py::dict d;
        d["name"] = spec.name;
        d["schedule"] = s;
        d["working_set_bytes"] = ws;
        d["mem_read_bytes"] = rd;
        d["mem_write_bytes"] = rw - rd;
        d["avg_rw_bytes"] = double(rw) / warm_runs;
        d["dre"] = dre(double(rw) / warm_runs, ws);
        d["hits"] = r.stats.hits;
        d["misses"] = r.stats.misses;
        d["writebacks"] = r.stats.writebacks;
        return d;
      },
      py::arg("spec"), py::arg("schedule") = Schedule::A, py::arg("cache") = CacheConfig{},
      py::arg("warm_runs") = 1, py::arg("weights_only") = false,
      "Replay one benchmark through the LRU model and report traffic and DRE");

  m.def(
      "compare_schedules",
      [](const BenchmarkSpec& spec, const CacheConfig& cache,
         const std::vector<std::size_t>& lengths, bool weights_only) {
        py::list out;
        for (const CompareRow& row : compare_schedules(spec, cache, lengths, weights_only)) {
          py::dict d;
          d["input_length"] = row.input_length;
          d["traffic_a_bytes"] = row.traffic_a;
          d["traffic_a_plus_bytes"] = row.traffic_a_plus;
          d["ratio"] = row.ratio;
          out.append(d);
        }
        return out;
      },
      py::arg("spec"), py::arg("cache") = CacheConfig{},
      py::arg("lengths") = std::vector<std::size_t>{10, 20, 50, 100},
      py::arg("weights_only") = true,
      "Schedule A vs A+ traffic at several input lengths");
}
