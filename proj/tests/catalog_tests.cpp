#include <set>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "rnnsched/catalog.hpp"

using namespace rnnsched;

TEST_CASE("grid covers the full cross product") {
  const auto specs = grid();
  CHECK(specs.size() == 640);

  std::set<std::string> names;
  for (const auto& s : specs) {
    names.insert(s.name);
    CHECK_NOTHROW(s.config.validate());
    CHECK(s.config.element_bytes == 4);
    CHECK(s.a_plus_eligible.empty());
  }
  CHECK(names.size() == specs.size());

  GridFilter f;
  f.vocab = 60;
  CHECK(filter_grid(specs, f).size() == 320);
  f = GridFilter::parse("cell=lstm,n=512,layers=2,t=100,vocab=60");
  const auto one = filter_grid(specs, f);
  REQUIRE(one.size() == 1);
  CHECK(one[0].name == "lstm-n512-l2-t100-v60");
}

TEST_CASE("filter parse rejects unknown keys") {
  CHECK_THROWS(GridFilter::parse("foo=1"));
  CHECK_THROWS(GridFilter::parse("cell"));
  CHECK_NOTHROW(GridFilter::parse(""));
}

TEST_CASE("application models") {
  const auto apps = applications();
  REQUIRE(apps.size() == 4);
  std::set<std::string> names;
  for (const auto& s : apps) names.insert(s.name);
  CHECK(names == std::set<std::string>{"gnmt", "deepspeech1", "lm", "bytener"});

  const BenchmarkSpec gnmt = find_benchmark("gnmt");
  CHECK(gnmt.config.num_layers == 16);
  CHECK(gnmt.attention_rows > 0);
  REQUIRE(gnmt.a_plus_eligible.size() == 16);
  for (std::size_t l = 0; l < 8; ++l) CHECK(gnmt.a_plus_eligible[l] == 1);
  for (std::size_t l = 8; l < 16; ++l) CHECK(gnmt.a_plus_eligible[l] == 0);

  const BenchmarkSpec lm = find_benchmark("lm");
  CHECK(lm.config.layer_sizes == std::vector<std::size_t>{2048, 8192});
  CHECK(lm.config.vocab_size == 80000);

  const BenchmarkSpec ds = find_benchmark("deepspeech1");
  CHECK(ds.config.num_layers == 5);
  CHECK(ds.config.vocab_size == 28);

  const BenchmarkSpec ner = find_benchmark("bytener");
  CHECK(ner.config.num_layers == 4);
  CHECK(ner.config.vocab_size == 4);
}

TEST_CASE("lookup by grid name") {
  const BenchmarkSpec s = find_benchmark("gru-n128-l3-t50-v10000");
  CHECK(s.config.cell_type == CellType::GRU);
  CHECK(s.config.hidden_size == 128);
  CHECK(s.config.num_layers == 3);
  CHECK(s.config.input_length == 50);
  CHECK(s.config.vocab_size == 10000);
  CHECK_THROWS(find_benchmark("nope"));
}

TEST_CASE("benchmark spec json round trip") {
  const BenchmarkSpec gnmt = find_benchmark("gnmt");
  nlohmann::json j = gnmt;
  const auto back = j.get<BenchmarkSpec>();
  CHECK(back.name == gnmt.name);
  CHECK(back.a_plus_eligible == gnmt.a_plus_eligible);
  CHECK(back.attention_rows == gnmt.attention_rows);
  CHECK(back.config.layer_sizes == gnmt.config.layer_sizes);
  CHECK(back.config.vocab_size == gnmt.config.vocab_size);

  nlohmann::json bad = j;
  bad["a_plus_eligible"] = {1, 0};
  CHECK_THROWS(bad.get<BenchmarkSpec>());
}
