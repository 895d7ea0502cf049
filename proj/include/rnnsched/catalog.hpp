#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rnnsched/model.hpp"

namespace rnnsched {

/// One runnable benchmark: a network plus schedule applicability
/// (decoder-style layers where split-G degrades to Schedule A) and the
/// optional coarse attention model.
struct BenchmarkSpec {
  std::string name;
  NetworkConfig config;
  std::vector<std::uint8_t> a_plus_eligible;  // empty = all eligible
  std::size_t attention_rows = 0;
  std::string note;
};

void to_json(nlohmann::json& j, const BenchmarkSpec& s);
void from_json(const nlohmann::json& j, BenchmarkSpec& s);

/// Full benchmark grid: hidden {64,128,256,512,1024} x layers {1..8}
/// x cells {LSTM,GRU} x input lengths {1,10,50,100} x vocab
/// {60,10000}, batch 1. 640 entries; filter for subsets.
std::vector<BenchmarkSpec> grid();

/// The four application models: gnmt, deepspeech1, lm, bytener.
std::vector<BenchmarkSpec> applications();

/// Looks up by name across applications() and grid(). Throws if
/// absent.
BenchmarkSpec find_benchmark(const std::string& name);

struct GridFilter {
  std::optional<CellType> cell;
  std::optional<std::size_t> hidden;
  std::optional<std::size_t> layers;
  std::optional<std::size_t> input_length;
  std::optional<std::size_t> vocab;

  bool matches(const BenchmarkSpec& s) const;
  /// Parses "cell=lstm,n=512,layers=2,t=100,vocab=60" (any subset).
  static GridFilter parse(const std::string& expr);
};

std::vector<BenchmarkSpec> filter_grid(const std::vector<BenchmarkSpec>& specs,
                                       const GridFilter& f);

}  // namespace rnnsched
