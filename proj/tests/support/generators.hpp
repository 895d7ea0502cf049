#pragma once

// Randomized inputs shared by the unit and acceptance suites.

#include <random>
#include <string>

#include "rnnsched/model.hpp"
#include "rnnsched/tracegen.hpp"

namespace testsupport {

inline rnnsched::NetworkConfig random_small_config(std::mt19937_64& rng) {
  rnnsched::NetworkConfig c;
  c.cell_type = rng() % 2 ? rnnsched::CellType::LSTM : rnnsched::CellType::GRU;
  c.hidden_size = 1 + rng() % 64;
  c.input_size = 1 + rng() % 64;
  c.num_layers = 1 + rng() % 4;
  c.input_length = 1 + rng() % 20;
  c.standard_output_gate = rng() % 2 != 0;
  return c;
}

/// Random access stream over a handful of tensors. Tensor 0 is a
/// weight tensor of at least `big_bytes`, and a quarter of its reads
/// sweep it whole so capacity-sized events get exercised.
inline rnnsched::MemoryTrace random_trace(std::mt19937_64& rng, std::uint64_t big_bytes) {
  using namespace rnnsched;
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
      t.add(tensor, kind, Phase{}, 0, h.byte_len);
      continue;
    }
    const std::uint64_t offset = rng() % h.byte_len;
    const std::uint64_t len = 1 + rng() % std::min<std::uint64_t>(h.byte_len - offset, 4096);
    t.add(tensor, kind, Phase{}, offset, len);
  }
  return t;
}

}  // namespace testsupport
