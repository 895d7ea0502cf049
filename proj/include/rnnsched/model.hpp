#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rnnsched {

enum class CellType { LSTM, GRU };

/// Gate matrices per weight set: 4 for LSTM (f,i,o,c), 3 for GRU (z,r,c).
std::size_t gate_count(CellType cell);

const char* cell_name(CellType cell);
CellType cell_from_name(const std::string& name);

/// Full description of one RNN benchmark network.
struct NetworkConfig {
  CellType cell_type = CellType::LSTM;
  std::size_t hidden_size = 0;
  std::size_t input_size = 0;  // 0 means "same as hidden_size"
  std::size_t num_layers = 1;
  std::size_t input_length = 1;
  std::size_t vocab_size = 0;  // 0 = no embedding/softmax layers
  std::size_t element_bytes = 4;
  bool softmax_every_step = true;
  // h = o.tanh(c) instead of the literal h = o.c; numerics only, no
  // effect on traffic.
  bool standard_output_gate = false;
  // Optional per-layer hidden sizes for heterogeneous stacks. When
  // present must have exactly num_layers entries.
  std::vector<std::size_t> layer_sizes;

  std::size_t gates() const { return gate_count(cell_type); }
  std::size_t layer_hidden(std::size_t layer) const;
  /// Input width of a layer: external input width for layer 0,
  /// previous layer's hidden size otherwise.
  std::size_t layer_input(std::size_t layer) const;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

void to_json(nlohmann::json& j, const NetworkConfig& c);
void from_json(const nlohmann::json& j, NetworkConfig& c);

enum class TensorRole {
  InputWeight,      // G1
  RecurrentWeight,  // G2
  ConcatWeight,     // standalone unsplit weight (e.g. attention)
  Embedding,
  SoftmaxWeight,
  InputVector,  // per-layer input matrix, [T x n_in] row-major
  HiddenState,
  CellState,
  PrecomputedX,  // X', [T x g*n] row-major
  GateBuffer,
  Logits,
};

const char* role_name(TensorRole role);
bool is_weight_role(TensorRole role);

/// A named, contiguously addressed logical tensor in the simulated
/// address space. Byte ranges of distinct tensors never overlap and
/// base addresses are deterministic for a given NetworkConfig.
struct TensorHandle {
  std::uint32_t id = 0;
  TensorRole role = TensorRole::InputWeight;
  int layer = -1;  // -1 for network-level tensors
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t base_address = 0;
  std::uint64_t byte_len = 0;
  std::string name;
};

/// Extra tensors an application model may need on top of the plain
/// NetworkConfig (currently just a coarse fixed-weight attention
/// matvec applied once per decoder step).
struct LayoutExtras {
  std::size_t attention_rows = 0;  // [attention_rows x attention_rows], 0 = none
};

struct NetworkLayout {
  NetworkConfig config;
  LayoutExtras extras;
  std::vector<TensorHandle> tensors;
  std::uint64_t total_bytes = 0;

  const TensorHandle& get(TensorRole role, int layer = -1) const;
  const TensorHandle* find(TensorRole role, int layer = -1) const;
};

/// Dense row-major single-precision matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

  float& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  float at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct LayerWeights {
  Matrix g1;  // [n_in x g*n]
  Matrix g2;  // [n x g*n]
};

struct WeightSet {
  std::vector<LayerWeights> layers;
  Matrix embedding;       // [V x n_in0], empty when vocab_size == 0
  Matrix softmax_weight;  // [n_last x V]
};

/// Row-wise stack of G1 on top of G2. Columns must match.
Matrix concat_g(const Matrix& g1, const Matrix& g2);

/// Inverse of concat_g: first n_in rows and the remainder.
std::pair<Matrix, Matrix> split_g(const Matrix& g, std::size_t n_in);

/// Deterministic address assignment for every tensor either schedule
/// touches. Allocates no weight storage; traffic modelling only needs
/// shapes and addresses.
NetworkLayout build_layout(const NetworkConfig& config, const LayoutExtras& extras = {});

/// Layout plus seeded pseudo-random weights (uniform in [-0.1, 0.1]),
/// filled in tensor declaration order.
std::pair<NetworkLayout, WeightSet> build_network(const NetworkConfig& config,
                                                  std::uint64_t seed = 0x5eed);

/// Seeded input sequence for the numeric executors, [T x n_in0].
Matrix make_inputs(const NetworkConfig& config, std::uint64_t seed = 0x1234);

/// Closed-form total weight bytes (all layers' G + embedding + softmax).
std::uint64_t total_weight_bytes(const NetworkConfig& config);

}  // namespace rnnsched
