#include "rnnsched/model.hpp"

#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rnnsched {

namespace {
constexpr std::uint64_t kAddressAlign = 64;  // line-aligned tensor bases

std::uint64_t align_up(std::uint64_t v, std::uint64_t a) { return (v + a - 1) / a * a; }
}  // namespace

std::size_t gate_count(CellType cell) { return cell == CellType::LSTM ? 4 : 3; }

const char* cell_name(CellType cell) { return cell == CellType::LSTM ? "LSTM" : "GRU"; }

CellType cell_from_name(const std::string& name) {
  if (name == "LSTM" || name == "lstm") return CellType::LSTM;
  if (name == "GRU" || name == "gru") return CellType::GRU;
  throw std::invalid_argument("unknown cell type: " + name);
}

std::size_t NetworkConfig::layer_hidden(std::size_t layer) const {
  if (!layer_sizes.empty()) return layer_sizes.at(layer);
  return hidden_size;
}

std::size_t NetworkConfig::layer_input(std::size_t layer) const {
  if (layer == 0) return input_size != 0 ? input_size : layer_hidden(0);
  return layer_hidden(layer - 1);
}

void NetworkConfig::validate() const {
  if (hidden_size == 0 && layer_sizes.empty())
    throw std::invalid_argument("hidden_size must be positive");
  if (num_layers == 0) throw std::invalid_argument("num_layers must be positive");
  if (input_length == 0) throw std::invalid_argument("input_length must be positive");
  if (element_bytes != 2 && element_bytes != 4 && element_bytes != 8)
    throw std::invalid_argument("element_bytes must be one of {2,4,8}");
  if (!layer_sizes.empty()) {
    if (layer_sizes.size() != num_layers)
      throw std::invalid_argument("layer_sizes must have exactly num_layers entries");
    for (std::size_t n : layer_sizes)
      if (n == 0) throw std::invalid_argument("layer_sizes entries must be positive");
  }
}

void to_json(nlohmann::json& j, const NetworkConfig& c) {
  j = nlohmann::json{{"cell_type", cell_name(c.cell_type)},
                     {"hidden_size", c.hidden_size},
                     {"input_size", c.input_size},
                     {"num_layers", c.num_layers},
                     {"input_length", c.input_length},
                     {"vocab_size", c.vocab_size},
                     {"element_bytes", c.element_bytes},
                     {"softmax_every_step", c.softmax_every_step},
                     {"standard_output_gate", c.standard_output_gate}};
  if (!c.layer_sizes.empty()) j["layer_sizes"] = c.layer_sizes;
}

void from_json(const nlohmann::json& j, NetworkConfig& c) {
  c = NetworkConfig{};
  c.cell_type = cell_from_name(j.at("cell_type").get<std::string>());
  c.hidden_size = j.value("hidden_size", std::size_t{0});
  c.input_size = j.value("input_size", std::size_t{0});
  c.num_layers = j.value("num_layers", std::size_t{1});
  c.input_length = j.value("input_length", std::size_t{1});
  c.vocab_size = j.value("vocab_size", std::size_t{0});
  c.element_bytes = j.value("element_bytes", std::size_t{4});
  c.softmax_every_step = j.value("softmax_every_step", true);
  c.standard_output_gate = j.value("standard_output_gate", false);
  if (j.contains("layer_sizes")) c.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  if (c.hidden_size == 0 && !c.layer_sizes.empty()) c.hidden_size = c.layer_sizes.front();
  c.validate();
}

const char* role_name(TensorRole role) {
  switch (role) {
    case TensorRole::InputWeight: return "G1";
    case TensorRole::RecurrentWeight: return "G2";
    case TensorRole::ConcatWeight: return "G";
    case TensorRole::Embedding: return "embedding";
    case TensorRole::SoftmaxWeight: return "softmax_w";
    case TensorRole::InputVector: return "input";
    case TensorRole::HiddenState: return "h";
    case TensorRole::CellState: return "c";
    case TensorRole::PrecomputedX: return "x_prime";
    case TensorRole::GateBuffer: return "gates";
    case TensorRole::Logits: return "logits";
  }
  return "?";
}

bool is_weight_role(TensorRole role) {
  return role == TensorRole::InputWeight || role == TensorRole::RecurrentWeight ||
         role == TensorRole::ConcatWeight;
}

const TensorHandle* NetworkLayout::find(TensorRole role, int layer) const {
  for (const auto& t : tensors)
    if (t.role == role && t.layer == layer) return &t;
  return nullptr;
}

const TensorHandle& NetworkLayout::get(TensorRole role, int layer) const {
  const TensorHandle* t = find(role, layer);
  if (!t)
    throw std::out_of_range(std::string("no tensor with role ") + role_name(role) +
                            " at layer " + std::to_string(layer));
  return *t;
}

Matrix concat_g(const Matrix& g1, const Matrix& g2) {
  if (g1.cols != g2.cols) throw std::invalid_argument("concat_g: column count mismatch");
  Matrix g(g1.rows + g2.rows, g1.cols);
  std::copy(g1.data.begin(), g1.data.end(), g.data.begin());
  std::copy(g2.data.begin(), g2.data.end(), g.data.begin() + static_cast<std::ptrdiff_t>(g1.data.size()));
  return g;
}

std::pair<Matrix, Matrix> split_g(const Matrix& g, std::size_t n_in) {
  if (n_in >= g.rows) throw std::invalid_argument("split_g: n_in must be less than rows(G)");
  Matrix g1(n_in, g.cols);
  Matrix g2(g.rows - n_in, g.cols);
  std::copy(g.data.begin(), g.data.begin() + static_cast<std::ptrdiff_t>(g1.data.size()), g1.data.begin());
  std::copy(g.data.begin() + static_cast<std::ptrdiff_t>(g1.data.size()), g.data.end(), g2.data.begin());
  return {std::move(g1), std::move(g2)};
}

NetworkLayout build_layout(const NetworkConfig& config, const LayoutExtras& extras) {
  config.validate();
  NetworkLayout layout;
  layout.config = config;
  layout.extras = extras;

  std::uint64_t cursor = 0;
  auto add = [&](TensorRole role, int layer, std::size_t rows, std::size_t cols,
                 std::string name) {
    TensorHandle t;
    t.id = static_cast<std::uint32_t>(layout.tensors.size());
    t.role = role;
    t.layer = layer;
    t.rows = rows;
    t.cols = cols;
    t.byte_len = static_cast<std::uint64_t>(rows) * cols * config.element_bytes;
    t.base_address = cursor;
    t.name = std::move(name);
    cursor = align_up(cursor + t.byte_len, kAddressAlign);
    layout.tensors.push_back(std::move(t));
  };

  const std::size_t g = config.gates();
  const std::size_t L = config.num_layers;
  const std::size_t T = config.input_length;

  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t n = config.layer_hidden(l);
    const std::size_t n_in = config.layer_input(l);
    add(TensorRole::InputWeight, static_cast<int>(l), n_in, g * n, "G1.l" + std::to_string(l));
    add(TensorRole::RecurrentWeight, static_cast<int>(l), n, g * n, "G2.l" + std::to_string(l));
  }
  if (config.vocab_size > 0) {
    add(TensorRole::Embedding, -1, config.vocab_size, config.layer_input(0), "embedding");
    add(TensorRole::SoftmaxWeight, -1, config.layer_hidden(L - 1), config.vocab_size, "softmax_w");
  }
  // Input matrix of layer l; index L is the last layer's output stream.
  for (std::size_t l = 0; l <= L; ++l) {
    const std::size_t width = l < L ? config.layer_input(l) : config.layer_hidden(L - 1);
    if (l == 0 && config.vocab_size > 0) continue;  // layer 0 reads embedding rows
    add(TensorRole::InputVector, static_cast<int>(l), T, width, "io.l" + std::to_string(l));
  }
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t n = config.layer_hidden(l);
    add(TensorRole::HiddenState, static_cast<int>(l), 1, n, "h.l" + std::to_string(l));
    if (config.cell_type == CellType::LSTM)
      add(TensorRole::CellState, static_cast<int>(l), 1, n, "c.l" + std::to_string(l));
    add(TensorRole::GateBuffer, static_cast<int>(l), 1, g * n, "gates.l" + std::to_string(l));
    add(TensorRole::PrecomputedX, static_cast<int>(l), T, g * n, "xp.l" + std::to_string(l));
  }
  if (config.vocab_size > 0) add(TensorRole::Logits, -1, 1, config.vocab_size, "logits");
  if (extras.attention_rows > 0)
    add(TensorRole::ConcatWeight, -1, extras.attention_rows, extras.attention_rows, "attention_w");

  layout.total_bytes = cursor;
  return layout;
}

namespace {
void fill_uniform(Matrix& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-0.1f, 0.1f);
  for (float& v : m.data) v = dist(rng);
}
}  // namespace

std::pair<NetworkLayout, WeightSet> build_network(const NetworkConfig& config, std::uint64_t seed) {
  NetworkLayout layout = build_layout(config);
  WeightSet weights;
  std::mt19937_64 rng(seed);
  const std::size_t g = config.gates();
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    LayerWeights lw;
    lw.g1 = Matrix(config.layer_input(l), g * config.layer_hidden(l));
    lw.g2 = Matrix(config.layer_hidden(l), g * config.layer_hidden(l));
    fill_uniform(lw.g1, rng);
    fill_uniform(lw.g2, rng);
    weights.layers.push_back(std::move(lw));
  }
  if (config.vocab_size > 0) {
    weights.embedding = Matrix(config.vocab_size, config.layer_input(0));
    weights.softmax_weight = Matrix(config.layer_hidden(config.num_layers - 1), config.vocab_size);
    fill_uniform(weights.embedding, rng);
    fill_uniform(weights.softmax_weight, rng);
  }
  return {std::move(layout), std::move(weights)};
}

Matrix make_inputs(const NetworkConfig& config, std::uint64_t seed) {
  Matrix inputs(config.input_length, config.layer_input(0));
  std::mt19937_64 rng(seed);
  fill_uniform(inputs, rng);
  return inputs;
}

std::uint64_t total_weight_bytes(const NetworkConfig& config) {
  config.validate();
  std::uint64_t elems = 0;
  const std::size_t g = config.gates();
  for (std::size_t l = 0; l < config.num_layers; ++l)
    elems += static_cast<std::uint64_t>(config.layer_input(l) + config.layer_hidden(l)) * g *
             config.layer_hidden(l);
  if (config.vocab_size > 0) {
    elems += static_cast<std::uint64_t>(config.vocab_size) * config.layer_input(0);
    elems += static_cast<std::uint64_t>(config.layer_hidden(config.num_layers - 1)) * config.vocab_size;
  }
  return elems * config.element_bytes;
}

}  // namespace rnnsched
