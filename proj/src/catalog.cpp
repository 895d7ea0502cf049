#include "rnnsched/catalog.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rnnsched {

void to_json(nlohmann::json& j, const BenchmarkSpec& s) {
  j = nlohmann::json{{"name", s.name}, {"config", s.config}};
  if (!s.a_plus_eligible.empty()) j["a_plus_eligible"] = s.a_plus_eligible;
  if (s.attention_rows > 0) j["attention_rows"] = s.attention_rows;
  if (!s.note.empty()) j["note"] = s.note;
}

void from_json(const nlohmann::json& j, BenchmarkSpec& s) {
  s = BenchmarkSpec{};
  s.name = j.value("name", std::string{});
  j.at("config").get_to(s.config);
  if (j.contains("a_plus_eligible"))
    s.a_plus_eligible = j.at("a_plus_eligible").get<std::vector<std::uint8_t>>();
  s.attention_rows = j.value("attention_rows", std::size_t{0});
  s.note = j.value("note", std::string{});
  if (!s.a_plus_eligible.empty() && s.a_plus_eligible.size() != s.config.num_layers)
    throw std::invalid_argument("a_plus_eligible must have one entry per layer");
}

std::vector<BenchmarkSpec> grid() {
  static const std::size_t kHidden[] = {64, 128, 256, 512, 1024};
  static const std::size_t kLengths[] = {1, 10, 50, 100};
  static const std::size_t kVocabs[] = {60, 10000};

  std::vector<BenchmarkSpec> specs;
  specs.reserve(640);
  for (std::size_t n : kHidden)
    for (std::size_t layers = 1; layers <= 8; ++layers)
      for (CellType cell : {CellType::LSTM, CellType::GRU})
        for (std::size_t t : kLengths)
          for (std::size_t v : kVocabs) {
            BenchmarkSpec s;
            s.config.cell_type = cell;
            s.config.hidden_size = n;
            s.config.num_layers = layers;
            s.config.input_length = t;
            s.config.vocab_size = v;
            std::ostringstream name;
            name << (cell == CellType::LSTM ? "lstm" : "gru") << "-n" << n << "-l" << layers
                 << "-t" << t << "-v" << v;
            s.name = name.str();
            specs.push_back(std::move(s));
          }
  return specs;
}

std::vector<BenchmarkSpec> applications() {
  std::vector<BenchmarkSpec> apps;

  {
    // 8 encoder layers (split-G applies) + 8 decoder layers (each
    // step consumes the previous step's output, so it does not), plus
    // a coarse per-step attention matvec and an 80k vocabulary.
    // Encoder 1024 / decoder 640 hidden units.
    BenchmarkSpec s;
    s.name = "gnmt";
    s.config.cell_type = CellType::LSTM;
    s.config.num_layers = 16;
    s.config.layer_sizes.assign(16, 1024);
    for (std::size_t l = 8; l < 16; ++l) s.config.layer_sizes[l] = 640;
    s.config.hidden_size = 1024;
    s.config.input_size = 1024;
    s.config.input_length = 100;
    s.config.vocab_size = 80000;
    s.config.softmax_every_step = false;
    s.a_plus_eligible.assign(16, 1);
    for (std::size_t l = 8; l < 16; ++l) s.a_plus_eligible[l] = 0;
    s.attention_rows = 640;
    s.note = "language translation; encoder/decoder with attention";
    apps.push_back(std::move(s));
  }
  {
    BenchmarkSpec s;
    s.name = "deepspeech1";
    s.config.cell_type = CellType::LSTM;
    s.config.num_layers = 5;
    s.config.hidden_size = 2048;
    s.config.input_length = 100;
    s.config.vocab_size = 28;
    s.note = "speech recognition; 5 RNN layers, 28-symbol output";
    apps.push_back(std::move(s));
  }
  {
    // Two LSTM layers of 2048 and 8192; per-gate recurrent weights
    // 8192x8192 vs input weights 2048x8192 on the second layer.
    BenchmarkSpec s;
    s.name = "lm";
    s.config.cell_type = CellType::LSTM;
    s.config.num_layers = 2;
    s.config.layer_sizes = {2048, 8192};
    s.config.hidden_size = 2048;
    s.config.input_size = 2048;
    s.config.input_length = 100;
    s.config.vocab_size = 80000;
    s.config.softmax_every_step = false;
    s.note = "language modelling; heterogeneous 2048/8192 layers";
    apps.push_back(std::move(s));
  }
  {
    // 4 layers at n=277: 4*(2n*4n) of G plus embedding, softmax and
    // intermediates puts the working set at 9.40 MB, just under a
    // 12 MB cache.
    BenchmarkSpec s;
    s.name = "bytener";
    s.config.cell_type = CellType::LSTM;
    s.config.num_layers = 4;
    s.config.hidden_size = 277;
    s.config.input_length = 100;
    s.config.vocab_size = 4;
    s.note = "named entity recognition; fits a 12 MB cache";
    apps.push_back(std::move(s));
  }
  return apps;
}

BenchmarkSpec find_benchmark(const std::string& name) {
  for (auto& s : applications())
    if (s.name == name) return s;
  for (auto& s : grid())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown benchmark: " + name);
}

bool GridFilter::matches(const BenchmarkSpec& s) const {
  if (cell && s.config.cell_type != *cell) return false;
  if (hidden && s.config.hidden_size != *hidden) return false;
  if (layers && s.config.num_layers != *layers) return false;
  if (input_length && s.config.input_length != *input_length) return false;
  if (vocab && s.config.vocab_size != *vocab) return false;
  return true;
}

GridFilter GridFilter::parse(const std::string& expr) {
  GridFilter f;
  std::istringstream ss(expr);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad filter term: " + item);
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "cell")
      f.cell = cell_from_name(value);
    else if (key == "n" || key == "hidden")
      f.hidden = std::stoul(value);
    else if (key == "layers" || key == "l")
      f.layers = std::stoul(value);
    else if (key == "t" || key == "length")
      f.input_length = std::stoul(value);
    else if (key == "vocab" || key == "v")
      f.vocab = std::stoul(value);
    else
      throw std::invalid_argument("unknown filter key: " + key);
  }
  return f;
}

std::vector<BenchmarkSpec> filter_grid(const std::vector<BenchmarkSpec>& specs,
                                       const GridFilter& f) {
  std::vector<BenchmarkSpec> out;
  for (const auto& s : specs)
    if (f.matches(s)) out.push_back(s);
  return out;
}

}  // namespace rnnsched
