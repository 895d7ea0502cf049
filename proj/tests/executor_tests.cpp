#include <cmath>
#include <random>

#include <doctest.h>

#include "rnnsched/executor.hpp"
#include "support/generators.hpp"

using namespace rnnsched;

namespace {

// Straight-line double-precision oracle, written gate by gate rather
// than as blocked matvecs.
struct Oracle {
  static std::vector<double> column_sum(const Matrix& g1, const Matrix& g2,
                                        const std::vector<double>& x,
                                        const std::vector<double>& h, std::size_t gate,
                                        std::size_t n) {
    std::vector<double> y(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t col = gate * n + k;
      for (std::size_t j = 0; j < g1.rows; ++j) y[k] += double(x[j]) * g1.at(j, col);
      for (std::size_t j = 0; j < g2.rows; ++j) y[k] += double(h[j]) * g2.at(j, col);
    }
    return y;
  }

  static void lstm_step(const LayerWeights& w, const std::vector<double>& x,
                        std::vector<double>& h, std::vector<double>& c, bool standard) {
    const std::size_t n = h.size();
    const auto yf = column_sum(w.g1, w.g2, x, h, 0, n);
    const auto yi = column_sum(w.g1, w.g2, x, h, 1, n);
    const auto yo = column_sum(w.g1, w.g2, x, h, 2, n);
    const auto yc = column_sum(w.g1, w.g2, x, h, 3, n);
    for (std::size_t k = 0; k < n; ++k) {
      const double f = 1.0 / (1.0 + std::exp(-yf[k]));
      const double i = 1.0 / (1.0 + std::exp(-yi[k]));
      const double o = 1.0 / (1.0 + std::exp(-yo[k]));
      c[k] = f * c[k] + i * std::tanh(yc[k]);
      h[k] = standard ? o * std::tanh(c[k]) : o * c[k];
    }
  }

  static void gru_step(const LayerWeights& w, const std::vector<double>& x,
                       std::vector<double>& h) {
    const std::size_t n = h.size();
    const auto yz = column_sum(w.g1, w.g2, x, h, 0, n);
    const auto yr = column_sum(w.g1, w.g2, x, h, 1, n);
    std::vector<double> z(n), r(n);
    for (std::size_t k = 0; k < n; ++k) {
      z[k] = 1.0 / (1.0 + std::exp(-yz[k]));
      r[k] = 1.0 / (1.0 + std::exp(-yr[k]));
    }
    std::vector<double> rh(n);
    for (std::size_t k = 0; k < n; ++k) rh[k] = r[k] * h[k];
    const auto yc = column_sum(w.g1, w.g2, x, rh, 2, n);
    // column_sum added U_c rh and W_c x together, which is what the
    // candidate needs
    for (std::size_t k = 0; k < n; ++k)
      h[k] = (1.0 - z[k]) * h[k] + z[k] * std::tanh(yc[k]);
  }

  static std::vector<std::vector<double>> run(const NetworkConfig& c, const WeightSet& w,
                                              const Matrix& inputs) {
    std::vector<std::vector<double>> final_h;
    std::vector<double> current(inputs.data.begin(), inputs.data.end());
    std::size_t width = inputs.cols;
    for (std::size_t l = 0; l < c.num_layers; ++l) {
      const std::size_t n = c.layer_hidden(l);
      std::vector<double> h(n, 0.0), cc(n, 0.0), out;
      for (std::size_t t = 0; t < c.input_length; ++t) {
        std::vector<double> x(current.begin() + std::ptrdiff_t(t * width),
                              current.begin() + std::ptrdiff_t((t + 1) * width));
        if (c.cell_type == CellType::LSTM)
          lstm_step(w.layers[l], x, h, cc, c.standard_output_gate);
        else
          gru_step(w.layers[l], x, h);
        out.insert(out.end(), h.begin(), h.end());
      }
      final_h.push_back(h);
      current = std::move(out);
      width = n;
    }
    return final_h;
  }
};

}  // namespace

TEST_CASE("lstm gate arithmetic at the zero-weight fixed point") {
  std::vector<float> y(4, 0.0f), h{0.0f}, c{1.0f};
  lstm_apply_gates(y, h, c, false);
  CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(h[0] == doctest::Approx(0.25).epsilon(1e-7));

  y.assign(4, 0.0f);
  h = {0.0f};
  c = {1.0f};
  lstm_apply_gates(y, h, c, true);
  CHECK(h[0] == doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-6));
}

TEST_CASE("gru collapses to h' = h/2 with zero weights") {
  Matrix g1(1, 3), g2(1, 3);
  std::vector<float> h{0.8f};
  std::vector<float> x{3.0f};
  gru_step_a(g1, g2, std::span<const float>(x.data(), 1), h);
  CHECK(h[0] == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("frozen scalar lstm step") {
  Matrix g1(1, 4), g2(1, 4);
  g1.at(0, 2) = 10.0f;  // output gate column
  std::vector<double> h{0.0}, c{1.0};
  std::vector<double> x{1.0};
  lstm_step_a(g1, g2, std::span<const double>(x.data(), 1), h, c);
  CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h[0] == doctest::Approx(0.4999773010656488).epsilon(1e-12));
}

TEST_CASE("full runs match the straight-line oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    NetworkConfig c = testsupport::random_small_config(rng);
    c.hidden_size = 1 + rng() % 8;
    c.input_size = 1 + rng() % 8;
    c.input_length = 1 + rng() % 6;
    const auto [layout, weights] = build_network(c, rng());
    const Matrix inputs = make_inputs(c, rng());

    const auto got = run_schedule_a<double>(c, weights, inputs);
    const auto want = Oracle::run(c, weights, inputs);
    REQUIRE(got.final_h.size() == want.size());
    for (std::size_t l = 0; l < want.size(); ++l)
      for (std::size_t k = 0; k < want[l].size(); ++k)
        CHECK(got.final_h[l][k] == doctest::Approx(want[l][k]).epsilon(1e-10));
  }
}

TEST_CASE("schedules agree numerically") {
  std::mt19937_64 rng(7);
  double worst_f = 0.0, worst_d = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const NetworkConfig c = testsupport::random_small_config(rng);
    const auto [layout, weights] = build_network(c, rng());
    const Matrix inputs = make_inputs(c, rng());
    worst_f = std::max(worst_f, max_relative_difference(run_schedule_a<float>(c, weights, inputs),
                                                         run_schedule_a_plus<float>(c, weights, inputs)));
    worst_d = std::max(worst_d, max_relative_difference(run_schedule_a<double>(c, weights, inputs),
                                                        run_schedule_a_plus<double>(c, weights, inputs)));
  }
  CHECK(worst_f <= 1e-5);
  CHECK(worst_d <= 1e-12);
}

TEST_CASE("hidden state stays bounded over long runs") {
  std::mt19937_64 rng(11);
  NetworkConfig c;
  c.cell_type = CellType::LSTM;
  c.hidden_size = 16;
  c.input_length = 200;
  const auto [layout, weights] = build_network(c, rng());
  const Matrix inputs = make_inputs(c, rng());
  const auto r = run_schedule_a<float>(c, weights, inputs);
  for (float v : r.final_c[0]) {
    CHECK(std::isfinite(v));
    // |c_t| <= |c_{t-1}| + 1, from zero initial state
    CHECK(std::abs(v) <= 200.0f);
  }
}

TEST_CASE("softmax produces a distribution") {
  Matrix w(4, 9);
  std::mt19937_64 rng(3);
  for (float& v : w.data) v = float(int(rng() % 41) - 20) / 7.0f;
  std::vector<float> h{0.3f, -1.2f, 0.7f, 2.0f};
  const auto p = softmax_logits(w, std::span<const float>(h.data(), h.size()));
  double sum = 0.0;
  for (float v : p) {
    CHECK(v > 0.0f);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}
