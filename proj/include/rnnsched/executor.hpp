#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rnnsched/model.hpp"

namespace rnnsched {

/// Per-layer hidden outputs of a full run. outputs[l] is [T x n_l]
/// row-major; final_h[l] / final_c[l] are the states after the last
/// step.
template <typename S>
struct RunResultT {
  std::vector<std::vector<S>> outputs;
  std::vector<std::vector<S>> final_h;
  std::vector<std::vector<S>> final_c;  // empty for GRU
};

using RunResult = RunResultT<float>;

namespace detail {

template <typename S>
S sigmoid(S x) {
  return S(1) / (S(1) + std::exp(-x));
}

/// y += Mt x over the rows [row_begin, row_end) of m, i.e. the
/// contribution of that slice of the stacked input vector.
template <typename S>
void accumulate_matvec(const Matrix& m, std::span<const S> x, std::vector<S>& y) {
  if (x.size() != m.rows || y.size() != m.cols)
    throw std::invalid_argument("matvec dimension mismatch");
  for (std::size_t r = 0; r < m.rows; ++r) {
    const S xv = x[r];
    const float* row = m.data.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) y[c] += xv * static_cast<S>(row[c]);
  }
}

}  // namespace detail

/// One LSTM step with a pre-summed gate vector y (length 4n): sigmoid
/// over the first 3n entries, tanh over the last n, then the state
/// update. The literal output gate form h = o.c is the default.
template <typename S>
void lstm_apply_gates(std::vector<S>& y, std::vector<S>& h, std::vector<S>& c,
                      bool standard_output_gate) {
  const std::size_t n = h.size();
  if (y.size() != 4 * n || c.size() != n) throw std::invalid_argument("lstm gate size mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    const S f = detail::sigmoid(y[k]);
    const S i = detail::sigmoid(y[n + k]);
    const S o = detail::sigmoid(y[2 * n + k]);
    const S cand = std::tanh(y[3 * n + k]);
    c[k] = f * c[k] + i * cand;
    h[k] = standard_output_gate ? o * std::tanh(c[k]) : o * c[k];
  }
}

/// One LSTM step of Schedule A: Y = Gt concat(x, h), gates, update.
template <typename S>
void lstm_step_a(const Matrix& g1, const Matrix& g2, std::span<const S> x, std::vector<S>& h,
                 std::vector<S>& c, bool standard_output_gate = false) {
  std::vector<S> y(g1.cols, S(0));
  detail::accumulate_matvec(g1, x, y);
  detail::accumulate_matvec(g2, std::span<const S>(h.data(), h.size()), y);
  lstm_apply_gates(y, h, c, standard_output_gate);
}

/// One GRU step of Schedule A. Gate column order is (z, r, candidate);
/// the candidate recurrent term uses r (elementwise) h.
template <typename S>
void gru_step_a(const Matrix& g1, const Matrix& g2, std::span<const S> x, std::vector<S>& h) {
  const std::size_t n = h.size();
  std::vector<S> y(g1.cols, S(0));
  detail::accumulate_matvec(g1, x, y);
  // z and r need the plain recurrent product; the candidate column
  // block is fixed up below once r is known.
  std::vector<S> rec(g2.cols, S(0));
  detail::accumulate_matvec(g2, std::span<const S>(h.data(), h.size()), rec);
  for (std::size_t k = 0; k < 2 * n; ++k) y[k] += rec[k];

  std::vector<S> z(n), r(n);
  for (std::size_t k = 0; k < n; ++k) {
    z[k] = detail::sigmoid(y[k]);
    r[k] = detail::sigmoid(y[n + k]);
  }
  std::vector<S> rh(n);
  for (std::size_t k = 0; k < n; ++k) rh[k] = r[k] * h[k];
  std::vector<S> cand(n, S(0));
  for (std::size_t i = 0; i < n; ++i) {
    const S v = rh[i];
    const float* row = g2.data.data() + i * g2.cols + 2 * n;
    for (std::size_t k = 0; k < n; ++k) cand[k] += v * static_cast<S>(row[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const S c = std::tanh(y[2 * n + k] + cand[k]);
    h[k] = (S(1) - z[k]) * h[k] + z[k] * c;
  }
}

template <typename S>
RunResultT<S> run_schedule_a(const NetworkConfig& config, const WeightSet& weights,
                             const Matrix& inputs) {
  config.validate();
  const std::size_t T = config.input_length;
  if (inputs.rows != T || inputs.cols != config.layer_input(0))
    throw std::invalid_argument("input matrix shape mismatch");

  RunResultT<S> result;
  std::vector<S> current(inputs.data.begin(), inputs.data.end());
  std::size_t current_width = inputs.cols;

  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const std::size_t n = config.layer_hidden(l);
    const LayerWeights& lw = weights.layers.at(l);
    std::vector<S> h(n, S(0)), c(n, S(0));
    std::vector<S> out(T * n, S(0));
    for (std::size_t t = 0; t < T; ++t) {
      std::span<const S> x(current.data() + t * current_width, current_width);
      if (config.cell_type == CellType::LSTM)
        lstm_step_a(lw.g1, lw.g2, x, h, c, config.standard_output_gate);
      else
        gru_step_a(lw.g1, lw.g2, x, h);
      std::copy(h.begin(), h.end(), out.begin() + static_cast<std::ptrdiff_t>(t * n));
    }
    result.final_h.push_back(h);
    if (config.cell_type == CellType::LSTM) result.final_c.push_back(c);
    current = out;
    current_width = n;
    result.outputs.push_back(std::move(out));
  }
  return result;
}

template <typename S>
RunResultT<S> run_schedule_a_plus(const NetworkConfig& config, const WeightSet& weights,
                                  const Matrix& inputs) {
  config.validate();
  const std::size_t T = config.input_length;
  if (inputs.rows != T || inputs.cols != config.layer_input(0))
    throw std::invalid_argument("input matrix shape mismatch");

  RunResultT<S> result;
  std::vector<S> current(inputs.data.begin(), inputs.data.end());
  std::size_t current_width = inputs.cols;

  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const std::size_t n = config.layer_hidden(l);
    const LayerWeights& lw = weights.layers.at(l);
    const std::size_t gn = lw.g1.cols;

    // Phase 1: X' = G1t I', all input-weight products at once.
    std::vector<std::vector<S>> xp(T);
    for (std::size_t t = 0; t < T; ++t) {
      xp[t].assign(gn, S(0));
      std::span<const S> x(current.data() + t * current_width, current_width);
      detail::accumulate_matvec(lw.g1, x, xp[t]);
    }

    // Phase 2: recurrent products plus the precomputed column.
    std::vector<S> h(n, S(0)), c(n, S(0));
    std::vector<S> out(T * n, S(0));
    for (std::size_t t = 0; t < T; ++t) {
      if (config.cell_type == CellType::LSTM) {
        std::vector<S> y = xp[t];
        detail::accumulate_matvec(lw.g2, std::span<const S>(h.data(), h.size()), y);
        lstm_apply_gates(y, h, c, config.standard_output_gate);
      } else {
        std::vector<S> y = xp[t];
        std::vector<S> rec(gn, S(0));
        detail::accumulate_matvec(lw.g2, std::span<const S>(h.data(), h.size()), rec);
        for (std::size_t k = 0; k < 2 * n; ++k) y[k] += rec[k];
        std::vector<S> z(n), r(n);
        for (std::size_t k = 0; k < n; ++k) {
          z[k] = detail::sigmoid(y[k]);
          r[k] = detail::sigmoid(y[n + k]);
        }
        std::vector<S> cand(n, S(0));
        for (std::size_t i = 0; i < n; ++i) {
          const S v = r[i] * h[i];
          const float* row = lw.g2.data.data() + i * lw.g2.cols + 2 * n;
          for (std::size_t k = 0; k < n; ++k) cand[k] += v * static_cast<S>(row[k]);
        }
        for (std::size_t k = 0; k < n; ++k) {
          const S cv = std::tanh(y[2 * n + k] + cand[k]);
          h[k] = (S(1) - z[k]) * h[k] + z[k] * cv;
        }
      }
      std::copy(h.begin(), h.end(), out.begin() + static_cast<std::ptrdiff_t>(t * n));
    }
    result.final_h.push_back(h);
    if (config.cell_type == CellType::LSTM) result.final_c.push_back(c);
    current = out;
    current_width = n;
    result.outputs.push_back(std::move(out));
  }
  return result;
}

/// Max-subtracted softmax over Wt h for the configured vocabulary.
template <typename S>
std::vector<S> softmax_logits(const Matrix& softmax_weight, std::span<const S> h) {
  std::vector<S> logits(softmax_weight.cols, S(0));
  detail::accumulate_matvec(softmax_weight, h, logits);
  S mx = logits.empty() ? S(0) : logits[0];
  for (S v : logits) mx = std::max(mx, v);
  S sum = S(0);
  for (S& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (S& v : logits) v /= sum;
  return logits;
}

/// Largest relative elementwise difference between two final-state
/// sets; the schedule-equivalence metric.
template <typename S>
double max_relative_difference(const RunResultT<S>& a, const RunResultT<S>& b) {
  double worst = 0.0;
  auto scan = [&](const std::vector<std::vector<S>>& x, const std::vector<std::vector<S>>& y) {
    for (std::size_t l = 0; l < x.size(); ++l)
      for (std::size_t k = 0; k < x[l].size(); ++k) {
        const double d = std::abs(double(x[l][k]) - double(y[l][k]));
        const double scale = std::max(std::abs(double(x[l][k])), std::abs(double(y[l][k])));
        worst = std::max(worst, d / std::max(1.0, scale));
      }
  };
  scan(a.final_h, b.final_h);
  scan(a.final_c, b.final_c);
  return worst;
}

}  // namespace rnnsched
