#include "rnnsched/tracegen.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>

namespace rnnsched {

const char* schedule_name(Schedule s) { return s == Schedule::A ? "a" : "a+"; }

Schedule schedule_from_name(const std::string& name) {
  if (name == "a" || name == "A") return Schedule::A;
  if (name == "a+" || name == "A+" || name == "aplus") return Schedule::APlus;
  throw std::invalid_argument("unknown schedule: " + name);
}

const char* phase_op_name(PhaseOp op) {
  switch (op) {
    case PhaseOp::Init: return "init";
    case PhaseOp::Matvec: return "matvec";
    case PhaseOp::Precompute: return "precompute";
    case PhaseOp::Gates: return "gates";
    case PhaseOp::Softmax: return "softmax";
    case PhaseOp::Attention: return "attention";
  }
  return "?";
}

std::string Phase::label() const {
  return "L" + std::to_string(layer) + ".S" + std::to_string(step) + "." + phase_op_name(op);
}

void MemoryTrace::add(std::uint32_t tensor, AccessKind kind, Phase phase, std::uint64_t offset,
                      std::uint64_t len) {
  const TensorHandle& t = tensors.at(tensor);
  if (len == 0) throw std::invalid_argument("zero-length access");
  if (offset + len > t.byte_len)
    throw std::out_of_range("access beyond tensor " + t.name + " bounds");
  events.push_back(AccessEvent{tensor, kind, phase, offset, len});
}

void trace_matvec(MemoryTrace& trace, const TensorHandle& m, const Span& x, const Span& y,
                  std::uint64_t block_bytes, Phase phase, std::size_t element_bytes) {
  if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("trace_matvec: degenerate matrix");
  if (x.len != m.rows * element_bytes)
    throw std::invalid_argument("trace_matvec: x length does not match rows(M)");
  if (y.len != m.cols * element_bytes)
    throw std::invalid_argument("trace_matvec: y length does not match cols(M)");
  if (block_bytes < 64) throw std::invalid_argument("trace_matvec: block below one cache line");

  const std::uint64_t row_bytes = m.cols * element_bytes;
  // Keep the x chunk within half the block so the streamed M panel and
  // the accumulator have room.
  const std::size_t chunk_rows =
      std::max<std::size_t>(1, static_cast<std::size_t>(block_bytes / 2 / element_bytes));

  bool first_chunk = true;
  for (std::size_t r0 = 0; r0 < m.rows; r0 += chunk_rows) {
    const std::size_t r1 = std::min(m.rows, r0 + chunk_rows);
    trace.add(x.tensor, AccessKind::Read, phase, x.offset + r0 * element_bytes,
              (r1 - r0) * element_bytes);
    trace.add(m.id, AccessKind::Read, phase, r0 * row_bytes, (r1 - r0) * row_bytes);
    if (!first_chunk) trace.add(y.tensor, AccessKind::Read, phase, y.offset, y.len);
    trace.add(y.tensor, AccessKind::Write, phase, y.offset, y.len);
    first_chunk = false;
  }
}

namespace {

struct Builder {
  const NetworkLayout& layout;
  const TraceOptions& opts;
  MemoryTrace trace;
  std::size_t eb;

  explicit Builder(const NetworkLayout& l, const TraceOptions& o)
      : layout(l), opts(o), eb(l.config.element_bytes) {
    trace.tensors = l.tensors;
  }

  Span whole(const TensorHandle& t) const { return Span{t.id, 0, t.byte_len}; }
  Span row(const TensorHandle& t, std::size_t r) const {
    const std::uint64_t rb = t.cols * eb;
    return Span{t.id, r * rb, rb};
  }

  /// Input span of layer `l` at step `t`: an embedding row for layer 0
  /// of a vocab network, otherwise a row of the layer's input matrix.
  Span input_span(std::size_t l, std::size_t t) const {
    const NetworkConfig& c = layout.config;
    if (l == 0 && c.vocab_size > 0) {
      const TensorHandle& emb = layout.get(TensorRole::Embedding);
      return row(emb, t % c.vocab_size);
    }
    return row(layout.get(TensorRole::InputVector, static_cast<int>(l)), t);
  }

  void init_states(std::size_t l) {
    Phase ph{static_cast<std::int16_t>(l), -1, PhaseOp::Init};
    const TensorHandle& h = layout.get(TensorRole::HiddenState, static_cast<int>(l));
    trace.add(h.id, AccessKind::Write, ph, 0, h.byte_len);
    if (layout.config.cell_type == CellType::LSTM) {
      const TensorHandle& c = layout.get(TensorRole::CellState, static_cast<int>(l));
      trace.add(c.id, AccessKind::Write, ph, 0, c.byte_len);
    }
  }

  /// Elementwise gate/state update traffic plus the hidden-output row
  /// written into the next layer's input matrix.
  void gates_and_state(std::size_t l, std::size_t t) {
    Phase ph{static_cast<std::int16_t>(l), static_cast<std::int32_t>(t), PhaseOp::Gates};
    const TensorHandle& gates = layout.get(TensorRole::GateBuffer, static_cast<int>(l));
    const TensorHandle& h = layout.get(TensorRole::HiddenState, static_cast<int>(l));
    trace.add(gates.id, AccessKind::Read, ph, 0, gates.byte_len);
    if (layout.config.cell_type == CellType::LSTM) {
      const TensorHandle& c = layout.get(TensorRole::CellState, static_cast<int>(l));
      trace.add(c.id, AccessKind::Read, ph, 0, c.byte_len);
      trace.add(c.id, AccessKind::Write, ph, 0, c.byte_len);
    } else {
      trace.add(h.id, AccessKind::Read, ph, 0, h.byte_len);
    }
    trace.add(h.id, AccessKind::Write, ph, 0, h.byte_len);
    const TensorHandle& out =
        layout.get(TensorRole::InputVector, static_cast<int>(l + 1));
    trace.add(out.id, AccessKind::Write, ph, t * out.cols * eb, out.cols * eb);
  }

  void softmax_step(std::size_t t) {
    const NetworkConfig& c = layout.config;
    const std::size_t last = c.num_layers - 1;
    const TensorHandle& w = layout.get(TensorRole::SoftmaxWeight);
    const TensorHandle& h = layout.get(TensorRole::HiddenState, static_cast<int>(last));
    const TensorHandle& logits = layout.get(TensorRole::Logits);
    Phase ph{static_cast<std::int16_t>(last), static_cast<std::int32_t>(t), PhaseOp::Softmax};
    trace_matvec(trace, w, Span{h.id, 0, h.byte_len}, whole(logits), opts.block_bytes, ph, eb);
  }

  void maybe_softmax(std::size_t l, std::size_t t) {
    const NetworkConfig& c = layout.config;
    if (c.vocab_size == 0 || l != c.num_layers - 1) return;
    if (c.softmax_every_step || t == c.input_length - 1) softmax_step(t);
  }

  bool layer_eligible(std::size_t l) const {
    if (opts.layer_a_plus_ok.empty()) return true;
    return opts.layer_a_plus_ok.at(l) != 0;
  }

  /// First A+-ineligible layer, where the per-step attention matvec is
  /// charged (decoder entry point); npos when every layer is eligible.
  std::size_t attention_layer() const {
    if (layout.extras.attention_rows == 0) return static_cast<std::size_t>(-1);
    for (std::size_t l = 0; l < layout.config.num_layers; ++l)
      if (!layer_eligible(l)) return l;
    return static_cast<std::size_t>(-1);
  }

  void attention_step(std::size_t l, std::size_t t) {
    const TensorHandle& w = layout.get(TensorRole::ConcatWeight);
    const TensorHandle& h = layout.get(TensorRole::HiddenState, static_cast<int>(l));
    const TensorHandle& gates = layout.get(TensorRole::GateBuffer, static_cast<int>(l));
    Phase ph{static_cast<std::int16_t>(l), static_cast<std::int32_t>(t), PhaseOp::Attention};
    const std::uint64_t vec = w.rows * eb;
    if (vec > h.byte_len || w.cols * eb > gates.byte_len)
      throw std::invalid_argument("attention size exceeds layer buffers");
    // Coarse fixed-weight matvec; the result lands in the gate buffer
    // which the layer's own matvec overwrites right after.
    trace_matvec(trace, w, Span{h.id, 0, vec}, Span{gates.id, 0, w.cols * eb}, opts.block_bytes,
                 ph, eb);
  }

  /// One Schedule A step of layer l: G1 and G2 both swept.
  void schedule_a_step(std::size_t l, std::size_t t) {
    const TensorHandle& g1 = layout.get(TensorRole::InputWeight, static_cast<int>(l));
    const TensorHandle& g2 = layout.get(TensorRole::RecurrentWeight, static_cast<int>(l));
    const TensorHandle& gates = layout.get(TensorRole::GateBuffer, static_cast<int>(l));
    const TensorHandle& h = layout.get(TensorRole::HiddenState, static_cast<int>(l));
    Phase ph{static_cast<std::int16_t>(l), static_cast<std::int32_t>(t), PhaseOp::Matvec};
    if (attention_layer() == l) attention_step(l, t);
    trace_matvec(trace, g1, input_span(l, t), whole(gates), opts.block_bytes, ph, eb);
    // The recurrent half accumulates into the gate buffer.
    trace.add(gates.id, AccessKind::Read, ph, 0, gates.byte_len);
    trace_matvec(trace, g2, Span{h.id, 0, h.byte_len}, whole(gates), opts.block_bytes, ph, eb);
    gates_and_state(l, t);
    maybe_softmax(l, t);
  }

  void layer_schedule_a(std::size_t l) {
    init_states(l);
    for (std::size_t t = 0; t < layout.config.input_length; ++t) schedule_a_step(l, t);
  }

  void layer_schedule_a_plus(std::size_t l) {
    const NetworkConfig& c = layout.config;
    const TensorHandle& g1 = layout.get(TensorRole::InputWeight, static_cast<int>(l));
    const TensorHandle& g2 = layout.get(TensorRole::RecurrentWeight, static_cast<int>(l));
    const TensorHandle& xp = layout.get(TensorRole::PrecomputedX, static_cast<int>(l));
    const TensorHandle& gates = layout.get(TensorRole::GateBuffer, static_cast<int>(l));
    const TensorHandle& h = layout.get(TensorRole::HiddenState, static_cast<int>(l));

    init_states(l);

    // Phase 1: X' = G1t I'. I' streamed, G1 bytes exactly once, X'
    // written once.
    Phase pre{static_cast<std::int16_t>(l), -1, PhaseOp::Precompute};
    if (l == 0 && c.vocab_size > 0) {
      const TensorHandle& emb = layout.get(TensorRole::Embedding);
      for (std::size_t t = 0; t < c.input_length; ++t) {
        const Span s = row(emb, t % c.vocab_size);
        trace.add(s.tensor, AccessKind::Read, pre, s.offset, s.len);
      }
    } else {
      const TensorHandle& in = layout.get(TensorRole::InputVector, static_cast<int>(l));
      trace.add(in.id, AccessKind::Read, pre, 0, in.byte_len);
    }
    trace.add(g1.id, AccessKind::Read, pre, 0, g1.byte_len);
    trace.add(xp.id, AccessKind::Write, pre, 0, xp.byte_len);

    // Phase 2: per step, the precomputed column plus the recurrent
    // product.
    for (std::size_t t = 0; t < c.input_length; ++t) {
      Phase ph{static_cast<std::int16_t>(l), static_cast<std::int32_t>(t), PhaseOp::Matvec};
      const Span xprow = row(xp, t);
      trace.add(xprow.tensor, AccessKind::Read, ph, xprow.offset, xprow.len);
      trace.add(gates.id, AccessKind::Write, ph, 0, gates.byte_len);
      trace.add(gates.id, AccessKind::Read, ph, 0, gates.byte_len);
      trace_matvec(trace, g2, Span{h.id, 0, h.byte_len}, whole(gates), opts.block_bytes, ph, eb);
      gates_and_state(l, t);
      maybe_softmax(l, t);
    }
  }
};

}  // namespace

MemoryTrace trace_schedule_a(const NetworkLayout& layout, const TraceOptions& opts) {
  layout.config.validate();
  Builder b(layout, opts);
  for (std::size_t l = 0; l < layout.config.num_layers; ++l) b.layer_schedule_a(l);
  return std::move(b.trace);
}

MemoryTrace trace_schedule_a_plus(const NetworkLayout& layout, const TraceOptions& opts) {
  layout.config.validate();
  Builder b(layout, opts);
  for (std::size_t l = 0; l < layout.config.num_layers; ++l) {
    if (b.layer_eligible(l))
      b.layer_schedule_a_plus(l);
    else
      b.layer_schedule_a(l);
  }
  return std::move(b.trace);
}

MemoryTrace trace_schedule(const NetworkLayout& layout, Schedule schedule,
                           const TraceOptions& opts) {
  return schedule == Schedule::A ? trace_schedule_a(layout, opts)
                                 : trace_schedule_a_plus(layout, opts);
}

std::uint64_t trace_weight_read_bytes(const MemoryTrace& trace) {
  std::uint64_t total = 0;
  for (const AccessEvent& e : trace.events)
    if (e.kind == AccessKind::Read && is_weight_role(trace.tensors[e.tensor].role))
      total += e.len;
  return total;
}

bool trace_is_legal(const MemoryTrace& trace) {
  // Written intervals per tensor, kept merged.
  std::vector<std::map<std::uint64_t, std::uint64_t>> written(trace.tensors.size());

  auto covered = [&](std::uint32_t t, std::uint64_t lo, std::uint64_t hi) {
    const auto& m = written[t];
    auto it = m.upper_bound(lo);
    if (it == m.begin()) return false;
    --it;
    return it->first <= lo && it->second >= hi;
  };
  auto mark = [&](std::uint32_t t, std::uint64_t lo, std::uint64_t hi) {
    auto& m = written[t];
    auto it = m.upper_bound(lo);
    if (it != m.begin()) {
      auto prev = std::prev(it);
      if (prev->second >= lo) {
        lo = prev->first;
        hi = std::max(hi, prev->second);
        it = m.erase(prev);
      }
    }
    while (it != m.end() && it->first <= hi) {
      hi = std::max(hi, it->second);
      it = m.erase(it);
    }
    m[lo] = hi;
  };

  for (const AccessEvent& e : trace.events) {
    const TensorHandle& t = trace.tensors[e.tensor];
    if (e.kind == AccessKind::Write) {
      mark(e.tensor, e.offset, e.offset + e.len);
      continue;
    }
    const bool exempt = is_weight_role(t.role) || t.role == TensorRole::Embedding ||
                        t.role == TensorRole::SoftmaxWeight ||
                        (t.role == TensorRole::InputVector && t.layer == 0);
    if (exempt) continue;
    if (!covered(e.tensor, e.offset, e.offset + e.len)) return false;
  }
  return true;
}

void dump_trace(const MemoryTrace& trace, std::ostream& out) {
  for (const AccessEvent& e : trace.events) {
    out << e.phase.label() << '\t' << e.tensor << '\t'
        << (e.kind == AccessKind::Read ? 'R' : 'W') << '\t' << e.offset << '\t' << e.len << '\n';
  }
}

}  // namespace rnnsched
