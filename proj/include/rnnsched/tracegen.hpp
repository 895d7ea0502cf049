#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rnnsched/model.hpp"

namespace rnnsched {

enum class Schedule { A, APlus };

const char* schedule_name(Schedule s);
Schedule schedule_from_name(const std::string& name);

enum class AccessKind : std::uint8_t { Read, Write };

enum class PhaseOp : std::uint8_t {
  Init,
  Matvec,      // blocked weight matvec
  Precompute,  // A+ phase 1, X' = G1t I'
  Gates,       // elementwise gate/state update
  Softmax,
  Attention,
};

const char* phase_op_name(PhaseOp op);

struct Phase {
  std::int16_t layer = -1;
  std::int32_t step = -1;
  PhaseOp op = PhaseOp::Init;

  std::string label() const;
};

struct AccessEvent {
  std::uint32_t tensor = 0;
  AccessKind kind = AccessKind::Read;
  Phase phase;
  std::uint64_t offset = 0;  // bytes into the tensor
  std::uint64_t len = 0;     // bytes
};

/// Ordered byte-level access stream plus a snapshot of the tensor
/// table it indexes into; self contained for replay and dumping.
struct MemoryTrace {
  std::vector<TensorHandle> tensors;
  std::vector<AccessEvent> events;

  void add(std::uint32_t tensor, AccessKind kind, Phase phase, std::uint64_t offset,
           std::uint64_t len);
};

struct TraceOptions {
  // Blocking budget for trace_matvec; half the simulated cache by
  // default.
  std::uint64_t block_bytes = 6ull << 20;
  // Per-layer split-G eligibility; empty = every layer eligible.
  // Ineligible (decoder-style) layers fall back to Schedule A ordering
  // inside an A+ trace.
  std::vector<std::uint8_t> layer_a_plus_ok;
};

/// Contiguous byte range inside a tensor, used for matvec operands.
struct Span {
  std::uint32_t tensor = 0;
  std::uint64_t offset = 0;
  std::uint64_t len = 0;
};

/// Blocked y = Mt x traversal. x is split into chunks that fit the
/// block budget; for each chunk the matching row panel of M is
/// streamed (every M byte appears exactly once over the whole matvec)
/// and y is accumulated. The first chunk writes y, later chunks
/// read+write it.
void trace_matvec(MemoryTrace& trace, const TensorHandle& m, const Span& x, const Span& y,
                  std::uint64_t block_bytes, Phase phase, std::size_t element_bytes);

MemoryTrace trace_schedule_a(const NetworkLayout& layout, const TraceOptions& opts = {});
MemoryTrace trace_schedule_a_plus(const NetworkLayout& layout, const TraceOptions& opts = {});
MemoryTrace trace_schedule(const NetworkLayout& layout, Schedule schedule,
                           const TraceOptions& opts = {});

/// Sum of read-event bytes over G1/G2/standalone weight tensors,
/// before any cache model is applied.
std::uint64_t trace_weight_read_bytes(const MemoryTrace& trace);

/// True when no intermediate tensor byte is read before it was
/// written. Weights, embeddings and the external input stream are
/// exempt.
bool trace_is_legal(const MemoryTrace& trace);

/// One event per line: `phase<TAB>tensor_id<TAB>kind<TAB>offset<TAB>len`.
void dump_trace(const MemoryTrace& trace, std::ostream& out);

}  // namespace rnnsched
