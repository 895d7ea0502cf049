#include <random>

#include <doctest.h>

#include "rnnsched/cachesim.hpp"
#include "support/generators.hpp"

using namespace rnnsched;

namespace {

MemoryTrace lines_trace(std::uint64_t tensor_lines) {
  MemoryTrace t;
  TensorHandle h;
  h.id = 0;
  h.role = TensorRole::RecurrentWeight;
  h.byte_len = tensor_lines * 64;
  h.name = "w";
  t.tensors = {h};
  return t;
}

CacheConfig cap_lines(std::uint64_t lines) {
  CacheConfig c;
  c.capacity_bytes = lines * 64;
  return c;
}

}  // namespace

TEST_CASE("hand-checked four-access trace") {
  MemoryTrace t = lines_trace(2);
  t.add(0, AccessKind::Read, Phase{}, 0, 64);
  t.add(0, AccessKind::Read, Phase{}, 0, 64);
  t.add(0, AccessKind::Read, Phase{}, 64, 64);
  t.add(0, AccessKind::Write, Phase{}, 64, 64);

  const TrafficStats s = simulate(t, cap_lines(1));
  CHECK(s.misses == 2);
  CHECK(s.hits == 2);
  CHECK(s.writebacks == 1);  // final flush
  CHECK(s.mem_read_bytes == 128);
  CHECK(s.mem_write_bytes == 64);
}

TEST_CASE("resident data only misses cold") {
  MemoryTrace t = lines_trace(10);
  t.add(0, AccessKind::Read, Phase{}, 0, 10 * 64);
  t.add(0, AccessKind::Read, Phase{}, 0, 10 * 64);
  const TrafficStats once = simulate(t, cap_lines(16));
  CHECK(once.misses == 10);
  CHECK(once.hits == 10);
  CHECK(once.writebacks == 0);

  const TrafficStats warm = simulate_warm(t, cap_lines(16), 5);
  CHECK(warm.misses == 10);
  CHECK(warm.hits == 90);
  CHECK(warm.avg_rw_bytes() == doctest::Approx(10 * 64.0 / 5));
}

TEST_CASE("unbounded cache never evicts") {
  std::mt19937_64 rng(5);
  const MemoryTrace t = testsupport::random_trace(rng, 64 * 64);
  CacheConfig c;
  c.capacity_bytes = 0;
  const TrafficStats s = simulate(t, c);
  CHECK(s.misses * 64 == unique_footprint(t));
  const TrafficStats warm = simulate_warm(t, c, 2);
  CHECK(warm.misses == s.misses);  // the second run is all hits
}

TEST_CASE("capacity sweep cascades through its own tail") {
  // A 6-line tensor streamed through a 4-line cache: the second sweep
  // evicts the surviving window ahead of reaching it, so it misses on
  // every line too.
  MemoryTrace t = lines_trace(6);
  t.add(0, AccessKind::Read, Phase{}, 0, 6 * 64);
  t.add(0, AccessKind::Read, Phase{}, 0, 6 * 64);
  const TrafficStats fast = simulate(t, cap_lines(4));
  const TrafficStats ref = simulate_reference(t, cap_lines(4));
  CHECK(fast.misses == 12);
  CHECK(fast.hits == 0);
  CHECK(ref.misses == fast.misses);
  CHECK(ref.hits == fast.hits);
}

TEST_CASE("interleaved small accesses nibble the sweep window") {
  MemoryTrace t;
  TensorHandle w, v;
  w.id = 0;
  w.role = TensorRole::RecurrentWeight;
  w.byte_len = 8 * 64;
  v.id = 1;
  v.role = TensorRole::HiddenState;
  v.base_address = 8 * 64;
  v.byte_len = 2 * 64;
  t.tensors = {w, v};
  for (int rep = 0; rep < 4; ++rep) {
    t.add(0, AccessKind::Read, Phase{}, 0, 8 * 64);
    t.add(1, AccessKind::Write, Phase{}, 0, 64);
    t.add(1, AccessKind::Read, Phase{}, 64, 64);
  }
  for (std::uint64_t lines : {4, 6, 8, 16}) {
    const TrafficStats fast = simulate(t, cap_lines(lines));
    const TrafficStats ref = simulate_reference(t, cap_lines(lines));
    CHECK(fast.hits == ref.hits);
    CHECK(fast.misses == ref.misses);
    CHECK(fast.writebacks == ref.writebacks);
  }
}

TEST_CASE("randomized equivalence with the reference simulator") {
  std::mt19937_64 rng(0xace);
  for (int trial = 0; trial < 60; ++trial) {
    CacheConfig cache;
    const std::uint64_t lines = 4ull << (rng() % 5);
    cache.capacity_bytes = rng() % 8 == 0 ? 0 : lines * 64;
    if (cache.capacity_bytes != 0 && rng() % 4 == 0) cache.ways = rng() % 2 ? 2 : 4;
    cache.writeback_flush = rng() % 4 != 0;
    const MemoryTrace t = testsupport::random_trace(rng, (lines + rng() % lines) * 64);

    const TrafficStats fast = simulate(t, cache);
    const TrafficStats ref = simulate_reference(t, cache);
    REQUIRE(fast.hits == ref.hits);
    REQUIRE(fast.misses == ref.misses);
    REQUIRE(fast.writebacks == ref.writebacks);
    REQUIRE(fast.per_tensor.size() == ref.per_tensor.size());
    for (std::size_t i = 0; i < ref.per_tensor.size(); ++i) {
      REQUIRE(fast.per_tensor[i].read_bytes == ref.per_tensor[i].read_bytes);
      REQUIRE(fast.per_tensor[i].write_bytes == ref.per_tensor[i].write_bytes);
    }
  }
}

TEST_CASE("misses never increase with capacity") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const MemoryTrace t = testsupport::random_trace(rng, 24 * 64);
    std::uint64_t prev = ~0ull;
    for (std::uint64_t lines : {4, 8, 16, 32, 64}) {
      const TrafficStats s = simulate(t, cap_lines(lines));
      CHECK(s.misses <= prev);
      prev = s.misses;
    }
  }
}

TEST_CASE("misses are bounded below by the footprint") {
  std::mt19937_64 rng(31);
  const MemoryTrace t = testsupport::random_trace(rng, 16 * 64);
  const TrafficStats s = simulate(t, cap_lines(8));
  CHECK(s.misses * 64 >= unique_footprint(t));
}

TEST_CASE("unique_footprint merges overlapping ranges") {
  MemoryTrace t = lines_trace(10);
  t.add(0, AccessKind::Read, Phase{}, 0, 96);    // lines 0,1
  t.add(0, AccessKind::Read, Phase{}, 64, 128);  // lines 1,2
  t.add(0, AccessKind::Write, Phase{}, 512, 64);
  CHECK(unique_footprint(t) == 4 * 64);
}

TEST_CASE("cache config validation") {
  CacheConfig c;
  c.line_bytes = 48;
  CHECK_THROWS(c.validate());
  c.line_bytes = 64;
  c.capacity_bytes = 100;
  CHECK_THROWS(c.validate());
  c.capacity_bytes = 0;
  c.ways = 4;
  CHECK_THROWS(c.validate());
}
