#include "rnnsched/cachesim.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace rnnsched {

void CacheConfig::validate() const {
  if (line_bytes == 0 || (line_bytes & (line_bytes - 1)) != 0)
    throw std::invalid_argument("line_bytes must be a power of two");
  if (capacity_bytes != 0) {
    if (capacity_bytes % line_bytes != 0)
      throw std::invalid_argument("capacity must be divisible by the line size");
    if (capacity_bytes < line_bytes)
      throw std::invalid_argument("capacity must hold at least one line");
    if (ways != 0 && capacity_lines() % ways != 0)
      throw std::invalid_argument("capacity lines must be divisible by associativity");
  } else if (ways != 0) {
    throw std::invalid_argument("set-associative caches need a finite capacity");
  }
}

namespace {

constexpr std::uint32_t kNil = 0xffffffffu;

inline std::uint64_t mix_hash(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

/// Fully associative LRU over line addresses. Open-addressed hash
/// table with epoch-based clearing plus an intrusive recency list.
/// Read events spanning at least the whole capacity take an exact
/// fast path: every line misses, the previous contents are evicted
/// wholesale, and the surviving tail window is kept as a lazy "ghost"
/// range instead of being re-inserted line by line.
class FullLru {
 public:
  FullLru(std::uint64_t cap_lines, std::uint32_t line_bytes, std::size_t n_tensors)
      : cap_(cap_lines), line_(line_bytes) {
    stats_.per_tensor.resize(n_tensors);
    resident_.assign(n_tensors, 0);
    dirty_cnt_.assign(n_tensors, 0);
    std::size_t slots = 1024;
    if (cap_ != 0)
      slots = std::bit_ceil(std::max<std::uint64_t>(1024, cap_ * 2 + 2));
    rebuild_table(slots);
    if (cap_ != 0) reserve_nodes(static_cast<std::size_t>(cap_));
  }

  void process(const MemoryTrace& trace) {
    for (const AccessEvent& e : trace.events) {
      const TensorHandle& t = trace.tensors[e.tensor];
      const std::uint64_t addr = t.base_address + e.offset;
      const std::uint64_t first = addr / line_;
      const std::uint64_t last = (addr + e.len - 1) / line_;
      if (e.kind == AccessKind::Read && fast_path_applies(e.tensor, first, last)) {
        sweep_fast(e.tensor, first, last);
        continue;
      }
      const bool wr = e.kind == AccessKind::Write;
      for (std::uint64_t line = first; line <= last; ++line) access(line, e.tensor, wr);
    }
  }

  void flush() {
    for (std::uint32_t n = head_; n != kNil; n = next_[n]) {
      if (dirty_[n]) {
        dirty_[n] = 0;
        account_writeback(owner_[n]);
      }
    }
    std::fill(dirty_cnt_.begin(), dirty_cnt_.end(), 0);
  }

  TrafficStats& stats() { return stats_; }

 private:
  // -- hash table -----------------------------------------------------

  void rebuild_table(std::size_t slots) {
    hkey_.assign(slots, 0);
    hval_.assign(slots, 0);
    hepoch_.assign(slots, 0);
    epoch_ = 1;
    mask_ = slots - 1;
    // re-insert every live node
    for (std::uint32_t n = head_; n != kNil; n = next_[n]) table_insert(key_[n], n);
  }

  bool slot_used(std::size_t i) const { return hepoch_[i] == epoch_ && hval_[i] != 0; }

  std::uint32_t table_find(std::uint64_t key) const {
    std::size_t i = mix_hash(key) & mask_;
    while (slot_used(i)) {
      if (hkey_[i] == key) return hval_[i] - 1;
      i = (i + 1) & mask_;
    }
    return kNil;
  }

  void table_insert(std::uint64_t key, std::uint32_t node) {
    std::size_t i = mix_hash(key) & mask_;
    while (slot_used(i)) i = (i + 1) & mask_;
    hkey_[i] = key;
    hval_[i] = node + 1;
    hepoch_[i] = epoch_;
  }

  void table_erase(std::uint64_t key) {
    std::size_t i = mix_hash(key) & mask_;
    while (hkey_[i] != key || !slot_used(i)) {
      if (!slot_used(i)) return;  // not present
      i = (i + 1) & mask_;
    }
    // backward-shift deletion
    hval_[i] = 0;
    std::size_t j = i;
    while (true) {
      j = (j + 1) & mask_;
      if (!slot_used(j)) break;
      const std::size_t k = mix_hash(hkey_[j]) & mask_;
      if (((j - k) & mask_) >= ((j - i) & mask_)) {
        hkey_[i] = hkey_[j];
        hval_[i] = hval_[j];
        hepoch_[i] = epoch_;
        hval_[j] = 0;
        i = j;
      }
    }
  }

  void table_clear() {
    ++epoch_;
    if (epoch_ == 0) {  // wrapped; scrub
      std::fill(hepoch_.begin(), hepoch_.end(), 0);
      epoch_ = 1;
    }
  }

  // -- nodes ----------------------------------------------------------

  void reserve_nodes(std::size_t n) {
    key_.reserve(n);
    prev_.reserve(n);
    next_.reserve(n);
    owner_.reserve(n);
    dirty_.reserve(n);
  }

  std::uint32_t new_node(std::uint64_t key, std::uint32_t owner, bool dirty) {
    std::uint32_t n;
    if (!free_.empty()) {
      n = free_.back();
      free_.pop_back();
      key_[n] = key;
      owner_[n] = owner;
      dirty_[n] = dirty ? 1 : 0;
    } else {
      n = static_cast<std::uint32_t>(key_.size());
      key_.push_back(key);
      prev_.push_back(kNil);
      next_.push_back(kNil);
      owner_.push_back(owner);
      dirty_.push_back(dirty ? 1 : 0);
    }
    return n;
  }

  void link_front(std::uint32_t n) {
    prev_[n] = kNil;
    next_[n] = head_;
    if (head_ != kNil) prev_[head_] = n;
    head_ = n;
    if (tail_ == kNil) tail_ = n;
  }

  void unlink(std::uint32_t n) {
    if (prev_[n] != kNil) next_[prev_[n]] = next_[n];
    if (next_[n] != kNil) prev_[next_[n]] = prev_[n];
    if (head_ == n) head_ = next_[n];
    if (tail_ == n) tail_ = prev_[n];
  }

  void touch(std::uint32_t n) {
    if (head_ == n) return;
    unlink(n);
    link_front(n);
  }

  // -- ghost window ---------------------------------------------------

  bool ghost_contains(std::uint32_t tensor, std::uint64_t line) const {
    if (ghost_lines_ == 0 || ghost_tensor_ != tensor) return false;
    for (const auto& [lo, hi] : ghost_segs_)
      if (line >= lo && line < hi) return true;
    return false;
  }

  void ghost_remove(std::uint64_t line) {
    for (std::size_t i = 0; i < ghost_segs_.size(); ++i) {
      auto& [lo, hi] = ghost_segs_[i];
      if (line < lo || line >= hi) continue;
      if (line == lo) {
        ++lo;
      } else if (line == hi - 1) {
        --hi;
      } else {
        const std::uint64_t old_hi = hi;
        hi = line;
        // insert invalidates lo/hi, so it goes last
        ghost_segs_.insert(ghost_segs_.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                           {line + 1, old_hi});
      }
      if (ghost_segs_[i].first >= ghost_segs_[i].second)
        ghost_segs_.erase(ghost_segs_.begin() + static_cast<std::ptrdiff_t>(i));
      --ghost_lines_;
      return;
    }
  }

  void ghost_pop_oldest() {
    auto& [lo, hi] = ghost_segs_.front();
    ++lo;
    --ghost_lines_;
    if (lo >= hi) ghost_segs_.erase(ghost_segs_.begin());
  }

  // -- accounting -----------------------------------------------------

  void account_miss(std::uint32_t tensor, std::uint64_t n = 1) {
    stats_.misses += n;
    stats_.mem_read_bytes += n * line_;
    auto& pt = stats_.per_tensor[tensor];
    pt.misses += n;
    pt.read_bytes += n * line_;
  }

  void account_writeback(std::uint32_t tensor) {
    stats_.writebacks += 1;
    stats_.mem_write_bytes += line_;
    auto& pt = stats_.per_tensor[tensor];
    pt.writebacks += 1;
    pt.write_bytes += line_;
  }

  // -- core -----------------------------------------------------------

  void evict_one() {
    if (ghost_lines_ > 0) {  // ghost lines are older than any table line
      ghost_pop_oldest();
      --size_;
      return;
    }
    const std::uint32_t victim = tail_;
    if (dirty_[victim]) {
      dirty_cnt_[owner_[victim]] -= 1;
      account_writeback(owner_[victim]);
    }
    resident_[owner_[victim]] -= 1;
    table_erase(key_[victim]);
    unlink(victim);
    free_.push_back(victim);
    --size_;
  }

  void access(std::uint64_t line, std::uint32_t tensor, bool is_write) {
    const std::uint32_t n = table_find(line);
    if (n != kNil) {
      stats_.hits += 1;
      stats_.per_tensor[tensor].hits += 1;
      touch(n);
      if (is_write && !dirty_[n]) {
        dirty_[n] = 1;
        dirty_cnt_[owner_[n]] += 1;
      }
      return;
    }
    if (ghost_contains(tensor, line)) {
      stats_.hits += 1;
      stats_.per_tensor[tensor].hits += 1;
      ghost_remove(line);
      const std::uint32_t node = new_node(line, tensor, is_write);
      link_front(node);
      table_insert(line, node);
      resident_[tensor] += 1;
      if (is_write) dirty_cnt_[tensor] += 1;
      maybe_grow();
      return;
    }
    account_miss(tensor);
    if (cap_ != 0 && size_ == cap_) evict_one();
    const std::uint32_t node = new_node(line, tensor, is_write);
    link_front(node);
    table_insert(line, node);
    resident_[tensor] += 1;
    if (is_write) dirty_cnt_[tensor] += 1;
    ++size_;
    maybe_grow();
  }

  void maybe_grow() {
    if (cap_ != 0) return;  // sized up front
    const std::size_t live = key_.size() - free_.size();
    if (live * 2 >= hkey_.size()) rebuild_table(hkey_.size() * 2);
  }

  /// A whole-capacity (or larger) sequential read sweep misses on
  /// every line provided none of its lines can be hit along the way.
  /// That holds exactly when (a) no line of the tensor is resident at
  /// all, or (b) the only resident lines form the ghost tail of the
  /// same range, the cache is full, and at least one insertion happens
  /// before the sweep reaches the ghost (which then evicts ghost lines
  /// ahead of their access, cascading through the whole window).
  bool fast_path_applies(std::uint32_t tensor, std::uint64_t first, std::uint64_t last) const {
    if (cap_ == 0) return false;
    const std::uint64_t nlines = last - first + 1;
    if (nlines < cap_) return false;
    if (resident_[tensor] != 0) return false;
    if (ghost_lines_ == 0 || ghost_tensor_ != tensor) return true;  // case (a)
    if (ghost_segs_.size() != 1) return false;
    const auto& [lo, hi] = ghost_segs_.front();
    return size_ == cap_ && lo > first && lo >= first && hi <= last + 1;  // case (b)
  }

  void sweep_fast(std::uint32_t tensor, std::uint64_t first, std::uint64_t last) {
    account_miss(tensor, last - first + 1);
    // Everything previously resident is evicted; write back dirty lines.
    for (std::uint32_t n = head_; n != kNil; n = next_[n])
      if (dirty_[n]) account_writeback(owner_[n]);
    std::fill(dirty_cnt_.begin(), dirty_cnt_.end(), 0);
    std::fill(resident_.begin(), resident_.end(), 0);
    head_ = tail_ = kNil;
    key_.clear();
    prev_.clear();
    next_.clear();
    owner_.clear();
    dirty_.clear();
    free_.clear();
    table_clear();
    ghost_tensor_ = tensor;
    ghost_segs_.assign(1, {last + 1 - cap_, last + 1});
    ghost_lines_ = cap_;
    size_ = cap_;
  }

  std::uint64_t cap_;
  std::uint32_t line_;
  std::uint64_t size_ = 0;  // table live + ghost lines

  std::vector<std::uint64_t> key_;
  std::vector<std::uint32_t> prev_, next_, owner_;
  std::vector<std::uint8_t> dirty_;
  std::vector<std::uint32_t> free_;
  std::uint32_t head_ = kNil, tail_ = kNil;

  std::vector<std::uint64_t> hkey_;
  std::vector<std::uint32_t> hval_, hepoch_;
  std::size_t mask_ = 0;
  std::uint32_t epoch_ = 1;

  std::uint32_t ghost_tensor_ = kNil;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ghost_segs_;
  std::uint64_t ghost_lines_ = 0;

  std::vector<std::uint64_t> resident_;
  std::vector<std::uint64_t> dirty_cnt_;

  TrafficStats stats_;
};

/// Plain set-associative LRU, per-set move-to-front vectors. No fast
/// path; used for sensitivity studies, not the bulk sweeps.
class SetAssocLru {
 public:
  SetAssocLru(const CacheConfig& cfg, std::size_t n_tensors)
      : line_(cfg.line_bytes), ways_(cfg.ways), sets_(cfg.capacity_lines() / cfg.ways) {
    entries_.resize(sets_);
    stats_.per_tensor.resize(n_tensors);
  }

  void process(const MemoryTrace& trace) {
    for (const AccessEvent& e : trace.events) {
      const TensorHandle& t = trace.tensors[e.tensor];
      const std::uint64_t addr = t.base_address + e.offset;
      const std::uint64_t first = addr / line_;
      const std::uint64_t last = (addr + e.len - 1) / line_;
      const bool wr = e.kind == AccessKind::Write;
      for (std::uint64_t line = first; line <= last; ++line) access(line, e.tensor, wr);
    }
  }

  void flush() {
    for (auto& set : entries_)
      for (auto& en : set)
        if (en.dirty) {
          en.dirty = false;
          writeback(en.owner);
        }
  }

  TrafficStats& stats() { return stats_; }

 private:
  struct Entry {
    std::uint64_t line;
    std::uint32_t owner;
    bool dirty;
  };

  void writeback(std::uint32_t tensor) {
    stats_.writebacks += 1;
    stats_.mem_write_bytes += line_;
    stats_.per_tensor[tensor].writebacks += 1;
    stats_.per_tensor[tensor].write_bytes += line_;
  }

  void access(std::uint64_t line, std::uint32_t tensor, bool is_write) {
    auto& set = entries_[line % sets_];
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (set[i].line == line) {
        Entry en = set[i];
        en.dirty = en.dirty || is_write;
        set.erase(set.begin() + static_cast<std::ptrdiff_t>(i));
        set.insert(set.begin(), en);
        stats_.hits += 1;
        stats_.per_tensor[tensor].hits += 1;
        return;
      }
    }
    stats_.misses += 1;
    stats_.mem_read_bytes += line_;
    stats_.per_tensor[tensor].misses += 1;
    stats_.per_tensor[tensor].read_bytes += line_;
    if (set.size() == ways_) {
      if (set.back().dirty) writeback(set.back().owner);
      set.pop_back();
    }
    set.insert(set.begin(), Entry{line, tensor, is_write});
  }

  std::uint32_t line_;
  std::size_t ways_;
  std::uint64_t sets_;
  std::vector<std::vector<Entry>> entries_;
  TrafficStats stats_;
};

}  // namespace

TrafficStats simulate_warm(const MemoryTrace& trace, const CacheConfig& cache,
                           std::uint32_t runs) {
  cache.validate();
  if (runs == 0) throw std::invalid_argument("runs must be positive");
  if (cache.ways != 0) {
    SetAssocLru sim(cache, trace.tensors.size());
    for (std::uint32_t r = 0; r < runs; ++r) sim.process(trace);
    if (cache.writeback_flush) sim.flush();
    sim.stats().runs = runs;
    return std::move(sim.stats());
  }
  FullLru sim(cache.capacity_lines(), cache.line_bytes, trace.tensors.size());
  for (std::uint32_t r = 0; r < runs; ++r) sim.process(trace);
  if (cache.writeback_flush) sim.flush();
  sim.stats().runs = runs;
  return std::move(sim.stats());
}

TrafficStats simulate(const MemoryTrace& trace, const CacheConfig& cache) {
  return simulate_warm(trace, cache, 1);
}

TrafficStats simulate_reference(const MemoryTrace& trace, const CacheConfig& cache) {
  cache.validate();
  struct Line {
    std::uint64_t line;
    std::uint32_t owner;
    bool dirty;
  };
  const std::uint64_t nsets = cache.ways == 0 ? 1 : cache.capacity_lines() / cache.ways;
  const std::uint64_t ways = cache.ways == 0 ? cache.capacity_lines() : cache.ways;

  std::vector<std::vector<Line>> sets(nsets);
  TrafficStats stats;
  stats.per_tensor.resize(trace.tensors.size());

  for (const AccessEvent& e : trace.events) {
    const std::uint64_t addr = trace.tensors[e.tensor].base_address + e.offset;
    const std::uint64_t first = addr / cache.line_bytes;
    const std::uint64_t last = (addr + e.len - 1) / cache.line_bytes;
    const bool wr = e.kind == AccessKind::Write;
    for (std::uint64_t line = first; line <= last; ++line) {
      auto& set = sets[line % nsets];
      bool hit = false;
      for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i].line != line) continue;
        Line en = set[i];
        en.dirty = en.dirty || wr;
        set.erase(set.begin() + static_cast<std::ptrdiff_t>(i));
        set.insert(set.begin(), en);
        stats.hits += 1;
        stats.per_tensor[e.tensor].hits += 1;
        hit = true;
        break;
      }
      if (hit) continue;
      stats.misses += 1;
      stats.mem_read_bytes += cache.line_bytes;
      stats.per_tensor[e.tensor].misses += 1;
      stats.per_tensor[e.tensor].read_bytes += cache.line_bytes;
      if (ways != 0 && set.size() == ways) {
        const Line& victim = set.back();
        if (victim.dirty) {
          stats.writebacks += 1;
          stats.mem_write_bytes += cache.line_bytes;
          stats.per_tensor[victim.owner].writebacks += 1;
          stats.per_tensor[victim.owner].write_bytes += cache.line_bytes;
        }
        set.pop_back();
      }
      set.insert(set.begin(), Line{line, e.tensor, wr});
    }
  }
  if (cache.writeback_flush) {
    for (auto& set : sets)
      for (auto& en : set)
        if (en.dirty) {
          stats.writebacks += 1;
          stats.mem_write_bytes += cache.line_bytes;
          stats.per_tensor[en.owner].writebacks += 1;
          stats.per_tensor[en.owner].write_bytes += cache.line_bytes;
        }
  }
  return stats;
}

std::uint64_t unique_footprint(const MemoryTrace& trace, std::uint32_t line_bytes) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
  ranges.reserve(trace.events.size());
  for (const AccessEvent& e : trace.events) {
    const std::uint64_t addr = trace.tensors[e.tensor].base_address + e.offset;
    ranges.emplace_back(addr / line_bytes, (addr + e.len - 1) / line_bytes + 1);
  }
  std::sort(ranges.begin(), ranges.end());
  std::uint64_t lines = 0, cur_lo = 0, cur_hi = 0;
  bool open = false;
  for (const auto& [lo, hi] : ranges) {
    if (!open) {
      cur_lo = lo;
      cur_hi = hi;
      open = true;
    } else if (lo <= cur_hi) {
      cur_hi = std::max(cur_hi, hi);
    } else {
      lines += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
    }
  }
  if (open) lines += cur_hi - cur_lo;
  return lines * line_bytes;
}

std::uint64_t traffic_bytes(const TrafficStats& stats, const MemoryTrace& trace,
                            bool weights_only) {
  if (!weights_only) return stats.mem_read_bytes + stats.mem_write_bytes;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < stats.per_tensor.size(); ++i)
    if (is_weight_role(trace.tensors[i].role))
      total += stats.per_tensor[i].read_bytes + stats.per_tensor[i].write_bytes;
  return total;
}

std::uint64_t read_traffic_bytes(const TrafficStats& stats, const MemoryTrace& trace,
                                 bool weights_only) {
  if (!weights_only) return stats.mem_read_bytes;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < stats.per_tensor.size(); ++i)
    if (is_weight_role(trace.tensors[i].role)) total += stats.per_tensor[i].read_bytes;
  return total;
}

}  // namespace rnnsched
