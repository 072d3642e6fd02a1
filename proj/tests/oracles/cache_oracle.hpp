#pragma once

// Event-driven replay of a streaming loop through a three-level
// write-allocate, write-back LRU hierarchy. Counts cache-line transfers across
// each boundary; shares no code with the traffic model.

#include <array>
#include <cstdint>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

namespace oracle {

enum class Op { kRead, kWrite, kReadWrite, kNtWrite };

struct LoopStream {
  Op op;
};

struct BoundaryCounts {
  std::array<std::uint64_t, 3> lines{};  // L1L2, L2L3, L3Mem
};

class CacheLevel {
 public:
  explicit CacheLevel(std::size_t capacity) : capacity_(capacity) {}

  bool contains(std::uint64_t line) const { return where_.count(line) != 0; }

  void touch(std::uint64_t line) { lru_.splice(lru_.begin(), lru_, where_.at(line)); }

  bool& dirty(std::uint64_t line) { return where_.at(line)->dirty; }

  // Inserts `line`; returns the evicted entry if the level overflowed.
  std::optional<std::pair<std::uint64_t, bool>> insert(std::uint64_t line, bool is_dirty) {
    lru_.push_front({line, is_dirty});
    where_[line] = lru_.begin();
    if (lru_.size() <= capacity_) return std::nullopt;
    Entry victim = lru_.back();
    lru_.pop_back();
    where_.erase(victim.line);
    return std::make_pair(victim.line, victim.dirty);
  }

  void erase(std::uint64_t line) {
    auto it = where_.find(line);
    if (it == where_.end()) return;
    lru_.erase(it->second);
    where_.erase(it);
  }

  std::vector<std::pair<std::uint64_t, bool>> drain() {
    std::vector<std::pair<std::uint64_t, bool>> out;
    for (const auto& e : lru_) out.emplace_back(e.line, e.dirty);
    lru_.clear();
    where_.clear();
    return out;
  }

 private:
  struct Entry {
    std::uint64_t line;
    bool dirty;
  };
  std::size_t capacity_;
  std::list<Entry> lru_;
  std::unordered_map<std::uint64_t, std::list<Entry>::iterator> where_;
};

class Hierarchy {
 public:
  explicit Hierarchy(std::array<std::size_t, 3> capacities)
      : levels_{CacheLevel(capacities[0]), CacheLevel(capacities[1]), CacheLevel(capacities[2])} {}

  void read(std::uint64_t line) { bring_to_l1(line); }

  void write(std::uint64_t line) {
    bring_to_l1(line);  // write-allocate
    levels_[0].dirty(line) = true;
  }

  // Streaming store: the line goes straight to memory; cached copies are dropped.
  void nt_write(std::uint64_t line) {
    for (auto& l : levels_) l.erase(line);
    nt_lines_[line] = true;
  }

  // Writes back every dirty line and returns the transfer counts.
  BoundaryCounts finish() {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      for (const auto& [line, dirty] : levels_[i].drain()) {
        if (dirty) write_back(i, line);
      }
    }
    counts_.lines[2] += nt_lines_.size();
    nt_lines_.clear();
    return counts_;
  }

 private:
  // Fetches `line` into level `i`, pulling it through the lower levels.
  void fetch(std::size_t i, std::uint64_t line) {
    if (levels_[i].contains(line)) {
      levels_[i].touch(line);
      return;
    }
    if (i + 1 < levels_.size()) fetch(i + 1, line);
    ++counts_.lines[i];
    place(i, line, false);
  }

  void bring_to_l1(std::uint64_t line) { fetch(0, line); }

  void place(std::size_t i, std::uint64_t line, bool dirty) {
    if (auto victim = levels_[i].insert(line, dirty); victim && victim->second) {
      write_back(i, victim->first);
    }
  }

  // Dirty line leaving level `i` for level `i + 1` (or memory).
  void write_back(std::size_t i, std::uint64_t line) {
    ++counts_.lines[i];
    if (i + 1 == levels_.size()) return;
    if (levels_[i + 1].contains(line)) {
      levels_[i + 1].touch(line);
      levels_[i + 1].dirty(line) = true;
    } else {
      place(i + 1, line, true);
    }
  }

  std::array<CacheLevel, 3> levels_;
  BoundaryCounts counts_;
  std::unordered_map<std::uint64_t, bool> nt_lines_;
};

// Replays `iterations` iterations of a loop touching element i of every
// stream (separate arrays of `element_bytes` elements). Returns the average
// number of lines crossing each boundary per cache line of work.
inline std::array<double, 3> replay(const std::vector<LoopStream>& streams, int element_bytes,
                                    std::uint64_t iterations,
                                    std::array<std::size_t, 3> capacities = {8, 32, 128}) {
  Hierarchy h(capacities);
  const std::uint64_t array_lines = iterations * element_bytes / 64 + 1;
  for (std::uint64_t it = 0; it < iterations; ++it) {
    const std::uint64_t offset_line = it * element_bytes / 64;
    for (std::size_t s = 0; s < streams.size(); ++s) {
      const std::uint64_t line = s * (array_lines + 1000) + offset_line;
      switch (streams[s].op) {
        case Op::kRead: h.read(line); break;
        case Op::kWrite: h.write(line); break;
        case Op::kReadWrite:
          h.read(line);
          h.write(line);
          break;
        case Op::kNtWrite: h.nt_write(line); break;
      }
    }
  }
  const BoundaryCounts c = h.finish();
  const double work_lines = static_cast<double>(iterations * element_bytes) / 64.0;
  return {c.lines[0] / work_lines, c.lines[1] / work_lines, c.lines[2] / work_lines};
}

}  // namespace oracle
