#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ecm/error.hpp"
#include "ecm/machine.hpp"

namespace ecm {

enum class Access { kRead, kWrite, kReadWrite };

inline std::string_view to_string(Access a) {
  switch (a) {
    case Access::kRead: return "read";
    case Access::kWrite: return "write";
    case Access::kReadWrite: return "readwrite";
  }
  return "?";
}

inline std::optional<Access> access_from_string(std::string_view s) {
  if (s == "read") return Access::kRead;
  if (s == "write") return Access::kWrite;
  if (s == "readwrite") return Access::kReadWrite;
  return std::nullopt;
}

struct Stream {
  std::string array_name;
  Access access = Access::kRead;
  bool nontemporal = false;

  bool operator==(const Stream&) const = default;
};

enum class UopClass { kLoad, kStore, kFma, kAdd, kMul, kLea };

inline std::string_view to_string(UopClass c) {
  switch (c) {
    case UopClass::kLoad: return "load";
    case UopClass::kStore: return "store";
    case UopClass::kFma: return "fma";
    case UopClass::kAdd: return "add";
    case UopClass::kMul: return "mul";
    case UopClass::kLea: return "lea";
  }
  return "?";
}

inline std::optional<UopClass> uop_class_from_string(std::string_view s) {
  for (auto c : {UopClass::kLoad, UopClass::kStore, UopClass::kFma, UopClass::kAdd, UopClass::kMul,
                 UopClass::kLea}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

inline bool is_memory(UopClass c) { return c == UopClass::kLoad || c == UopClass::kStore; }

enum class Addressing { kBaseIndexOffset, kOffsetOnly };

inline std::string_view to_string(Addressing a) {
  return a == Addressing::kBaseIndexOffset ? "base-index-offset" : "offset-only";
}

inline std::optional<Addressing> addressing_from_string(std::string_view s) {
  if (s == "base-index-offset") return Addressing::kBaseIndexOffset;
  if (s == "offset-only") return Addressing::kOffsetOnly;
  return std::nullopt;
}

// `count` instructions of one class per cache line of work.
struct UopGroup {
  int count = 1;
  UopClass klass = UopClass::kLoad;
  std::optional<Addressing> addressing;

  bool operator==(const UopGroup&) const = default;
};

struct KernelModel {
  std::string name;
  std::vector<Stream> streams;
  int element_bytes = 8;
  std::vector<UopGroup> uops;
  int flops_per_iteration = 0;  // reporting only

  int count_uops(UopClass c) const {
    int n = 0;
    for (const auto& g : uops) {
      if (g.klass == c) n += g.count;
    }
    return n;
  }

  int count_streams(Access a, std::optional<bool> nontemporal = std::nullopt) const {
    int n = 0;
    for (const auto& s : streams) {
      if (s.access == a && (!nontemporal || s.nontemporal == *nontemporal)) ++n;
    }
    return n;
  }

  int iterations_per_cache_line() const { return kCacheLineBytes / element_bytes; }

  bool operator==(const KernelModel&) const = default;
};

// Explicit loads = read + readwrite; stores = regular writes + readwrite;
// nt_stores = non-temporal writes.
inline StreamSignature stream_signature(const KernelModel& k) {
  StreamSignature s;
  for (const auto& st : k.streams) {
    switch (st.access) {
      case Access::kRead: ++s.explicit_loads; break;
      case Access::kReadWrite:
        ++s.explicit_loads;
        ++s.stores;
        ++s.readwrites;
        break;
      case Access::kWrite: ++(st.nontemporal ? s.nt_stores : s.stores); break;
    }
  }
  return s;
}

// Write streams that trigger a write-allocate (read for ownership).
inline int rfo_streams(const KernelModel& k) { return k.count_streams(Access::kWrite, false); }

// Throws InvariantError on hard violations; returns consistency warnings
// (instruction mix that does not match the stream list for 32 B vectors).
inline std::vector<std::string> validate(const KernelModel& k) {
  std::vector<std::string> warnings;
  if (k.name.empty()) throw InvariantError("KernelModel: name must not be empty");
  if (k.element_bytes <= 0 || kCacheLineBytes % k.element_bytes != 0) {
    throw InvariantError("KernelModel '" + k.name + "': element_bytes must divide 64");
  }
  std::set<std::string> names;
  for (const auto& s : k.streams) {
    if (s.nontemporal && s.access != Access::kWrite) {
      throw InvariantError("Stream '" + s.array_name + "': nontemporal requires access = write");
    }
    if (!names.insert(s.array_name).second) {
      throw InvariantError("Stream '" + s.array_name + "': duplicate array name");
    }
  }
  for (const auto& g : k.uops) {
    if (g.count < 1) {
      throw InvariantError("UopGroup " + std::string(to_string(g.klass)) + ": count must be >= 1");
    }
    if (is_memory(g.klass) && !g.addressing) {
      throw InvariantError("UopGroup " + std::string(to_string(g.klass)) +
                           ": load/store groups need an addressing mode");
    }
    if (!is_memory(g.klass) && g.addressing) {
      throw InvariantError("UopGroup " + std::string(to_string(g.klass)) +
                           ": addressing only applies to load/store groups");
    }
  }
  if (k.flops_per_iteration < 0) throw InvariantError("KernelModel: flops_per_iteration must be >= 0");

  constexpr int kVectorBytes = 32;
  constexpr int kPerStream = kCacheLineBytes / kVectorBytes;
  const int reads = k.count_streams(Access::kRead) + k.count_streams(Access::kReadWrite);
  const int writes = k.count_streams(Access::kWrite) + k.count_streams(Access::kReadWrite);
  if (k.count_uops(UopClass::kLoad) != kPerStream * reads) {
    warnings.push_back("kernel '" + k.name + "': " + std::to_string(k.count_uops(UopClass::kLoad)) +
                       " load uops per CL but " + std::to_string(reads) +
                       " read stream(s) expect " + std::to_string(kPerStream * reads));
  }
  if (k.count_uops(UopClass::kStore) != kPerStream * writes) {
    warnings.push_back("kernel '" + k.name + "': " + std::to_string(k.count_uops(UopClass::kStore)) +
                       " store uops per CL but " + std::to_string(writes) +
                       " write stream(s) expect " + std::to_string(kPerStream * writes));
  }
  return warnings;
}

// Returns a copy with every plain write stream switched to (or from)
// non-temporal stores.
inline KernelModel with_nontemporal_writes(KernelModel k, bool nontemporal) {
  for (auto& s : k.streams) {
    if (s.access == Access::kWrite) s.nontemporal = nontemporal;
  }
  return k;
}

namespace detail {

inline UopGroup mem(int count, UopClass c, Addressing a = Addressing::kBaseIndexOffset) {
  return {count, c, a};
}
inline UopGroup arith(int count, UopClass c) { return {count, c, std::nullopt}; }

}  // namespace detail

// The benchmark kernels, normalized to one cache line of work per stream
// (AVX, double precision: two 32 B vector instructions per stream and CL).
inline std::map<std::string, KernelModel> builtin_kernels() {
  using detail::arith;
  using detail::mem;
  const auto R = Access::kRead;
  const auto W = Access::kWrite;
  const auto RW = Access::kReadWrite;
  const auto L = UopClass::kLoad;
  const auto S = UopClass::kStore;

  std::map<std::string, KernelModel> k;
  k["ddot"] = {"ddot", {{"A", R}, {"B", R}}, 8, {mem(4, L), arith(2, UopClass::kFma)}, 2};
  k["load"] = {"load", {{"A", R}}, 8, {mem(2, L), arith(2, UopClass::kAdd)}, 1};
  k["store"] = {"store", {{"A", W}}, 8, {mem(2, S)}, 0};
  k["update"] = {"update", {{"A", RW}}, 8, {mem(2, L), mem(2, S), arith(2, UopClass::kMul)}, 1};
  k["copy"] = {"copy", {{"A", W}, {"B", R}}, 8, {mem(2, L), mem(2, S)}, 0};
  k["stream_triad"] = {"stream_triad",
                       {{"A", W}, {"B", R}, {"C", R}},
                       8,
                       {mem(4, L), mem(2, S), arith(2, UopClass::kFma)},
                       2};
  k["schoenauer_triad"] = {"schoenauer_triad",
                           {{"A", W}, {"B", R}, {"C", R}, {"D", R}},
                           8,
                           {mem(6, L), mem(2, S), arith(2, UopClass::kFma)},
                           2};
  // Stores address through a LEA-precomputed base so port 7 can take them.
  k["schoenauer_triad_opt"] = {"schoenauer_triad_opt",
                               {{"A", W}, {"B", R}, {"C", R}, {"D", R}},
                               8,
                               {mem(6, L), mem(2, S, Addressing::kOffsetOnly),
                                arith(1, UopClass::kLea), arith(2, UopClass::kFma)},
                               2};
  auto stream_nt = with_nontemporal_writes(k["stream_triad"], true);
  stream_nt.name = "stream_triad_nt";
  k[stream_nt.name] = stream_nt;
  auto schoenauer_nt = with_nontemporal_writes(k["schoenauer_triad"], true);
  schoenauer_nt.name = "schoenauer_triad_nt";
  k[schoenauer_nt.name] = schoenauer_nt;
  return k;
}

// The seven kernels of the reference study, in table order.
inline const std::vector<std::string>& reference_kernel_names() {
  static const std::vector<std::string> names = {"ddot", "load", "store", "update",
                                                 "copy", "stream_triad", "schoenauer_triad"};
  return names;
}

}  // namespace ecm
