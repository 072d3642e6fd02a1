#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecm/error.hpp"

namespace ecm {

inline constexpr int kCacheLineBytes = 64;

enum class Capability {
  kLoadAguFull,
  kAguSimple,
  kStoreData,
  kFma,
  kMul,
  kAdd,
  kLea,
  kBranch,
  kShuffle,
};

inline constexpr std::array<Capability, 9> kAllCapabilities = {
    Capability::kLoadAguFull, Capability::kAguSimple, Capability::kStoreData,
    Capability::kFma,         Capability::kMul,       Capability::kAdd,
    Capability::kLea,         Capability::kBranch,    Capability::kShuffle,
};

inline std::string_view to_string(Capability c) {
  switch (c) {
    case Capability::kLoadAguFull: return "load-agu-full";
    case Capability::kAguSimple: return "agu-simple";
    case Capability::kStoreData: return "store-data";
    case Capability::kFma: return "fma";
    case Capability::kMul: return "mul";
    case Capability::kAdd: return "add";
    case Capability::kLea: return "lea";
    case Capability::kBranch: return "branch";
    case Capability::kShuffle: return "shuffle";
  }
  return "?";
}

inline std::optional<Capability> capability_from_string(std::string_view s) {
  for (Capability c : kAllCapabilities) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

// Bit i set means port id i. Port ids are small labels in [0, 32).
using PortMask = std::uint32_t;
inline constexpr int kMaxPortId = 31;

inline int port_count(PortMask m) { return std::popcount(m); }

inline std::string format_ports(PortMask m) {
  std::string out = "{";
  bool first = true;
  for (int p = 0; p <= kMaxPortId; ++p) {
    if (m & (PortMask{1} << p)) {
      if (!first) out += ",";
      out += std::to_string(p);
      first = false;
    }
  }
  return out + "}";
}

struct PortSpec {
  int id = 0;
  std::vector<Capability> capabilities;

  bool has(Capability c) const {
    return std::find(capabilities.begin(), capabilities.end(), c) != capabilities.end();
  }
  bool operator==(const PortSpec&) const = default;
};

enum class BoundaryName { kL1L2, kL2L3 };

inline std::string_view to_string(BoundaryName b) {
  return b == BoundaryName::kL1L2 ? "L1L2" : "L2L3";
}

inline std::optional<BoundaryName> boundary_from_string(std::string_view s) {
  if (s == "L1L2") return BoundaryName::kL1L2;
  if (s == "L2L3") return BoundaryName::kL2L3;
  return std::nullopt;
}

struct CacheBoundary {
  BoundaryName name = BoundaryName::kL1L2;
  int bytes_per_cycle = 0;
  bool operator==(const CacheBoundary&) const = default;
};

// Memory-side access pattern of a kernel. The first three fields are the
// (explicit loads, stores, non-temporal stores) triple; `readwrites` separates
// patterns such as update (one read-modify-write array) from copy (one read
// plus one written array) that share the triple but not the sustained bandwidth.
struct StreamSignature {
  int explicit_loads = 0;
  int stores = 0;
  int nt_stores = 0;
  int readwrites = 0;

  auto operator<=>(const StreamSignature&) const = default;
};

inline std::string format_signature(const StreamSignature& s) {
  std::string out = "(" + std::to_string(s.explicit_loads) + "," + std::to_string(s.stores) +
                    "," + std::to_string(s.nt_stores);
  if (s.readwrites != 0) out += ";rw=" + std::to_string(s.readwrites);
  return out + ")";
}

struct BandwidthEntry {
  StreamSignature signature;
  double gbs = 0.0;
  bool operator==(const BandwidthEntry&) const = default;
};

struct MemoryModel {
  // Sustained bandwidths as measured in the machine's configured NUMA mode:
  // per memory domain when Cluster-on-Die is on, full chip otherwise.
  std::vector<BandwidthEntry> table;
  double default_bandwidth_gbs = 0.0;
  // Full-chip values used for non-CoD predictions. Signatures missing here
  // are derived as domains x per-domain value x noncod_derating.
  std::vector<BandwidthEntry> chip_table;
  double noncod_derating = 1.0;

  bool operator==(const MemoryModel&) const = default;
};

struct NumaConfig {
  int n_domains = 1;
  int cores_per_domain = 1;
  bool cod_enabled = false;

  int total_cores() const { return n_domains * cores_per_domain; }
  bool operator==(const NumaConfig&) const = default;
};

struct MachineModel {
  std::string name;
  double frequency_ghz = 0.0;
  int retire_width = 0;
  int store_uop_weight = 1;
  std::vector<PortSpec> ports;
  std::vector<CacheBoundary> boundaries;
  MemoryModel memory;
  NumaConfig numa;

  PortMask ports_with(Capability c) const {
    PortMask m = 0;
    for (const auto& p : ports) {
      if (p.has(c)) m |= PortMask{1} << p.id;
    }
    return m;
  }

  PortMask all_ports() const {
    PortMask m = 0;
    for (const auto& p : ports) m |= PortMask{1} << p.id;
    return m;
  }

  int bytes_per_cycle(BoundaryName name) const {
    for (const auto& b : boundaries) {
      if (b.name == name) return b.bytes_per_cycle;
    }
    throw InvariantError("machine '" + this->name + "' has no " + std::string(to_string(name)) +
                         " boundary");
  }

  bool operator==(const MachineModel&) const = default;
};

enum class NumaMode { kCod, kNonCod };

inline std::string_view to_string(NumaMode m) { return m == NumaMode::kCod ? "cod" : "noncod"; }

namespace detail {

inline std::optional<double> find_entry(const std::vector<BandwidthEntry>& table,
                                        const StreamSignature& sig) {
  for (const auto& e : table) {
    if (e.signature == sig) return e.gbs;
  }
  return std::nullopt;
}

inline void check_table(const std::vector<BandwidthEntry>& table, std::string_view what) {
  std::map<StreamSignature, int> seen;
  for (const auto& e : table) {
    if (!(e.gbs > 0.0)) {
      throw InvariantError("MemoryModel: " + std::string(what) + " bandwidth for signature " +
                           format_signature(e.signature) + " must be > 0");
    }
    const auto& s = e.signature;
    if (s.explicit_loads < 0 || s.stores < 0 || s.nt_stores < 0 || s.readwrites < 0) {
      throw InvariantError("MemoryModel: " + std::string(what) +
                           " signature counts must be non-negative");
    }
    if (++seen[s] > 1) {
      throw InvariantError("MemoryModel: duplicate " + std::string(what) + " signature " +
                           format_signature(s));
    }
  }
}

}  // namespace detail

// Checks every invariant of the description. Throws InvariantError on the
// first violation; returns non-fatal findings.
inline std::vector<std::string> validate(const MachineModel& m) {
  std::vector<std::string> warnings;
  if (!(m.frequency_ghz > 0.0)) throw InvariantError("MachineModel: frequency_ghz must be > 0");
  if (m.retire_width < 1) throw InvariantError("MachineModel: retire_width must be >= 1");
  if (m.store_uop_weight < 1) throw InvariantError("MachineModel: store_uop_weight must be >= 1");
  if (m.store_uop_weight > m.retire_width) {
    throw InvariantError("MachineModel: store_uop_weight must not exceed retire_width");
  }

  PortMask seen_ports = 0;
  for (const auto& p : m.ports) {
    if (p.id < 0 || p.id > kMaxPortId) {
      throw InvariantError("PortSpec: id " + std::to_string(p.id) + " outside [0, " +
                           std::to_string(kMaxPortId) + "]");
    }
    const PortMask bit = PortMask{1} << p.id;
    if (seen_ports & bit) throw InvariantError("PortSpec: duplicate id " + std::to_string(p.id));
    seen_ports |= bit;
    if (p.capabilities.empty()) {
      throw InvariantError("PortSpec: port " + std::to_string(p.id) + " has no capabilities");
    }
  }

  int l1l2 = 0, l2l3 = 0;
  for (const auto& b : m.boundaries) {
    const int bpc = b.bytes_per_cycle;
    if (bpc <= 0 || (kCacheLineBytes % bpc != 0 && bpc % kCacheLineBytes != 0)) {
      throw InvariantError("CacheBoundary " + std::string(to_string(b.name)) +
                           ": bytes_per_cycle must be > 0 and divide or be a multiple of 64");
    }
    (b.name == BoundaryName::kL1L2 ? l1l2 : l2l3)++;
  }
  if (l1l2 != 1 || l2l3 != 1) {
    throw InvariantError("MachineModel: exactly one CacheBoundary each for L1L2 and L2L3 required");
  }

  if (!(m.memory.default_bandwidth_gbs > 0.0)) {
    throw InvariantError("MemoryModel: default_bandwidth_gbs must be > 0");
  }
  if (!(m.memory.noncod_derating > 0.0)) {
    throw InvariantError("MemoryModel: noncod_derating must be > 0");
  }
  detail::check_table(m.memory.table, "table");
  detail::check_table(m.memory.chip_table, "chip_table");

  if (m.numa.n_domains < 1) throw InvariantError("NumaConfig: domains must be >= 1");
  if (m.numa.cores_per_domain < 1) throw InvariantError("NumaConfig: cores_per_domain must be >= 1");

  for (Capability c : {Capability::kLoadAguFull, Capability::kStoreData}) {
    if (m.ports_with(c) == 0) {
      warnings.push_back("no port provides '" + std::string(to_string(c)) +
                         "'; kernels with memory instructions cannot be scheduled");
    }
  }
  return warnings;
}

// Sustained bandwidth in GB/s for an access pattern, as measured in the
// machine's configured NUMA mode. Unknown patterns get the default.
inline double lookup_bandwidth(const MachineModel& m, const StreamSignature& sig) {
  return detail::find_entry(m.memory.table, sig).value_or(m.memory.default_bandwidth_gbs);
}

inline bool has_bandwidth_entry(const MachineModel& m, const StreamSignature& sig) {
  return detail::find_entry(m.memory.table, sig).has_value();
}

// Bandwidth available to one memory domain.
inline double domain_bandwidth(const MachineModel& m, const StreamSignature& sig) {
  const double bw = lookup_bandwidth(m, sig);
  return m.numa.cod_enabled ? bw : bw / m.numa.n_domains;
}

// Bandwidth of the whole chip with requests spread over all controllers.
inline double chip_bandwidth(const MachineModel& m, const StreamSignature& sig) {
  if (auto hit = detail::find_entry(m.memory.chip_table, sig)) return *hit;
  const double bw = lookup_bandwidth(m, sig);
  return m.numa.cod_enabled ? bw * m.numa.n_domains * m.memory.noncod_derating : bw;
}

// Bandwidth a single core sees in the given mode: its domain's bandwidth
// under CoD, the chip bandwidth otherwise.
inline double mode_bandwidth(const MachineModel& m, const StreamSignature& sig, NumaMode mode) {
  return mode == NumaMode::kCod ? domain_bandwidth(m, sig) : chip_bandwidth(m, sig);
}

// Xeon E5-2695 v3 at its nominal 2.3 GHz, Cluster-on-Die enabled.
inline MachineModel builtin_haswell() {
  using C = Capability;
  MachineModel m;
  m.name = "haswell";
  m.frequency_ghz = 2.3;
  m.retire_width = 4;
  m.store_uop_weight = 2;
  m.ports = {
      {0, {C::kFma, C::kMul, C::kBranch}},
      {1, {C::kFma, C::kMul, C::kAdd, C::kLea}},
      {2, {C::kLoadAguFull}},
      {3, {C::kLoadAguFull}},
      {4, {C::kStoreData}},
      {5, {C::kShuffle, C::kLea}},
      {6, {C::kBranch}},
      {7, {C::kAguSimple}},
  };
  m.boundaries = {{BoundaryName::kL1L2, 64}, {BoundaryName::kL2L3, 32}};
  // Per memory domain, keyed by (explicit loads, stores, nt stores; readwrites).
  m.memory.table = {
      {{2, 0, 0, 0}, 32.4},  // ddot
      {{1, 0, 0, 0}, 32.4},  // load
      {{0, 1, 0, 0}, 23.6},  // store
      {{1, 1, 0, 1}, 23.6},  // update
      {{1, 1, 0, 0}, 26.3},  // copy
      {{2, 1, 0, 0}, 27.1},  // STREAM triad
      {{3, 1, 0, 0}, 27.8},  // Schoenauer triad
  };
  m.memory.default_bandwidth_gbs = 27.1;
  m.memory.noncod_derating = 1.0;
  m.numa = {2, 7, true};
  return m;
}

}  // namespace ecm
