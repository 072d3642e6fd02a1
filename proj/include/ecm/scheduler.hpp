#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ecm/bipartite.hpp"
#include "ecm/error.hpp"
#include "ecm/kernel.hpp"
#include "ecm/machine.hpp"

namespace ecm {

// A bag of uops, each allowed to execute on a fixed subset of ports. Every port
// accepts one uop per cycle.
struct SchedulingProblem {
  struct Item {
    std::string label;
    PortMask allowed = 0;
    int multiplicity = 1;
  };
  std::vector<Item> items;

  int total_uops() const {
    int n = 0;
    for (const auto& it : items) n += it.multiplicity;
    return n;
  }
};

// Throws InvariantError if an item has an empty port set, a port outside
// `machine_ports` (when given), or a multiplicity below one.
inline void validate(const SchedulingProblem& p, PortMask machine_ports = ~PortMask{0}) {
  for (const auto& it : p.items) {
    if (it.allowed == 0) throw InvariantError("uop '" + it.label + "' has an empty allowed-port set");
    if ((it.allowed & ~machine_ports) != 0) {
      throw InvariantError("uop '" + it.label + "' allows ports " + format_ports(it.allowed) +
                           " outside the machine's ports " + format_ports(machine_ports));
    }
    if (it.multiplicity < 1) throw InvariantError("uop '" + it.label + "' has multiplicity < 1");
  }
}

struct HallBound {
  int cycles = 0;
  PortMask binding = 0;  // port subset attaining the bound; 0 when there are no uops
};

namespace detail {

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

// Orders port subsets for bottleneck reporting: fewer ports first, then the
// lexicographically smaller ascending id list.
inline bool binding_precedes(PortMask a, PortMask b) {
  if (port_count(a) != port_count(b)) return port_count(a) < port_count(b);
  for (int p = 0; p <= kMaxPortId; ++p) {
    const bool ia = a & (PortMask{1} << p);
    const bool ib = b & (PortMask{1} << p);
    if (ia != ib) return ia;
  }
  return false;
}

// Feasibility of running every uop within `cycles` cycles, each port taking
// one uop per cycle: a perfect matching of uops onto (port, cycle) slots.
inline bool fits_in_cycles(const SchedulingProblem& p, int cycles) {
  const int total = p.total_uops();
  if (total == 0) return true;
  if (cycles <= 0) return false;
  const std::size_t slots = static_cast<std::size_t>(kMaxPortId + 1) * static_cast<std::size_t>(cycles);
  BipartiteMatcher matcher(static_cast<std::size_t>(total), slots);
  std::size_t u = 0;
  for (const auto& it : p.items) {
    for (int k = 0; k < it.multiplicity; ++k, ++u) {
      for (int port = 0; port <= kMaxPortId; ++port) {
        if (!(it.allowed & (PortMask{1} << port))) continue;
        for (int c = 0; c < cycles; ++c) {
          matcher.add_edge(u, static_cast<std::size_t>(port) * static_cast<std::size_t>(cycles) +
                                  static_cast<std::size_t>(c));
        }
      }
    }
  }
  return matcher.solve() == static_cast<std::size_t>(total);
}

}  // namespace detail

// Minimum makespan via feasibility search with bipartite matching.
inline int min_cycles_by_matching(const SchedulingProblem& p) {
  validate(p);
  const int total = p.total_uops();
  if (total == 0) return 0;
  PortMask all = 0;
  for (const auto& it : p.items) all |= it.allowed;
  int t = detail::ceil_div(total, port_count(all));
  while (!detail::fits_in_cycles(p, t)) ++t;
  return t;
}

// Minimum makespan as the Hall-type bound max over port subsets S of
// ceil(#uops confined to S / |S|). Only unions of the items' port sets need
// to be examined: shrinking any S to the union of the sets it contains keeps
// the numerator and cannot grow the denominator.
inline HallBound hall_bound(const SchedulingProblem& p) {
  validate(p);
  std::map<PortMask, int> by_mask;
  for (const auto& it : p.items) by_mask[it.allowed] += it.multiplicity;
  std::vector<std::pair<PortMask, int>> groups(by_mask.begin(), by_mask.end());

  HallBound best;
  if (groups.empty()) return best;
  if (groups.size() > 20) {
    // Too many distinct sets to enumerate unions; fall back to the search.
    best.cycles = min_cycles_by_matching(p);
    for (const auto& g : groups) best.binding |= g.first;
    return best;
  }

  std::set<PortMask> unions;
  const std::uint32_t n = static_cast<std::uint32_t>(groups.size());
  for (std::uint32_t sel = 1; sel < (std::uint32_t{1} << n); ++sel) {
    PortMask s = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (sel & (std::uint32_t{1} << i)) s |= groups[i].first;
    }
    unions.insert(s);
  }
  for (PortMask s : unions) {
    int confined = 0;
    for (const auto& [mask, count] : groups) {
      if ((mask & ~s) == 0) confined += count;
    }
    const int t = detail::ceil_div(confined, port_count(s));
    if (t > best.cycles || (t == best.cycles && detail::binding_precedes(s, best.binding))) {
      best = {t, s};
    }
  }
  return best;
}

inline int min_cycles(const SchedulingProblem& p) { return hall_bound(p).cycles; }

namespace detail {

inline PortMask require_ports(const MachineModel& m, PortMask mask, Capability c,
                              const KernelModel& k) {
  if (mask == 0) {
    throw InvariantError("kernel '" + k.name + "' needs capability '" + std::string(to_string(c)) +
                         "' which machine '" + m.name + "' does not provide");
  }
  return mask;
}

inline PortMask load_ports(const KernelModel& k, const MachineModel& m) {
  return require_ports(m, m.ports_with(Capability::kLoadAguFull), Capability::kLoadAguFull, k);
}

inline PortMask store_address_ports(const KernelModel& k, const MachineModel& m, Addressing a) {
  const PortMask full = load_ports(k, m);
  return a == Addressing::kBaseIndexOffset ? full : (full | m.ports_with(Capability::kAguSimple));
}

inline PortMask store_data_ports(const KernelModel& k, const MachineModel& m) {
  return require_ports(m, m.ports_with(Capability::kStoreData), Capability::kStoreData, k);
}

inline PortMask arithmetic_ports(const KernelModel& k, const MachineModel& m, UopClass c) {
  Capability cap = Capability::kFma;
  switch (c) {
    case UopClass::kFma: cap = Capability::kFma; break;
    case UopClass::kAdd: cap = Capability::kAdd; break;
    case UopClass::kMul: cap = Capability::kMul; break;
    case UopClass::kLea: cap = Capability::kLea; break;
    default: throw DomainError("not an arithmetic uop class");
  }
  return require_ports(m, m.ports_with(cap), cap, k);
}

}  // namespace detail

// Non-overlapping work: loads (one fused uop on a full AGU port) and stores
// (an address uop plus a data uop). LEA is arithmetic and stays out.
inline SchedulingProblem build_nol_problem(const KernelModel& k, const MachineModel& m) {
  SchedulingProblem p;
  for (const auto& g : k.uops) {
    const Addressing a = g.addressing.value_or(Addressing::kBaseIndexOffset);
    if (g.klass == UopClass::kLoad) {
      p.items.push_back({"load", detail::load_ports(k, m), g.count});
    } else if (g.klass == UopClass::kStore) {
      p.items.push_back({"store-address(" + std::string(to_string(a)) + ")",
                         detail::store_address_ports(k, m, a), g.count});
      p.items.push_back({"store-data", detail::store_data_ports(k, m), g.count});
    }
  }
  return p;
}

inline SchedulingProblem build_ol_problem(const KernelModel& k, const MachineModel& m) {
  SchedulingProblem p;
  for (const auto& g : k.uops) {
    if (is_memory(g.klass)) continue;
    p.items.push_back({std::string(to_string(g.klass)), detail::arithmetic_ports(k, m, g.klass), g.count});
  }
  return p;
}

// Retirement slots needed per cache line, stores weighted.
inline int frontend_bound(const KernelModel& k, const MachineModel& m) {
  int slots = 0;
  for (const auto& g : k.uops) {
    slots += g.klass == UopClass::kStore ? g.count * m.store_uop_weight : g.count;
  }
  return detail::ceil_div(slots, m.retire_width);
}

struct CoreTiming {
  int t_nol = 0;
  int t_ol = 0;
  int frontend_cycles = 0;
  int raw_t_ol = 0;  // port-bound OL cycles before retirement is considered
  std::string bottleneck;
};

namespace detail {

// One instruction kind in the cycle-level schedule: `weight` retirement slots,
// one uop per entry of `uops`, all issued in the same cycle.
struct InstructionKind {
  int count = 0;
  int weight = 1;
  std::vector<PortMask> uops;
  bool overlapping = false;

  auto key() const { return std::tie(weight, uops, overlapping); }
};

// Decides whether all instructions fit a schedule where OL instructions use
// only the first `ol_cycles` cycles and nOL instructions only the first
// `nol_cycles`, every cycle retiring at most `width` slots and each port
// executing one uop. Cycles are interchangeable, so aligning both windows at
// cycle zero loses no generality.
class JointScheduler {
 public:
  JointScheduler(std::vector<InstructionKind> kinds, int width)
      : kinds_(std::move(kinds)), width_(width) {
    std::vector<int> cfg(kinds_.size(), 0);
    enumerate(0, cfg, 0);
    std::sort(configs_.begin(), configs_.end(), [&](const auto& a, const auto& b) {
      return weight_of(a) > weight_of(b);
    });
    for (const auto& c : configs_) {
      if (!touches_overlapping(c)) nol_only_.push_back(c);
    }
  }

  bool feasible(int ol_cycles, int nol_cycles) {
    const int both = ol_cycles;
    const int nol_only = std::max(0, nol_cycles - ol_cycles);
    std::vector<int> remaining;
    for (const auto& k : kinds_) remaining.push_back(k.count);
    failed_.clear();
    return fill(remaining, both, nol_only, 0);
  }

 private:
  using Config = std::vector<int>;

  int weight_of(const Config& c) const {
    int w = 0;
    for (std::size_t i = 0; i < c.size(); ++i) w += c[i] * kinds_[i].weight;
    return w;
  }

  bool touches_overlapping(const Config& c) const {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] > 0 && kinds_[i].overlapping) return true;
    }
    return false;
  }

  bool ports_fit(const Config& c) const {
    std::vector<PortMask> uops;
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (int n = 0; n < c[i]; ++n) {
        uops.insert(uops.end(), kinds_[i].uops.begin(), kinds_[i].uops.end());
      }
    }
    if (uops.size() > static_cast<std::size_t>(kMaxPortId + 1)) return false;
    BipartiteMatcher matcher(uops.size(), kMaxPortId + 1);
    for (std::size_t u = 0; u < uops.size(); ++u) {
      for (int p = 0; p <= kMaxPortId; ++p) {
        if (uops[u] & (PortMask{1} << p)) matcher.add_edge(u, static_cast<std::size_t>(p));
      }
    }
    return matcher.solve() == uops.size();
  }

  // All single-cycle instruction mixes that respect retire width and ports.
  // The set is closed under removing instructions.
  void enumerate(std::size_t i, Config& cfg, int weight) {
    if (i == kinds_.size()) {
      if (ports_fit(cfg)) configs_.push_back(cfg);
      return;
    }
    for (int n = 0; n <= kinds_[i].count && weight + n * kinds_[i].weight <= width_; ++n) {
      cfg[i] = n;
      enumerate(i + 1, cfg, weight + n * kinds_[i].weight);
    }
    cfg[i] = 0;
  }

  // Chooses one mix per remaining cycle, non-decreasing config index within
  // each cycle class to skip permutations.
  bool fill(Config& remaining, int both_left, int nol_left, std::size_t start) {
    if (both_left == 0 && nol_left == 0) {
      return std::all_of(remaining.begin(), remaining.end(), [](int r) { return r == 0; });
    }
    int rem_weight = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      rem_weight += remaining[i] * kinds_[i].weight;
      if (both_left == 0 && kinds_[i].overlapping && remaining[i] > 0) return false;
    }
    if (rem_weight > width_ * (both_left + nol_left)) return false;

    std::vector<int> key = remaining;
    key.push_back(both_left);
    key.push_back(nol_left);
    key.push_back(static_cast<int>(start));
    if (failed_.count(key)) return false;

    const auto& list = both_left > 0 ? configs_ : nol_only_;
    for (std::size_t idx = start; idx < list.size(); ++idx) {
      const Config& c = list[idx];
      bool fits = true;
      for (std::size_t i = 0; i < c.size() && fits; ++i) fits = c[i] <= remaining[i];
      if (!fits) continue;
      for (std::size_t i = 0; i < c.size(); ++i) remaining[i] -= c[i];
      const bool ok = both_left > 0 ? fill(remaining, both_left - 1, nol_left, both_left > 1 ? idx : 0)
                                    : fill(remaining, 0, nol_left - 1, idx);
      for (std::size_t i = 0; i < c.size(); ++i) remaining[i] += c[i];
      if (ok) return true;
    }
    failed_.insert(std::move(key));
    return false;
  }

  std::vector<InstructionKind> kinds_;
  int width_;
  std::vector<Config> configs_;
  std::vector<Config> nol_only_;
  std::set<std::vector<int>> failed_;
};

inline std::vector<InstructionKind> instruction_kinds(const KernelModel& k, const MachineModel& m) {
  std::vector<InstructionKind> kinds;
  auto add = [&](InstructionKind kind) {
    for (auto& existing : kinds) {
      if (existing.key() == kind.key()) {
        existing.count += kind.count;
        return;
      }
    }
    kinds.push_back(std::move(kind));
  };
  for (const auto& g : k.uops) {
    const Addressing a = g.addressing.value_or(Addressing::kBaseIndexOffset);
    switch (g.klass) {
      case UopClass::kLoad: add({g.count, 1, {load_ports(k, m)}, false}); break;
      case UopClass::kStore:
        add({g.count, m.store_uop_weight, {store_address_ports(k, m, a), store_data_ports(k, m)}, false});
        break;
      default: add({g.count, 1, {arithmetic_ports(k, m, g.klass)}, true}); break;
    }
  }
  return kinds;
}

}  // namespace detail

// In-core timing per cache line of work. t_nol and the raw t_ol are port
// throughput bounds. t_ol is then widened until a cycle-level schedule exists
// that also respects the retire width (stores weighted); any such deficit is
// charged to the overlapping part.
inline CoreTiming core_timing(const KernelModel& k, const MachineModel& m) {
  const auto nol = build_nol_problem(k, m);
  const auto ol = build_ol_problem(k, m);
  const HallBound nol_bound = hall_bound(nol);
  const HallBound ol_bound = hall_bound(ol);

  CoreTiming t;
  t.t_nol = nol_bound.cycles;
  t.raw_t_ol = ol_bound.cycles;
  t.frontend_cycles = frontend_bound(k, m);

  auto kinds = detail::instruction_kinds(k, m);
  int instructions = 0;
  for (const auto& kind : kinds) instructions += kind.count;
  detail::JointScheduler joint(std::move(kinds), m.retire_width);
  int window = t.raw_t_ol;
  // One instruction per cycle fits on any valid machine, so the search ends by then.
  const int limit = std::max({t.raw_t_ol, t.t_nol, instructions});
  while (!joint.feasible(window, t.t_nol)) {
    if (++window > limit) {
      throw InvariantError("kernel '" + k.name + "' has no single-cycle schedule on machine '" +
                           m.name + "'");
    }
  }
  t.t_ol = window;

  if (t.t_ol > t.raw_t_ol) {
    t.bottleneck = "frontend";
  } else if (t.t_nol == 0 && t.t_ol == 0) {
    t.bottleneck = "none";
  } else if (t.t_nol >= t.t_ol) {
    t.bottleneck = "nOL ports " + format_ports(nol_bound.binding);
  } else {
    t.bottleneck = "OL ports " + format_ports(ol_bound.binding);
  }
  return t;
}

}  // namespace ecm
