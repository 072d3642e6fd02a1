#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "ecm/error.hpp"
#include "ecm/kernel.hpp"
#include "ecm/machine.hpp"
#include "ecm/rational.hpp"
#include "ecm/scheduler.hpp"
#include "ecm/traffic.hpp"

namespace ecm {

enum class Level { kL1, kL2, kL3, kMem };

inline constexpr std::array<Level, 4> kLevels = {Level::kL1, Level::kL2, Level::kL3, Level::kMem};

inline std::string_view to_string(Level l) {
  switch (l) {
    case Level::kL1: return "L1";
    case Level::kL2: return "L2";
    case Level::kL3: return "L3";
    case Level::kMem: return "MEM";
  }
  return "?";
}

inline std::optional<Level> level_from_string(std::string_view s) {
  for (Level l : kLevels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

// Model input in cycles per cache line of work:
// {T_OL || T_nOL | T_L1L2 | T_L2L3 | T_L3Mem}.
struct ECMInput {
  Rational t_ol;
  Rational t_nol;
  Rational t_l1l2;
  Rational t_l2l3;
  Rational t_l3mem;

  bool operator==(const ECMInput&) const = default;
};

// Predicted runtime with the working set in L1, L2, L3 or memory.
struct ECMPrediction {
  Rational t_core;
  Rational t_l2;
  Rational t_l3;
  Rational t_mem;
  bool penalty_applied = false;

  const Rational& at(Level l) const {
    switch (l) {
      case Level::kL1: return t_core;
      case Level::kL2: return t_l2;
      case Level::kL3: return t_l3;
      case Level::kMem: return t_mem;
    }
    return t_mem;
  }

  bool monotone() const { return t_core <= t_l2 && t_l2 <= t_l3 && t_l3 <= t_mem; }

  bool same_cycles(const ECMPrediction& o) const {
    return t_core == o.t_core && t_l2 == o.t_l2 && t_l3 == o.t_l3 && t_mem == o.t_mem;
  }
  bool operator==(const ECMPrediction&) const = default;
};

// Cycles to move one 64 B line at the given bandwidth and core clock.
inline Rational mem_cycles_per_cl(const Rational& bandwidth_gbs, const Rational& frequency_ghz) {
  if (bandwidth_gbs <= 0 || frequency_ghz <= 0) {
    throw DomainError("bandwidth and frequency must be positive");
  }
  return Rational(kCacheLineBytes) * frequency_ghz / bandwidth_gbs;
}

inline Rational mem_cycles_per_cl(double bandwidth_gbs, double frequency_ghz) {
  if (!(bandwidth_gbs > 0.0) || !(frequency_ghz > 0.0)) {
    throw DomainError("bandwidth and frequency must be positive");
  }
  return mem_cycles_per_cl(exact(bandwidth_gbs), exact(frequency_ghz));
}

// Input using an explicit sustained memory bandwidth.
inline ECMInput ecm_input(const KernelModel& k, const MachineModel& m, double bandwidth_gbs) {
  const CoreTiming core = core_timing(k, m);
  const TrafficProfile tr = traffic(k);
  ECMInput in;
  in.t_ol = core.t_ol;
  in.t_nol = core.t_nol;
  in.t_l1l2 = Rational(tr.cls_l1l2 * kCacheLineBytes, m.bytes_per_cycle(BoundaryName::kL1L2));
  in.t_l2l3 = Rational(tr.cls_l2l3 * kCacheLineBytes, m.bytes_per_cycle(BoundaryName::kL2L3));
  in.t_l3mem = tr.cls_l3mem * mem_cycles_per_cl(bandwidth_gbs, m.frequency_ghz);
  return in;
}

// Input using the bandwidth measured for the kernel's access pattern.
inline ECMInput ecm_input(const KernelModel& k, const MachineModel& m) {
  return ecm_input(k, m, lookup_bandwidth(m, stream_signature(k)));
}

// Overlap rule: each level costs max(T_OL, T_nOL + transfers up to it).
inline ECMPrediction predict(const ECMInput& in) {
  ECMPrediction p;
  const Rational l2 = in.t_nol + in.t_l1l2;
  const Rational l3 = l2 + in.t_l2l3;
  const Rational mem = l3 + in.t_l3mem;
  p.t_core = in.t_ol > in.t_nol ? in.t_ol : in.t_nol;
  p.t_l2 = in.t_ol > l2 ? in.t_ol : l2;
  p.t_l3 = in.t_ol > l3 ? in.t_ol : l3;
  p.t_mem = in.t_ol > mem ? in.t_ol : mem;
  return p;
}

// Empirical off-core correction: a fixed number of cycles per load stream
// for each level beyond L2 the data passes.
struct PenaltyConfig {
  bool enabled = false;
  Rational cycles_per_load_stream_per_level = 1;
  // Applies only to kernels whose core time is below this many cycles per CL.
  std::optional<Rational> low_cycle_threshold;
};

// Read, read-modify-write and write-allocate streams all load lines.
inline int penalty_load_streams(const KernelModel& k) {
  return k.count_streams(Access::kRead) + k.count_streams(Access::kReadWrite) + rfo_streams(k);
}

inline ECMPrediction apply_penalty(const ECMPrediction& pred, const KernelModel& k,
                                   const PenaltyConfig& cfg) {
  if (!cfg.enabled) return pred;
  if (cfg.cycles_per_load_stream_per_level < 0) {
    throw DomainError("penalty cycles per load stream must be non-negative");
  }
  if (cfg.low_cycle_threshold && !(pred.t_core < *cfg.low_cycle_threshold)) return pred;
  const Rational per_level = penalty_load_streams(k) * cfg.cycles_per_load_stream_per_level;
  ECMPrediction out = pred;
  out.t_l3 += per_level;
  out.t_mem += 2 * per_level;
  out.penalty_applied = true;
  if (!out.monotone()) throw InvariantError("penalty broke level monotonicity");
  return out;
}

struct Measurement {
  std::string kernel;
  std::array<double, 4> cycles{};  // L1, L2, L3, MEM

  double at(Level l) const { return cycles[static_cast<std::size_t>(l)]; }
};

struct LevelError {
  Rational signed_fraction;  // (measured - predicted) / measured
  long percent = 0;          // |signed_fraction| in percent, rounded
  long signed_percent = 0;
};

// Relative model error per level, measured value as the denominator.
inline LevelError level_error(const Rational& predicted, double measured) {
  if (!(measured > 0.0)) throw DomainError("measured value must be positive");
  const Rational meas = exact(measured);
  LevelError e;
  e.signed_fraction = (meas - predicted) / meas;
  const Rational pct = round_decimals(e.signed_fraction * 100, 0);
  e.signed_percent = boost::multiprecision::numerator(pct).convert_to<long>();
  e.percent = e.signed_percent < 0 ? -e.signed_percent : e.signed_percent;
  return e;
}

inline std::array<LevelError, 4> model_error(const ECMPrediction& pred, const Measurement& meas) {
  std::array<LevelError, 4> out;
  for (Level l : kLevels) out[static_cast<std::size_t>(l)] = level_error(pred.at(l), meas.at(l));
  return out;
}

}  // namespace ecm
