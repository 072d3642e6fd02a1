#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "ecm/error.hpp"
#include "ecm/kernel.hpp"
#include "ecm/machine.hpp"
#include "ecm/model.hpp"
#include "ecm/traffic.hpp"

namespace ecm {

// Loop iterations per second in millions, from the in-memory prediction.
inline Rational single_core_performance_exact(const ECMPrediction& pred, const KernelModel& k,
                                              const MachineModel& m) {
  if (pred.t_mem <= 0) throw DomainError("in-memory prediction must be positive");
  return exact(m.frequency_ghz) * 1000 * k.iterations_per_cache_line() / pred.t_mem;
}

inline double single_core_performance(const ECMPrediction& pred, const KernelModel& k,
                                      const MachineModel& m) {
  return to_double(single_core_performance_exact(pred, k, m));
}

struct BandwidthCeiling {
  Rational domain_mups;  // one memory domain saturated
  Rational chip_mups;    // every domain saturated
  bool compute_bound = false;  // no memory traffic: both ceilings are unbounded
};

namespace detail {

inline BandwidthCeiling ceiling_from(const KernelModel& k, const MachineModel& m, NumaMode mode,
                                     const StreamSignature& bandwidth_key) {
  BandwidthCeiling c;
  const int bytes = traffic(k).mem_bytes_per_iteration;
  if (bytes == 0) {
    c.compute_bound = true;
    return c;
  }
  const int domains = m.numa.n_domains;
  if (mode == NumaMode::kCod) {
    c.domain_mups = exact(domain_bandwidth(m, bandwidth_key)) * 1000 / bytes;
    c.chip_mups = c.domain_mups * domains;
  } else {
    c.chip_mups = exact(chip_bandwidth(m, bandwidth_key)) * 1000 / bytes;
    c.domain_mups = c.chip_mups / domains;
  }
  return c;
}

}  // namespace detail

// Bandwidth-bound performance: sustained bandwidth over bytes per iteration.
inline BandwidthCeiling bandwidth_ceiling(const KernelModel& k, const MachineModel& m, NumaMode mode) {
  return detail::ceiling_from(k, m, mode, stream_signature(k));
}

struct PerformancePoint {
  int cores = 0;
  double performance_mups = 0.0;
  bool bandwidth_bound = false;
};

enum class Pinning { kDomainSequential, kRoundRobin };

inline std::string_view to_string(Pinning p) {
  return p == Pinning::kDomainSequential ? "sequential" : "round-robin";
}

struct ScalingOptions {
  Pinning pinning = Pinning::kDomainSequential;
  PenaltyConfig penalty;
};

struct ScalingCurve {
  NumaMode mode = NumaMode::kCod;
  std::vector<PerformancePoint> points;
  std::optional<int> saturation_cores;  // first point with a saturated memory domain
  double ceiling_mups = std::numeric_limits<double>::infinity();
  double single_core_mups = 0.0;
  ECMPrediction single_core_prediction;
  // Cores needed to saturate one domain (CoD) or the chip (non-CoD).
  std::optional<int> cores_to_saturate;
  bool compute_bound = false;
};

// Cores placed in each memory domain when `cores` threads are pinned.
inline std::vector<int> domain_occupancy(const NumaConfig& numa, int cores, Pinning pinning) {
  std::vector<int> occ(static_cast<std::size_t>(numa.n_domains), 0);
  for (int c = 0; c < cores; ++c) {
    const int d = pinning == Pinning::kDomainSequential ? c / numa.cores_per_domain : c % numa.n_domains;
    ++occ[static_cast<std::size_t>(d)];
  }
  return occ;
}

// The prediction one core sees in `mode` (its bandwidth table applied).
inline ECMPrediction mode_prediction(const KernelModel& k, const MachineModel& m, NumaMode mode,
                                     const PenaltyConfig& penalty = {}) {
  const auto in = ecm_input(k, m, mode_bandwidth(m, stream_signature(k), mode));
  return apply_penalty(predict(in), k, penalty);
}

// Linear scaling of the single-core performance until memory bandwidth
// binds. Under CoD each domain saturates separately at its own ceiling.
inline ScalingCurve scale(const KernelModel& k, const MachineModel& m, NumaMode mode, int max_cores,
                          const ScalingOptions& opts = {}) {
  const int total = m.numa.total_cores();
  if (max_cores < 1 || max_cores > total) {
    throw DomainError("core count " + std::to_string(max_cores) + " outside [1, " +
                      std::to_string(total) + "]");
  }
  ScalingCurve curve;
  curve.mode = mode;
  curve.single_core_prediction = mode_prediction(k, m, mode, opts.penalty);
  const Rational p1 = single_core_performance_exact(curve.single_core_prediction, k, m);
  curve.single_core_mups = to_double(p1);
  const BandwidthCeiling ceil = bandwidth_ceiling(k, m, mode);
  curve.compute_bound = ceil.compute_bound;
  if (!ceil.compute_bound) {
    curve.ceiling_mups = to_double(ceil.chip_mups);
    const Rational& unit = mode == NumaMode::kCod ? ceil.domain_mups : ceil.chip_mups;
    curve.cores_to_saturate = static_cast<int>(ceil_int(unit / p1));
  }

  for (int n = 1; n <= max_cores; ++n) {
    PerformancePoint pt;
    pt.cores = n;
    Rational perf = 0;
    if (ceil.compute_bound) {
      perf = p1 * n;
    } else if (mode == NumaMode::kCod) {
      for (int occupied : domain_occupancy(m.numa, n, opts.pinning)) {
        if (occupied == 0) continue;
        const Rational linear = p1 * occupied;
        if (linear >= ceil.domain_mups) {
          perf += ceil.domain_mups;
          pt.bandwidth_bound = true;
        } else {
          perf += linear;
        }
      }
    } else {
      const Rational linear = p1 * n;
      pt.bandwidth_bound = linear >= ceil.chip_mups;
      perf = pt.bandwidth_bound ? ceil.chip_mups : linear;
    }
    pt.performance_mups = to_double(perf);
    if (pt.bandwidth_bound && !curve.saturation_cores) curve.saturation_cores = n;
    curve.points.push_back(pt);
  }
  return curve;
}

struct NtSpeedup {
  Rational volume_ratio;        // regular / non-temporal memory volume
  BandwidthCeiling regular;     // ceilings with write-allocate
  BandwidthCeiling nontemporal; // ceilings with streaming stores
};

// Expected gain from non-temporal stores. Both variants use the sustained
// bandwidth measured for the regular pattern unless the machine lists one
// for the streaming-store pattern.
inline NtSpeedup nt_speedup(const KernelModel& k, const MachineModel& m, NumaMode mode = NumaMode::kCod) {
  NtSpeedup out;
  out.volume_ratio = nt_volume_ratio(k);
  const KernelModel regular = with_nontemporal_writes(k, false);
  const KernelModel nt = with_nontemporal_writes(k, true);
  const StreamSignature regular_key = stream_signature(regular);
  const StreamSignature nt_key = stream_signature(nt);
  out.regular = detail::ceiling_from(regular, m, mode, regular_key);
  out.nontemporal = detail::ceiling_from(nt, m, mode, has_bandwidth_entry(m, nt_key) ? nt_key : regular_key);
  return out;
}

}  // namespace ecm
