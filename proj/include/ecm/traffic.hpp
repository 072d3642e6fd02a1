#pragma once

#include "ecm/error.hpp"
#include "ecm/kernel.hpp"
#include "ecm/rational.hpp"

namespace ecm {

// Cache lines crossing each boundary per cache line of work, plus the bytes
// moved at the memory boundary per scalar loop iteration.
struct TrafficProfile {
  int cls_l1l2 = 0;
  int cls_l2l3 = 0;
  int cls_l3mem = 0;
  int mem_bytes_per_iteration = 0;         // including write-allocate reads
  int mem_bytes_per_iteration_no_rfo = 0;  // write-allocate reads left out

  bool operator==(const TrafficProfile&) const = default;
};

// Reads cost one line per boundary. Read-modify-write and regular writes cost
// two (load or write-allocate, then evict). Non-temporal writes bypass the
// caches through the fill buffers and cost one line at the memory boundary.
inline TrafficProfile traffic(const KernelModel& k) {
  const int reads = k.count_streams(Access::kRead);
  const int readwrites = k.count_streams(Access::kReadWrite);
  const int writes = k.count_streams(Access::kWrite, false);
  const int nt_writes = k.count_streams(Access::kWrite, true);

  TrafficProfile t;
  t.cls_l1l2 = reads + 2 * readwrites + 2 * writes;
  t.cls_l2l3 = t.cls_l1l2;
  t.cls_l3mem = t.cls_l1l2 + nt_writes;
  t.mem_bytes_per_iteration = k.element_bytes * (reads + 2 * readwrites + 2 * writes + nt_writes);
  t.mem_bytes_per_iteration_no_rfo = k.element_bytes * (reads + 2 * readwrites + writes + nt_writes);
  return t;
}

// Memory volume with regular stores over the volume with all write streams
// non-temporal; the bandwidth-bound speedup expected from streaming stores.
inline Rational nt_volume_ratio(const KernelModel& k) {
  if (k.count_streams(Access::kWrite) == 0) {
    throw DomainError("kernel '" + k.name + "' has no write stream to make non-temporal");
  }
  const int regular = traffic(with_nontemporal_writes(k, false)).mem_bytes_per_iteration;
  const int nt = traffic(with_nontemporal_writes(k, true)).mem_bytes_per_iteration;
  return Rational(regular, nt);
}

}  // namespace ecm
