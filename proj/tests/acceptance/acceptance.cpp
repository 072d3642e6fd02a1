// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ecm/ecm.hpp"
#include "oracles/cache_oracle.hpp"
#include "oracles/schedule_oracle.hpp"
#include "support/generators.hpp"

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

const ecm::MachineModel& haswell() {
  static const auto m = ecm::builtin_haswell();
  return m;
}

const std::map<std::string, ecm::KernelModel>& kernels() {
  static const auto k = ecm::builtin_kernels();
  return k;
}

Outcome table_inputs() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::string>> l3mem = {
      {"ddot", "9.1"}, {"load", "4.5"}, {"store", "12.5"}, {"update", "12.5"},
      {"copy", "16.8"}, {"stream_triad", "21.7"}, {"schoenauer_triad", "26.5"}};
  int cells = 0;
  for (const auto& [name, want] : l3mem) {
    const auto in = ecm::ecm_input(kernels().at(name), haswell());
    const auto* row = ecm::embedded_golden().find(name);
    o.require(row != nullptr, name + " missing from reference");
    if (!row) continue;
    const std::array<std::pair<ecm::Rational, ecm::Rational>, 4> integral = {
        {{in.t_ol, row->input.t_ol}, {in.t_nol, row->input.t_nol}, {in.t_l1l2, row->input.t_l1l2},
         {in.t_l2l3, row->input.t_l2l3}}};
    for (const auto& [got, expected] : integral) {
      o.require(ecm::is_integer(got) && got == expected, name + " integral entry differs");
      ++cells;
    }
    o.require(ecm::format_tenths(in.t_l3mem) == want, name + " T_L3Mem " + ecm::format_tenths(in.t_l3mem));
    ++cells;
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  o.require(ms < 1000.0, "runtime " + std::to_string(ms) + " ms");
  if (o.pass) o.detail = std::to_string(cells) + "/35 cells exact, " + ecm::format_fixed(ecm::exact(ms), 1) + " ms";
  return o;
}

Outcome table_predictions() {
  Outcome o;
  const auto report = ecm::validate_against(ecm::embedded_golden(), haswell(), kernels());
  for (const auto& c : report.cells) {
    o.require(c.pass, c.kernel + " " + c.table + " " + c.cell + " " + c.actual + " != " + c.expected);
  }
  const std::vector<std::pair<std::string, std::string>> spot = {
      {"ddot", "{2 \\ 4 \\ 8 \\ 17.1}"}, {"copy", "{2 \\ 5 \\ 11 \\ 27.8}"},
      {"schoenauer_triad", "{4 \\ 9 \\ 19 \\ 45.5}"}};
  for (const auto& [name, want] : spot) {
    const auto got = ecm::format_ecm(ecm::predict(ecm::ecm_input(kernels().at(name), haswell())));
    o.require(got == want, name + " " + got);
  }
  std::ostringstream out, err;
  const int code = ecm::cli::run({"validate"}, out, err);
  o.require(code == 0, "validate exit " + std::to_string(code));
  if (o.pass) {
    o.detail = std::to_string(report.count("prediction", true)) + "/" + std::to_string(report.total("prediction")) +
               " prediction cells, validate exit 0";
  }
  return o;
}

Outcome port_scheduler() {
  Outcome o;
  const int full = ecm::min_cycles(ecm::build_nol_problem(kernels().at("schoenauer_triad"), haswell()));
  const int simple = ecm::min_cycles(ecm::build_nol_problem(kernels().at("schoenauer_triad_opt"), haswell()));
  o.require(full == 4, "full-AGU addressing " + std::to_string(full) + " c");
  o.require(simple == 3, "simple-AGU addressing " + std::to_string(simple) + " c");
  const auto update = ecm::core_timing(kernels().at("update"), haswell());
  o.require(update.t_ol == 2 && update.raw_t_ol == 1 && update.frontend_cycles == 2,
            "update T_OL " + std::to_string(update.t_ol));
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = gen::scheduling_problem(10, 8);
    const int want = oracle::brute_force_min_cycles(p);
    if (ecm::min_cycles(p) != want || ecm::min_cycles_by_matching(p) != want) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
  if (o.pass) o.detail = "addressing 4 c / 3 c, update T_OL 2, 0/1000 oracle mismatches";
  return o;
}

Outcome traffic_counts() {
  Outcome o;
  const std::vector<std::pair<std::string, int>> expected = {
      {"ddot", 2}, {"load", 1}, {"store", 2}, {"update", 2}, {"copy", 3}, {"stream_triad", 4},
      {"schoenauer_triad", 5}};
  for (const auto& [name, n] : expected) {
    const auto t = ecm::traffic(kernels().at(name));
    o.require(t.cls_l1l2 == n && t.cls_l2l3 == n && t.cls_l3mem == n, name + " lines differ");
  }
  for (const auto& [nt, regular] : {std::pair{"stream_triad_nt", "stream_triad"},
                                    std::pair{"schoenauer_triad_nt", "schoenauer_triad"}}) {
    const auto a = ecm::traffic(kernels().at(nt));
    const auto b = ecm::traffic(kernels().at(regular));
    o.require(a.cls_l3mem == b.cls_l3mem - 1 && a.cls_l1l2 == b.cls_l1l2 - 2,
              std::string(nt) + " memory lines " + std::to_string(a.cls_l3mem));
  }
  // Every loop of one to three streams over the four access kinds.
  using oracle::Op;
  const std::array<Op, 4> ops = {Op::kRead, Op::kWrite, Op::kReadWrite, Op::kNtWrite};
  int loops = 0, disagreements = 0;
  for (int n = 1; n <= 3; ++n) {
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 4;
    for (int c = 0; c < combos; ++c) {
      ecm::KernelModel k;
      k.name = "synthetic";
      std::vector<oracle::LoopStream> loop;
      for (int i = 0, code = c; i < n; ++i, code /= 4) {
        const Op op = ops[static_cast<std::size_t>(code % 4)];
        loop.push_back({op});
        ecm::Stream s;
        s.array_name = std::string(1, static_cast<char>('A' + i));
        s.access = op == Op::kRead ? ecm::Access::kRead
                   : op == Op::kReadWrite ? ecm::Access::kReadWrite
                                          : ecm::Access::kWrite;
        s.nontemporal = op == Op::kNtWrite;
        k.streams.push_back(s);
      }
      const auto t = ecm::traffic(k);
      const auto replay = oracle::replay(loop, k.element_bytes, 4096);
      const std::array<int, 3> model = {t.cls_l1l2, t.cls_l2l3, t.cls_l3mem};
      for (std::size_t b = 0; b < 3; ++b) {
        if (std::abs(replay[b] - model[b]) > 1e-9) ++disagreements;
      }
      ++loops;
    }
  }
  o.require(disagreements == 0, std::to_string(disagreements) + " oracle disagreements");
  if (o.pass) o.detail = "2,1,2,2,3,4,5 lines; NT 4->3, 5->4; " + std::to_string(loops) + " synthetic loops match";
  return o;
}

Outcome penalty() {
  Outcome o;
  ecm::PenaltyConfig on;
  on.enabled = true;
  const auto& golden = ecm::embedded_golden();
  const auto ddot = ecm::predict(ecm::ecm_input(kernels().at("ddot"), haswell()));
  const auto adj = ecm::apply_penalty(ddot, kernels().at("ddot"), on);
  o.require(ecm::format_tenths(adj.t_l3) == "10", "ddot L3 " + ecm::format_tenths(adj.t_l3));
  o.require(ecm::format_tenths(adj.t_mem) == "21.1", "ddot Mem " + ecm::format_tenths(adj.t_mem));
  std::string detail;
  for (const char* name : {"ddot", "load"}) {
    const auto& k = kernels().at(name);
    const auto base = ecm::predict(ecm::ecm_input(k, haswell()));
    const auto pen = ecm::apply_penalty(base, k, on);
    const ecm::Rational measured = ecm::exact(golden.find(name)->measurement.at(ecm::Level::kMem));
    const ecm::Rational before = abs(measured - base.t_mem);
    const ecm::Rational after = abs(measured - pen.t_mem);
    o.require(after <= before, std::string(name) + " Mem error grows");
    detail += std::string(detail.empty() ? "" : ", ") + name + " Mem |err| " + ecm::format_fixed(before, 2) + " -> " +
              ecm::format_fixed(after, 2) + " c";
  }
  if (o.pass) o.detail = "ddot L3 10, Mem 21.1; " + detail;
  return o;
}

Outcome model_error() {
  Outcome o;
  int worst = 0, cells = 0;
  for (const auto& row : ecm::embedded_golden().rows) {
    const auto pred = ecm::predict(ecm::ecm_input(kernels().at(row.kernel), haswell()));
    const auto errs = ecm::model_error(pred, row.measurement);
    for (ecm::Level l : ecm::kLevels) {
      const auto i = static_cast<std::size_t>(l);
      const int diff = static_cast<int>(std::abs(errs[i].percent - row.model_error_percent[i]));
      worst = std::max(worst, diff);
      ++cells;
      o.require(diff <= 5, row.kernel + " " + std::string(ecm::to_string(l)) + " " +
                               std::to_string(errs[i].percent) + "% vs " +
                               std::to_string(row.model_error_percent[i]) + "%");
    }
  }
  if (o.pass) o.detail = std::to_string(cells) + " cells, largest deviation " + std::to_string(worst) + " pp";
  return o;
}

Outcome scaling() {
  Outcome o;
  const auto ddot = ecm::bandwidth_ceiling(kernels().at("ddot"), haswell(), ecm::NumaMode::kCod);
  o.require(ddot.chip_mups == 4050, "ddot chip ceiling " + ecm::format_exact(ddot.chip_mups));
  const double vs4000 = std::abs(ecm::to_double(ddot.chip_mups) / 4000.0 - 1.0);
  o.require(vs4000 <= 0.05, "ddot ceiling too far from 4000");
  const auto curve = ecm::scale(kernels().at("ddot"), haswell(), ecm::NumaMode::kCod, 14);
  o.require(curve.points.back().performance_mups == 4050.0, "ddot 14-core point below the ceiling");
  const auto triad = ecm::bandwidth_ceiling(kernels().at("stream_triad"), haswell(), ecm::NumaMode::kCod);
  const double vs831 = std::abs(ecm::to_double(triad.domain_mups) / 831.0 - 1.0);
  o.require(vs831 <= 0.02, "stream_triad domain ceiling " + ecm::format_fixed(triad.domain_mups, 1));
  const auto r1 = ecm::nt_volume_ratio(kernels().at("stream_triad"));
  const auto r2 = ecm::nt_volume_ratio(kernels().at("schoenauer_triad"));
  o.require(r1 == ecm::Rational(4, 3), "stream_triad NT ratio " + ecm::format_exact(r1));
  o.require(r2 == ecm::Rational(5, 4), "schoenauer_triad NT ratio " + ecm::format_exact(r2));
  if (o.pass) {
    std::ostringstream d;
    d << "ddot 4050 MUp/s (" << ecm::format_fixed(ecm::exact(vs4000 * 100), 2) << "% from 4000), stream_triad "
      << ecm::format_fixed(triad.domain_mups, 1) << " MUp/s (" << ecm::format_fixed(ecm::exact(vs831 * 100), 2)
      << "% from 831), NT 4/3 and 5/4";
    o.detail = d.str();
  }
  return o;
}

Outcome properties() {
  Outcome o;
  constexpr int kTrials = 1000;
  int failures = 0;
  for (int i = 0; i < kTrials; ++i) {
    if (!ecm::predict(gen::ecm_input()).monotone()) ++failures;
  }
  for (int i = 0; i < kTrials; ++i) {
    const ecm::ECMInput in{gen::tenths(100), gen::tenths(100), gen::tenths(100), gen::tenths(100), gen::tenths(999)};
    if (!(ecm::parse_ecm_input(ecm::format_ecm(in)) == in)) ++failures;
    const auto p = ecm::predict(in);
    if (!(ecm::parse_ecm_prediction(ecm::format_ecm(p, ecm::NumberStyle::kExact)) == p)) ++failures;
  }
  for (int i = 0; i < kTrials; ++i) {
    auto p = gen::scheduling_problem(9, 8);
    const int before = ecm::min_cycles(p);
    auto grown = p;
    grown.items.push_back({"extra", ecm::PortMask{1} << gen::uniform(0, 7), 1});
    if (ecm::min_cycles(grown) < before) ++failures;
    if (!p.items.empty()) {
      auto widened = p;
      widened.items[static_cast<std::size_t>(gen::uniform(0, static_cast<int>(p.items.size()) - 1))].allowed |=
          ecm::PortMask{1} << gen::uniform(0, 7);
      if (ecm::min_cycles(widened) > before) ++failures;
    }
  }
  for (int i = 0; i < kTrials; ++i) {
    auto k = gen::kernel();
    const auto sig = ecm::stream_signature(k);
    const auto t = ecm::traffic(k);
    const auto pred = ecm::predict(ecm::ecm_input(k, haswell()));
    gen::shuffle(k.streams);
    gen::shuffle(k.uops);
    const auto t2 = ecm::traffic(k);
    if (!(ecm::stream_signature(k) == sig) || t2.cls_l1l2 != t.cls_l1l2 || t2.cls_l3mem != t.cls_l3mem ||
        t2.mem_bytes_per_iteration != t.mem_bytes_per_iteration ||
        !(ecm::predict(ecm::ecm_input(k, haswell())) == pred)) {
      ++failures;
    }
  }
  o.require(failures == 0, std::to_string(failures) + " property failures");
  if (o.pass) o.detail = "4 suites x " + std::to_string(kTrials) + " trials, 0 failures";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Reference ECM inputs", table_inputs},
      {"Reference ECM predictions", table_predictions},
      {"Port scheduler", port_scheduler},
      {"Cache-line traffic", traffic_counts},
      {"Penalty heuristic", penalty},
      {"Model error band", model_error},
      {"Multi-core scaling", scaling},
      {"Randomized properties", properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
