#pragma once

// Command implementations for the `ecm` executable. Kept in a header so the
// test suite can drive every command in-process.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ecm/ecm.hpp"

namespace ecm::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

enum class OutputFormat { kTable, kCsv, kJson };

// Bad user input: unknown names, unreadable files, out-of-range flags.
class InputError : public Error {
 public:
  using Error::Error;
};

struct GlobalOptions {
  std::string machine = "haswell";
  std::vector<std::string> kernels;
  OutputFormat format = OutputFormat::kTable;
  bool penalty = false;
  bool precise = false;
};

// Left-aligned plain-text table.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      if (width.size() < r.size()) width.resize(r.size(), 0);
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    for (const auto& r : rows_) {
      std::string line;
      for (std::size_t i = 0; i < r.size(); ++i) {
        line += r[i];
        if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
      }
      out << line << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

// Formats once so that every output format carries the same digits.
struct Num {
  std::string text;
  bool exact_fraction = false;  // "736/81" cannot be a JSON number

  nlohmann::json json() const {
    if (exact_fraction || text.find('/') != std::string::npos) return text;
    if (text == "inf") return nullptr;
    return nlohmann::json::parse(text);
  }
};

inline Num cycles_num(const Rational& v, bool precise) {
  return {format_number(v, precise ? NumberStyle::kExact : NumberStyle::kCanonical), precise};
}

inline Num rate_num(const Rational& v) { return {format_fixed(v, 1), false}; }

inline Num rate_num(double v) {
  if (!std::isfinite(v)) return {"inf", false};
  return rate_num(exact(v));
}

// Shortest decimal that reads back as `v`.
inline std::string exact_text(double v) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// --- resolution ----------------------------------------------------------

inline std::vector<std::filesystem::path> machine_search_dirs() {
  std::vector<std::filesystem::path> dirs;
  if (const char* env = std::getenv("ECM_MACHINE_PATH")) {
    std::stringstream ss(env);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
      if (!dir.empty()) dirs.emplace_back(dir);
    }
  }
  return dirs;
}

inline MachineModel resolve_machine(const std::string& which, std::ostream& err) {
  auto load = [&](const std::filesystem::path& p) {
    MachineModel m = load_machine(p);
    for (const auto& w : validate(m)) err << "warning: " << w << '\n';
    return m;
  };
  if (which == "haswell") return builtin_haswell();
  if (std::filesystem::is_regular_file(which)) return load(which);
  for (const auto& dir : machine_search_dirs()) {
    for (const auto& candidate : {dir / which, dir / (which + ".json")}) {
      if (std::filesystem::is_regular_file(candidate)) return load(candidate);
    }
  }
  throw InputError("unknown machine '" + which +
                   "' (builtin: haswell; or a machine file path; ECM_MACHINE_PATH is searched)");
}

inline std::string builtin_kernel_list() {
  std::vector<std::string> names;
  for (const auto& [name, _] : builtin_kernels()) names.push_back(name);
  return join(names, ", ");
}

inline KernelModel resolve_kernel(const std::string& which, std::ostream& err) {
  const auto builtins = builtin_kernels();
  if (auto it = builtins.find(which); it != builtins.end()) return it->second;
  if (std::filesystem::is_regular_file(which)) {
    std::vector<std::string> warnings;
    KernelModel k = load_kernel(which, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    return k;
  }
  throw InputError("unknown kernel '" + which + "'; builtin kernels: " + builtin_kernel_list());
}

inline std::vector<KernelModel> resolve_kernels(const GlobalOptions& g, std::ostream& err) {
  if (g.kernels.empty()) throw InputError("no kernel given (-k); builtin kernels: " + builtin_kernel_list());
  std::vector<KernelModel> out;
  for (const auto& k : g.kernels) out.push_back(resolve_kernel(k, err));
  return out;
}

inline std::string describe_streams(const KernelModel& k) {
  std::vector<std::string> parts;
  for (const auto& s : k.streams) {
    std::string a = s.access == Access::kRead ? "r" : s.access == Access::kWrite ? "w" : "rw";
    parts.push_back(s.array_name + ":" + a + (s.nontemporal ? "(nt)" : ""));
  }
  return join(parts, " ");
}

inline std::string describe_uops(const KernelModel& k) {
  std::vector<std::string> parts;
  for (const auto& g : k.uops) {
    std::string p = std::to_string(g.count) + " " + std::string(to_string(g.klass));
    if (g.addressing) p += g.addressing == Addressing::kOffsetOnly ? "(offset)" : "(bio)";
    parts.push_back(p);
  }
  return join(parts, ", ");
}

// --- predict -------------------------------------------------------------

struct LevelFigures {
  Level level;
  Num cycles, mups, gbs;
};

inline std::vector<LevelFigures> level_figures(const ECMPrediction& p, const KernelModel& k,
                                               const MachineModel& m, bool precise) {
  std::vector<LevelFigures> out;
  const int bytes = traffic(k).mem_bytes_per_iteration;
  for (Level l : kLevels) {
    const Rational mups = exact(m.frequency_ghz) * 1000 * k.iterations_per_cache_line() / p.at(l);
    out.push_back({l, cycles_num(p.at(l), precise), rate_num(mups), rate_num(mups * bytes / 1000)});
  }
  return out;
}

inline int cmd_predict(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const MachineModel m = resolve_machine(g.machine, err);
  const auto kernels = resolve_kernels(g, err);
  const NumberStyle style = g.precise ? NumberStyle::kExact : NumberStyle::kCanonical;
  PenaltyConfig penalty;
  penalty.enabled = g.penalty;

  nlohmann::json jout = nlohmann::json::array();
  TextTable csv({"kernel", "penalty", "t_ol", "t_nol", "t_l1l2", "t_l2l3", "t_l3mem", "l1_cycles",
                 "l2_cycles", "l3_cycles", "mem_cycles", "l1_mups", "l2_mups", "l3_mups", "mem_mups",
                 "l1_gbs", "l2_gbs", "l3_gbs", "mem_gbs"});
  std::vector<std::vector<std::string>> csv_rows;
  for (const auto& k : kernels) {
    const CoreTiming core = core_timing(k, m);
    const ECMInput in = ecm_input(k, m);
    const ECMPrediction pred = apply_penalty(predict(in), k, penalty);
    const auto figures = level_figures(pred, k, m, g.precise);
    const std::array<const Rational*, 5> parts = {&in.t_ol, &in.t_nol, &in.t_l1l2, &in.t_l2l3, &in.t_l3mem};

    if (g.format == OutputFormat::kTable) {
      out << "kernel      " << k.name << '\n';
      out << "machine     " << m.name << " (" << exact_text(m.frequency_ghz) << " GHz)\n";
      out << "input       " << format_ecm(in, style) << " c\n";
      out << "prediction  " << format_ecm(pred, style) << " c" << (pred.penalty_applied ? " (penalty applied)" : "")
          << '\n';
      out << "core        T_OL " << core.t_ol << ", T_nOL " << core.t_nol << ", frontend " << core.frontend_cycles
          << ", bottleneck " << core.bottleneck << "\n\n";
      TextTable t({"level", "cycles/CL", "MUp/s", "GB/s"});
      for (const auto& f : figures) t.add({std::string(to_string(f.level)), f.cycles.text, f.mups.text, f.gbs.text});
      t.print(out);
      out << '\n';
    } else if (g.format == OutputFormat::kCsv) {
      std::vector<std::string> row = {k.name, pred.penalty_applied ? "1" : "0"};
      for (auto* v : parts) row.push_back(cycles_num(*v, g.precise).text);
      for (const auto& f : figures) row.push_back(f.cycles.text);
      for (const auto& f : figures) row.push_back(f.mups.text);
      for (const auto& f : figures) row.push_back(f.gbs.text);
      csv_rows.push_back(std::move(row));
    } else {
      static const std::array<const char*, 5> names = {"t_ol", "t_nol", "t_l1l2", "t_l2l3", "t_l3mem"};
      nlohmann::json ji = {{"shorthand", format_ecm(in, style)}};
      for (std::size_t i = 0; i < 5; ++i) ji[names[i]] = cycles_num(*parts[i], g.precise).json();
      nlohmann::json levels = nlohmann::json::array();
      for (const auto& f : figures) {
        levels.push_back({{"level", std::string(to_string(f.level))},
                          {"cycles", f.cycles.json()},
                          {"mups", f.mups.json()},
                          {"gbs", f.gbs.json()}});
      }
      jout.push_back({{"kernel", k.name},
                      {"machine", m.name},
                      {"input", ji},
                      {"prediction", {{"shorthand", format_ecm(pred, style)}, {"penalty_applied", pred.penalty_applied}}},
                      {"core", {{"t_ol", core.t_ol}, {"t_nol", core.t_nol}, {"frontend_cycles", core.frontend_cycles},
                                {"bottleneck", core.bottleneck}}},
                      {"levels", levels}});
    }
  }
  if (g.format == OutputFormat::kCsv) {
    out << "kernel,penalty,t_ol,t_nol,t_l1l2,t_l2l3,t_l3mem,l1_cycles,l2_cycles,l3_cycles,mem_cycles,"
           "l1_mups,l2_mups,l3_mups,mem_mups,l1_gbs,l2_gbs,l3_gbs,mem_gbs\n";
    for (const auto& r : csv_rows) out << join(r, ",") << '\n';
  } else if (g.format == OutputFormat::kJson) {
    out << jout.dump(2) << '\n';
  }
  return kOk;
}

// --- traffic -------------------------------------------------------------

inline int cmd_traffic(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto kernels = resolve_kernels(g, err);
  const MachineModel m = resolve_machine(g.machine, err);
  nlohmann::json jout = nlohmann::json::array();
  TextTable table({"kernel", "L1L2", "L2L3", "L3Mem", "B/iter", "B/iter(no RFO)", "T_L1L2", "T_L2L3"});
  if (g.format == OutputFormat::kCsv) {
    out << "kernel,cls_l1l2,cls_l2l3,cls_l3mem,mem_bytes_per_iteration,mem_bytes_no_rfo\n";
  }
  for (const auto& k : kernels) {
    const TrafficProfile t = traffic(k);
    const ECMInput in = ecm_input(k, m);
    switch (g.format) {
      case OutputFormat::kTable:
        table.add({k.name, std::to_string(t.cls_l1l2), std::to_string(t.cls_l2l3), std::to_string(t.cls_l3mem),
                   std::to_string(t.mem_bytes_per_iteration), std::to_string(t.mem_bytes_per_iteration_no_rfo),
                   cycles_num(in.t_l1l2, g.precise).text + " c", cycles_num(in.t_l2l3, g.precise).text + " c"});
        break;
      case OutputFormat::kCsv:
        out << k.name << ',' << t.cls_l1l2 << ',' << t.cls_l2l3 << ',' << t.cls_l3mem << ','
            << t.mem_bytes_per_iteration << ',' << t.mem_bytes_per_iteration_no_rfo << '\n';
        break;
      case OutputFormat::kJson:
        jout.push_back({{"kernel", k.name},
                        {"cls_l1l2", t.cls_l1l2},
                        {"cls_l2l3", t.cls_l2l3},
                        {"cls_l3mem", t.cls_l3mem},
                        {"mem_bytes_per_iteration", t.mem_bytes_per_iteration},
                        {"mem_bytes_no_rfo", t.mem_bytes_per_iteration_no_rfo}});
        break;
    }
  }
  if (g.format == OutputFormat::kTable) {
    out << "cache lines per CL of work; bytes per loop iteration at the memory boundary\n";
    table.print(out);
  } else if (g.format == OutputFormat::kJson) {
    out << jout.dump(2) << '\n';
  }
  return kOk;
}

// --- scale ---------------------------------------------------------------

struct ScaleOptions {
  int cores = 0;  // 0: every core of the machine
  NumaMode mode = NumaMode::kCod;
  Pinning pinning = Pinning::kDomainSequential;
};

inline int cmd_scale(const GlobalOptions& g, const ScaleOptions& s, std::ostream& out, std::ostream& err) {
  const MachineModel m = resolve_machine(g.machine, err);
  const auto kernels = resolve_kernels(g, err);
  const int cores = s.cores == 0 ? m.numa.total_cores() : s.cores;
  if (cores < 1 || cores > m.numa.total_cores()) {
    throw InputError("--cores must be in [1, " + std::to_string(m.numa.total_cores()) + "]");
  }
  ScalingOptions opts;
  opts.pinning = s.pinning;
  opts.penalty.enabled = g.penalty;

  nlohmann::json jout = nlohmann::json::array();
  if (g.format == OutputFormat::kCsv) out << (kernels.size() > 1 ? "kernel," : "") << "cores,mups,bound\n";
  for (const auto& k : kernels) {
    const ScalingCurve curve = scale(k, m, s.mode, cores, opts);
    const Num single = rate_num(curve.single_core_mups);
    const Num ceiling = rate_num(curve.ceiling_mups);
    if (g.format == OutputFormat::kTable) {
      out << "kernel " << k.name << ", mode " << to_string(s.mode) << ", pinning " << to_string(s.pinning) << '\n';
      out << "single core " << single.text << " MUp/s (T_Mem "
          << cycles_num(curve.single_core_prediction.t_mem, g.precise).text << " c), ceiling " << ceiling.text
          << " MUp/s";
      if (curve.cores_to_saturate) {
        out << ", " << *curve.cores_to_saturate << " core(s) saturate "
            << (s.mode == NumaMode::kCod ? "a domain" : "the chip");
      }
      out << '\n';
      out << "saturation "
          << (curve.saturation_cores ? "at " + std::to_string(*curve.saturation_cores) + " cores" : "not reached")
          << "\n\n";
      TextTable t({"cores", "MUp/s", "bound"});
      for (const auto& p : curve.points) {
        t.add({std::to_string(p.cores), rate_num(p.performance_mups).text, p.bandwidth_bound ? "yes" : "no"});
      }
      t.print(out);
      out << '\n';
    } else if (g.format == OutputFormat::kCsv) {
      for (const auto& p : curve.points) {
        if (kernels.size() > 1) out << k.name << ',';
        out << p.cores << ',' << rate_num(p.performance_mups).text << ',' << (p.bandwidth_bound ? 1 : 0) << '\n';
      }
    } else {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& p : curve.points) {
        pts.push_back({{"cores", p.cores}, {"mups", rate_num(p.performance_mups).json()}, {"bound", p.bandwidth_bound}});
      }
      jout.push_back({{"kernel", k.name},
                      {"mode", std::string(to_string(s.mode))},
                      {"pinning", std::string(to_string(s.pinning))},
                      {"single_core_mups", single.json()},
                      {"ceiling_mups", ceiling.json()},
                      {"saturation_cores", curve.saturation_cores ? nlohmann::json(*curve.saturation_cores) : nlohmann::json()},
                      {"points", pts}});
    }
  }
  if (g.format == OutputFormat::kJson) out << jout.dump(2) << '\n';
  return kOk;
}

// --- compare -------------------------------------------------------------

struct CompareOptions {
  std::string measurements;  // empty: embedded reference measurements
  bool no_penalty = false;
  double tolerance = -1.0;   // percent; negative disables the check
};

inline int cmd_compare(const GlobalOptions& g, const CompareOptions& c, std::ostream& out, std::ostream& err) {
  const MachineModel m = resolve_machine(g.machine, err);
  std::vector<std::string> warnings;
  MeasurementTable meas;
  if (c.measurements.empty()) {
    meas = embedded_golden().measurements();
  } else {
    meas = load_measurements(c.measurements, &warnings);
  }
  for (const auto& w : warnings) err << "warning: " << w << '\n';

  std::vector<std::string> names = g.kernels.empty() ? meas.kernels() : g.kernels;
  PenaltyConfig penalty;
  penalty.enabled = !c.no_penalty;

  TextTable table({"kernel", "level", "predicted", "measured", "error", "|error|"});
  if (penalty.enabled) table = TextTable({"kernel", "level", "predicted", "measured", "error", "|error|",
                                          "pred+penalty", "error", "|error|"});
  if (g.format == OutputFormat::kCsv) {
    out << "kernel,level,predicted,measured,signed_error_pct,abs_error_pct";
    if (penalty.enabled) out << ",predicted_penalty,signed_error_penalty_pct,abs_error_penalty_pct";
    out << '\n';
  }
  nlohmann::json jout = nlohmann::json::array();
  bool within = true;
  for (const auto& name : names) {
    KernelModel k;
    try {
      k = resolve_kernel(name, err);
    } catch (const InputError&) {
      if (!g.kernels.empty()) throw;
      err << "warning: measurements for unknown kernel '" << name << "' skipped\n";
      continue;
    }
    if (!meas.rows.count(k.name) && !meas.rows.count(name)) {
      err << "warning: no measurements for kernel '" << name << "', skipped\n";
      continue;
    }
    const std::string key = meas.rows.count(name) ? name : k.name;
    const ECMPrediction base = predict(ecm_input(k, m));
    const ECMPrediction adjusted = apply_penalty(base, k, penalty);
    for (Level l : kLevels) {
      const auto measured = meas.get(key, l);
      if (!measured) continue;
      const LevelError e = level_error(base.at(l), *measured);
      const LevelError ep = level_error(adjusted.at(l), *measured);
      const long checked = penalty.enabled ? ep.percent : e.percent;
      if (c.tolerance >= 0 && static_cast<double>(checked) > c.tolerance) within = false;
      const std::string pred_text = cycles_num(base.at(l), g.precise).text;
      const std::string adj_text = cycles_num(adjusted.at(l), g.precise).text;
      const std::string meas_text = rate_num(*measured).text;
      std::vector<std::string> row = {name, std::string(to_string(l)), pred_text, meas_text,
                                      std::to_string(e.signed_percent), std::to_string(e.percent)};
      if (penalty.enabled) {
        row.insert(row.end(), {adj_text, std::to_string(ep.signed_percent), std::to_string(ep.percent)});
      }
      if (g.format == OutputFormat::kTable) {
        for (std::size_t i : {4u, 5u}) row[i] += "%";
        if (penalty.enabled) {
          for (std::size_t i : {7u, 8u}) row[i] += "%";
        }
        table.add(row);
      } else if (g.format == OutputFormat::kCsv) {
        out << join(row, ",") << '\n';
      } else {
        nlohmann::json j = {{"kernel", name},
                            {"level", std::string(to_string(l))},
                            {"predicted", cycles_num(base.at(l), g.precise).json()},
                            {"measured", rate_num(*measured).json()},
                            {"signed_error_pct", e.signed_percent},
                            {"abs_error_pct", e.percent}};
        if (penalty.enabled) {
          j["predicted_penalty"] = cycles_num(adjusted.at(l), g.precise).json();
          j["signed_error_penalty_pct"] = ep.signed_percent;
          j["abs_error_penalty_pct"] = ep.percent;
        }
        jout.push_back(std::move(j));
      }
    }
  }
  if (g.format == OutputFormat::kTable) {
    out << "error = (measured - predicted) / measured" << (penalty.enabled ? "; penalty columns add 1 c per load stream and level beyond L2" : "") << "\n";
    table.print(out);
  } else if (g.format == OutputFormat::kJson) {
    out << jout.dump(2) << '\n';
  }
  if (!within) {
    err << "model error exceeds tolerance of " << c.tolerance << "%\n";
    return kCheckFailed;
  }
  return kOk;
}

// --- validate ------------------------------------------------------------

inline int cmd_validate(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const MachineModel m = resolve_machine(g.machine, err);
  const ValidationReport report = validate_against(embedded_golden(), m, builtin_kernels());
  const int in_ok = report.count("input", true), in_total = report.total("input");
  const int pr_ok = report.count("prediction", true), pr_total = report.total("prediction");
  switch (g.format) {
    case OutputFormat::kTable: {
      for (const auto& c : report.cells) {
        if (!c.pass) {
          out << "MISMATCH " << c.kernel << " " << c.table << " " << c.cell << ": expected " << c.expected
              << ", got " << c.actual << '\n';
        }
      }
      out << in_ok << "/" << in_total << " input cells match\n";
      out << pr_ok << "/" << pr_total << " prediction cells match\n";
      break;
    }
    case OutputFormat::kCsv:
      out << "kernel,table,cell,expected,actual,pass\n";
      for (const auto& c : report.cells) {
        out << c.kernel << ',' << c.table << ',' << c.cell << ',' << c.expected << ',' << c.actual << ','
            << (c.pass ? 1 : 0) << '\n';
      }
      break;
    case OutputFormat::kJson: {
      nlohmann::json cells = nlohmann::json::array();
      for (const auto& c : report.cells) {
        cells.push_back({{"kernel", c.kernel}, {"table", c.table}, {"cell", c.cell},
                         {"expected", c.expected}, {"actual", c.actual}, {"pass", c.pass}});
      }
      out << nlohmann::json{{"machine", m.name},
                            {"input", {{"match", in_ok}, {"total", in_total}}},
                            {"prediction", {{"match", pr_ok}, {"total", pr_total}}},
                            {"ok", report.failures() == 0},
                            {"cells", cells}}
                 .dump(2)
          << '\n';
      break;
    }
  }
  return report.failures() == 0 ? kOk : kCheckFailed;
}

// --- inventory -----------------------------------------------------------

inline int cmd_list_kernels(const GlobalOptions& g, std::ostream& out) {
  const auto kernels = builtin_kernels();
  nlohmann::json jout = nlohmann::json::array();
  TextTable table({"kernel", "signature", "streams", "uops per CL", "flops/it"});
  if (g.format == OutputFormat::kCsv) out << "kernel,explicit_loads,stores,nt_stores,readwrites,streams,uops,flops_per_iteration\n";
  for (const auto& [name, k] : kernels) {
    const StreamSignature s = stream_signature(k);
    switch (g.format) {
      case OutputFormat::kTable:
        table.add({name, format_signature(s), describe_streams(k), describe_uops(k), std::to_string(k.flops_per_iteration)});
        break;
      case OutputFormat::kCsv:
        out << name << ',' << s.explicit_loads << ',' << s.stores << ',' << s.nt_stores << ',' << s.readwrites << ",\""
            << describe_streams(k) << "\",\"" << describe_uops(k) << "\"," << k.flops_per_iteration << '\n';
        break;
      case OutputFormat::kJson: {
        auto j = kernel_to_json(k);
        j["signature"] = {{"loads", s.explicit_loads}, {"stores", s.stores}, {"nt_stores", s.nt_stores},
                          {"readwrites", s.readwrites}};
        jout.push_back(std::move(j));
        break;
      }
    }
  }
  if (g.format == OutputFormat::kTable) table.print(out);
  if (g.format == OutputFormat::kJson) out << jout.dump(2) << '\n';
  return kOk;
}

inline int cmd_show_machine(const GlobalOptions& g, const std::string& name, std::ostream& out, std::ostream& err) {
  const MachineModel m = resolve_machine(name.empty() ? g.machine : name, err);
  if (g.format == OutputFormat::kJson) {
    out << machine_to_json(m).dump(2) << '\n';
    return kOk;
  }
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("name", m.name);
  kv.emplace_back("frequency", exact_text(m.frequency_ghz) + " GHz");
  kv.emplace_back("retire_width", std::to_string(m.retire_width) + " uops/c");
  kv.emplace_back("store_uop_weight", std::to_string(m.store_uop_weight));
  for (const auto& p : m.ports) {
    std::vector<std::string> caps;
    for (auto c : p.capabilities) caps.emplace_back(to_string(c));
    kv.emplace_back("port " + std::to_string(p.id), join(caps, " "));
  }
  for (const auto& b : m.boundaries) kv.emplace_back(std::string(to_string(b.name)), std::to_string(b.bytes_per_cycle) + " B/c");
  for (const auto& e : m.memory.table) {
    kv.emplace_back("bandwidth " + format_signature(e.signature), exact_text(e.gbs) + " GB/s");
  }
  for (const auto& e : m.memory.chip_table) {
    kv.emplace_back("chip bandwidth " + format_signature(e.signature), exact_text(e.gbs) + " GB/s");
  }
  kv.emplace_back("default bandwidth", exact_text(m.memory.default_bandwidth_gbs) + " GB/s");
  kv.emplace_back("noncod derating", exact_text(m.memory.noncod_derating));
  kv.emplace_back("numa", std::to_string(m.numa.n_domains) + " domain(s) x " + std::to_string(m.numa.cores_per_domain) +
                              " cores, CoD " + (m.numa.cod_enabled ? "on" : "off"));
  if (g.format == OutputFormat::kCsv) {
    out << "key,value\n";
    for (const auto& [k, v] : kv) out << '"' << k << "\",\"" << v << "\"\n";
  } else {
    TextTable t({"property", "value"});
    for (const auto& [k, v] : kv) t.add({k, v});
    t.print(out);
  }
  return kOk;
}

// --- entry point ---------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Execution-Cache-Memory model for streaming loop kernels", "ecm"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::string format = "table";
  app.add_option("-m,--machine", g.machine, "builtin machine name or machine file")->capture_default_str();
  app.add_option("-k,--kernel", g.kernels, "builtin kernel name or kernel file (repeatable)");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  app.add_flag("--penalty", g.penalty, "apply the off-core load-stream penalty");
  app.add_flag("--precise", g.precise, "print exact rationals instead of rounded cycles");

  auto* predict_cmd = app.add_subcommand("predict", "ECM input and prediction for kernels");
  auto* traffic_cmd = app.add_subcommand("traffic", "cache-line traffic per boundary");

  ScaleOptions so;
  std::string mode = "cod", pinning = "sequential";
  auto* scale_cmd = app.add_subcommand("scale", "multi-core scaling curve");
  scale_cmd->add_option("--cores", so.cores, "highest core count (default: all cores)");
  scale_cmd->add_option("--mode", mode, "NUMA mode")->check(CLI::IsMember({"cod", "noncod"}))->capture_default_str();
  scale_cmd->add_option("--pinning", pinning, "thread placement")
      ->check(CLI::IsMember({"sequential", "round-robin"}))
      ->capture_default_str();

  CompareOptions co;
  auto* compare_cmd = app.add_subcommand("compare", "model error against measurements");
  compare_cmd->add_option("--measurements", co.measurements, "CSV with kernel,level,cycles_per_cl (default: reference data)");
  compare_cmd->add_flag("--no-penalty", co.no_penalty, "omit the penalty-adjusted columns");
  compare_cmd->add_option("--tolerance", co.tolerance, "fail (exit 1) if any |error| exceeds this percentage");

  auto* validate_cmd = app.add_subcommand("validate", "recompute the reference table and diff it");
  auto* list_cmd = app.add_subcommand("list-kernels", "builtin kernels");
  std::string show_name;
  auto* show_cmd = app.add_subcommand("show-machine", "machine parameters");
  show_cmd->add_option("name", show_name, "machine name or file (default: -m)");

  std::vector<std::string> argv_storage = std::move(args);
  std::reverse(argv_storage.begin(), argv_storage.end());
  try {
    app.parse(argv_storage);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  g.format = format == "csv" ? OutputFormat::kCsv : format == "json" ? OutputFormat::kJson : OutputFormat::kTable;
  so.mode = mode == "noncod" ? NumaMode::kNonCod : NumaMode::kCod;
  so.pinning = pinning == "round-robin" ? Pinning::kRoundRobin : Pinning::kDomainSequential;

  try {
    if (*predict_cmd) return cmd_predict(g, out, err);
    if (*traffic_cmd) return cmd_traffic(g, out, err);
    if (*scale_cmd) return cmd_scale(g, so, out, err);
    if (*compare_cmd) return cmd_compare(g, co, out, err);
    if (*validate_cmd) return cmd_validate(g, out, err);
    if (*list_cmd) return cmd_list_kernels(g, out);
    if (*show_cmd) return cmd_show_machine(g, show_name, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace ecm::cli
