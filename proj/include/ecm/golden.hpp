#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ecm/golden_data.hpp"  // generated from data/reference.json
#include "ecm/json_util.hpp"
#include "ecm/kernel.hpp"
#include "ecm/measurements.hpp"
#include "ecm/model.hpp"
#include "ecm/notation.hpp"
#include "ecm/traffic.hpp"

namespace ecm {

// One row of the reference benchmark table on the Haswell machine.
struct GoldenRow {
  std::string kernel;
  int load_streams_explicit = 0;
  int load_streams_rfo = 0;
  int write_streams = 0;
  ECMInput input;
  ECMPrediction prediction;
  Measurement measurement;
  std::array<int, 4> model_error_percent{};
};

struct NtReference {
  std::string kernel;
  Rational volume_ratio;
  double domain_regular = 0, domain_nt = 0;
  double chip_regular = 0, chip_nt = 0;
};

struct GoldenData {
  std::string machine;
  std::vector<GoldenRow> rows;
  std::vector<NtReference> nt_reference;

  const GoldenRow* find(const std::string& kernel) const {
    for (const auto& r : rows) {
      if (r.kernel == kernel) return &r;
    }
    return nullptr;
  }

  MeasurementTable measurements() const {
    MeasurementTable t;
    for (const auto& r : rows) {
      for (Level l : kLevels) t.rows[r.kernel][static_cast<std::size_t>(l)] = r.measurement.at(l);
    }
    return t;
  }
};

inline GoldenData golden_from_json(const nlohmann::json& doc) {
  using detail::ObjectReader;
  ObjectReader top(doc, "golden", {"machine", "units", "kernels", "nt_reference"});
  GoldenData g;
  g.machine = top.string("machine");
  const auto& kernels = top.array("kernels");
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    ObjectReader r(kernels[i], "golden.kernels[" + std::to_string(i) + "]",
                   {"name", "load_streams_explicit", "load_streams_rfo", "write_streams", "input",
                    "prediction", "measurement", "model_error_percent"});
    GoldenRow row;
    row.kernel = r.string("name");
    row.load_streams_explicit = static_cast<int>(r.integer("load_streams_explicit"));
    row.load_streams_rfo = static_cast<int>(r.integer("load_streams_rfo"));
    row.write_streams = static_cast<int>(r.integer("write_streams"));
    row.input = parse_ecm_input(r.string("input"));
    row.prediction = parse_ecm_prediction(r.string("prediction"));
    row.measurement.kernel = row.kernel;
    const auto& meas = r.array("measurement");
    const auto& err = r.array("model_error_percent");
    if (meas.size() != 4 || err.size() != 4) {
      throw SchemaError(r.field("measurement") + ": expected four levels");
    }
    for (std::size_t l = 0; l < 4; ++l) {
      row.measurement.cycles[l] = meas[l].get<double>();
      row.model_error_percent[l] = err[l].get<int>();
    }
    g.rows.push_back(std::move(row));
  }
  if (top.has("nt_reference")) {
    const auto& nt = top.array("nt_reference");
    for (std::size_t i = 0; i < nt.size(); ++i) {
      const std::string path = "golden.nt_reference[" + std::to_string(i) + "]";
      ObjectReader r(nt[i], path, {"kernel", "volume_ratio", "domain_mups", "chip_mups"});
      NtReference ref;
      ref.kernel = r.string("kernel");
      const std::string ratio = r.string("volume_ratio");
      ref.volume_ratio = Rational(ratio);
      ObjectReader dom(r.get("domain_mups"), path + ".domain_mups", {"regular", "nontemporal"});
      ObjectReader chip(r.get("chip_mups"), path + ".chip_mups", {"regular", "nontemporal"});
      ref.domain_regular = dom.number("regular");
      ref.domain_nt = dom.number("nontemporal");
      ref.chip_regular = chip.number("regular");
      ref.chip_nt = chip.number("nontemporal");
      g.nt_reference.push_back(ref);
    }
  }
  return g;
}

// Reference data compiled into the library.
inline const GoldenData& embedded_golden() {
  static const GoldenData data = golden_from_json(nlohmann::json::parse(kReferenceJson));
  return data;
}

struct CellCheck {
  std::string kernel;
  std::string table;  // "input" or "prediction"
  std::string cell;   // column name
  std::string expected;
  std::string actual;
  bool pass = false;
};

struct ValidationReport {
  std::vector<CellCheck> cells;

  int count(const std::string& table, bool passed) const {
    int n = 0;
    for (const auto& c : cells) n += (c.table == table && c.pass == passed);
    return n;
  }
  int total(const std::string& table) const { return count(table, true) + count(table, false); }
  int failures() const { return count("input", false) + count("prediction", false); }
};

// Recomputes every reference row on `machine` and compares cell by cell in
// canonical one-decimal form.
inline ValidationReport validate_against(const GoldenData& golden, const MachineModel& machine,
                                         const std::map<std::string, KernelModel>& kernels) {
  static const std::array<const char*, 5> kInputCells = {"T_OL", "T_nOL", "T_L1L2", "T_L2L3", "T_L3Mem"};
  static const std::array<const char*, 4> kPredictionCells = {"L1", "L2", "L3", "Mem"};
  ValidationReport report;
  for (const auto& row : golden.rows) {
    auto it = kernels.find(row.kernel);
    if (it == kernels.end()) {
      for (auto* c : kInputCells) report.cells.push_back({row.kernel, "input", c, "", "missing kernel", false});
      for (auto* c : kPredictionCells) {
        report.cells.push_back({row.kernel, "prediction", c, "", "missing kernel", false});
      }
      continue;
    }
    const ECMInput in = ecm_input(it->second, machine);
    const ECMPrediction pred = predict(in);
    const std::array<const Rational*, 5> got_in = {&in.t_ol, &in.t_nol, &in.t_l1l2, &in.t_l2l3, &in.t_l3mem};
    const std::array<const Rational*, 5> want_in = {&row.input.t_ol, &row.input.t_nol, &row.input.t_l1l2,
                                                    &row.input.t_l2l3, &row.input.t_l3mem};
    for (std::size_t i = 0; i < 5; ++i) {
      CellCheck c{row.kernel, "input", kInputCells[i], format_tenths(*want_in[i]), format_tenths(*got_in[i]), false};
      c.pass = c.expected == c.actual;
      report.cells.push_back(std::move(c));
    }
    for (Level l : kLevels) {
      const auto i = static_cast<std::size_t>(l);
      CellCheck c{row.kernel, "prediction", kPredictionCells[i], format_tenths(row.prediction.at(l)),
                  format_tenths(pred.at(l)), false};
      c.pass = c.expected == c.actual;
      report.cells.push_back(std::move(c));
    }
  }
  return report;
}

}  // namespace ecm
