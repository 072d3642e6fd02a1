#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ecm/error.hpp"
#include "ecm/model.hpp"

namespace ecm {

// Measured cycles per CL for each kernel; levels absent from the input stay empty.
struct MeasurementTable {
  std::map<std::string, std::array<std::optional<double>, 4>> rows;

  std::optional<double> get(const std::string& kernel, Level l) const {
    auto it = rows.find(kernel);
    if (it == rows.end()) return std::nullopt;
    return it->second[static_cast<std::size_t>(l)];
  }

  std::vector<std::string> kernels() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : rows) out.push_back(name);
    return out;
  }
};

class CsvError : public Error {
 public:
  CsvError(const std::string& what, std::size_t row)
      : Error("measurements row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

namespace detail {

inline std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

// Reads `kernel,level,cycles_per_cl` rows. Row numbers in errors count the
// header as row 1. Missing levels are reported through `warnings`.
inline MeasurementTable parse_measurements(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  MeasurementTable table;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto cells = detail::split_csv_line(trimmed);
    if (!header_seen) {
      if (cells != std::vector<std::string>{"kernel", "level", "cycles_per_cl"}) {
        throw CsvError("expected header 'kernel,level,cycles_per_cl'", row);
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 3) {
      throw CsvError("expected 3 fields, got " + std::to_string(cells.size()), row);
    }
    if (cells[0].empty()) throw CsvError("empty kernel name", row);
    std::string level_text = cells[1];
    std::transform(level_text.begin(), level_text.end(), level_text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    const auto level = level_from_string(level_text);
    if (!level) throw CsvError("unknown level '" + cells[1] + "' (expected L1, L2, L3 or MEM)", row);
    const auto value = parse_decimal(cells[2]);
    if (!value || *value <= 0 || to_double(*value) <= 0.0) {
      throw CsvError("cycles_per_cl must be a positive number, got '" + cells[2] + "'", row);
    }
    auto& slot = table.rows[cells[0]][static_cast<std::size_t>(*level)];
    if (slot) throw CsvError("duplicate row for " + cells[0] + "/" + level_text, row);
    slot = std::stod(cells[2]);
  }
  if (!header_seen) throw CsvError("missing header", row == 0 ? 1 : row);
  if (warnings) {
    for (const auto& [kernel, levels] : table.rows) {
      for (Level l : kLevels) {
        if (!levels[static_cast<std::size_t>(l)]) {
          warnings->push_back("no " + std::string(to_string(l)) + " measurement for '" + kernel +
                              "', level skipped");
        }
      }
    }
  }
  return table;
}

inline MeasurementTable load_measurements(const std::filesystem::path& path,
                                          std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_measurements(in, warnings);
}

}  // namespace ecm
