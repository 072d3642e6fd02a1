#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include "ecm/error.hpp"

namespace ecm::detail {

using nlohmann::json;

// Strict accessor for one JSON object: every key must be known, required keys
// must be present, and every error names the dotted path of the field.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path, std::initializer_list<std::string_view> allowed)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw SchemaError(path_ + ": expected an object");
    for (const auto& [key, value] : object_.items()) {
      bool known = false;
      for (auto a : allowed) known = known || a == key;
      if (!known) throw SchemaError(path_ + ": unknown key '" + key + "'");
    }
  }

  bool has(std::string_view key) const { return object_.contains(key); }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json& get(std::string_view key) const {
    auto it = object_.find(key);
    if (it == object_.end()) throw SchemaError(field(key) + ": required key missing");
    return *it;
  }

  std::string string(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_string()) throw SchemaError(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  double number(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_number()) throw SchemaError(field(key) + ": expected a number");
    return v.get<double>();
  }

  double positive_number(std::string_view key) const {
    const double v = number(key);
    if (!(v > 0.0)) throw SchemaError(field(key) + ": must be > 0");
    return v;
  }

  long long integer(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_number_integer()) throw SchemaError(field(key) + ": expected an integer");
    return v.get<long long>();
  }

  long long integer_or(std::string_view key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_boolean()) throw SchemaError(field(key) + ": expected a boolean");
    return v.get<bool>();
  }

  const json& array(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_array()) throw SchemaError(field(key) + ": expected an array");
    return v;
  }

 private:
  const json& object_;
  std::string path_;
};

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace ecm::detail
