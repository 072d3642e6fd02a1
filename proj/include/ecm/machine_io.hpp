#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ecm/json_util.hpp"
#include "ecm/machine.hpp"

namespace ecm {

namespace detail {

inline std::vector<BandwidthEntry> parse_bandwidth_table(const json& arr, const std::string& path) {
  std::vector<BandwidthEntry> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    ObjectReader r(arr[i], path + "[" + std::to_string(i) + "]",
                   {"loads", "stores", "nt_stores", "readwrites", "gbs"});
    BandwidthEntry e;
    e.signature.explicit_loads = static_cast<int>(r.integer("loads"));
    e.signature.stores = static_cast<int>(r.integer("stores"));
    e.signature.nt_stores = static_cast<int>(r.integer("nt_stores"));
    e.signature.readwrites = static_cast<int>(r.integer_or("readwrites", 0));
    e.gbs = r.positive_number("gbs");
    out.push_back(e);
  }
  return out;
}

inline json bandwidth_table_to_json(const std::vector<BandwidthEntry>& table) {
  json arr = json::array();
  for (const auto& e : table) {
    json j = {{"loads", e.signature.explicit_loads},
              {"stores", e.signature.stores},
              {"nt_stores", e.signature.nt_stores}};
    if (e.signature.readwrites != 0) j["readwrites"] = e.signature.readwrites;
    j["gbs"] = e.gbs;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace detail

// Builds and validates a machine from its JSON form. Throws SchemaError for
// shape problems and InvariantError for rule violations.
inline MachineModel machine_from_json(const nlohmann::json& doc) {
  using detail::ObjectReader;
  ObjectReader top(doc, "", {"name", "frequency_ghz", "retire_width", "store_uop_weight", "ports",
                             "boundaries", "memory", "numa"});
  MachineModel m;
  m.name = top.string("name");
  m.frequency_ghz = top.positive_number("frequency_ghz");
  m.retire_width = static_cast<int>(top.integer("retire_width"));
  m.store_uop_weight = static_cast<int>(top.integer("store_uop_weight"));

  const auto& ports = top.array("ports");
  for (std::size_t i = 0; i < ports.size(); ++i) {
    const std::string path = "ports[" + std::to_string(i) + "]";
    ObjectReader r(ports[i], path, {"id", "capabilities"});
    PortSpec p;
    p.id = static_cast<int>(r.integer("id"));
    const auto& caps = r.array("capabilities");
    for (const auto& c : caps) {
      if (!c.is_string()) throw SchemaError(path + ".capabilities: expected strings");
      auto cap = capability_from_string(c.get<std::string>());
      if (!cap) {
        throw SchemaError(path + ".capabilities: unknown capability '" + c.get<std::string>() + "'");
      }
      p.capabilities.push_back(*cap);
    }
    m.ports.push_back(std::move(p));
  }

  const auto& bounds = top.array("boundaries");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const std::string path = "CacheBoundary boundaries[" + std::to_string(i) + "]";
    ObjectReader r(bounds[i], path, {"name", "bytes_per_cycle"});
    CacheBoundary b;
    auto name = boundary_from_string(r.string("name"));
    if (!name) throw SchemaError(r.field("name") + ": expected L1L2 or L2L3");
    b.name = *name;
    const long long bpc = r.integer("bytes_per_cycle");
    if (bpc <= 0) throw SchemaError(r.field("bytes_per_cycle") + ": must be a positive integer");
    b.bytes_per_cycle = static_cast<int>(bpc);
    m.boundaries.push_back(b);
  }

  ObjectReader mem(top.get("memory"), "memory",
                   {"default_bandwidth_gbs", "table", "chip_table", "noncod_derating"});
  m.memory.default_bandwidth_gbs = mem.positive_number("default_bandwidth_gbs");
  if (mem.has("table")) m.memory.table = detail::parse_bandwidth_table(mem.array("table"), "memory.table");
  if (mem.has("chip_table")) {
    m.memory.chip_table = detail::parse_bandwidth_table(mem.array("chip_table"), "memory.chip_table");
  }
  if (mem.has("noncod_derating")) m.memory.noncod_derating = mem.positive_number("noncod_derating");

  ObjectReader numa(top.get("numa"), "numa", {"domains", "cores_per_domain", "cod"});
  m.numa.n_domains = static_cast<int>(numa.integer("domains"));
  m.numa.cores_per_domain = static_cast<int>(numa.integer("cores_per_domain"));
  m.numa.cod_enabled = numa.boolean("cod");

  validate(m);
  return m;
}

inline nlohmann::json machine_to_json(const MachineModel& m) {
  using nlohmann::json;
  json ports = json::array();
  for (const auto& p : m.ports) {
    json caps = json::array();
    for (auto c : p.capabilities) caps.push_back(std::string(to_string(c)));
    ports.push_back({{"id", p.id}, {"capabilities", caps}});
  }
  json bounds = json::array();
  for (const auto& b : m.boundaries) {
    bounds.push_back({{"name", std::string(to_string(b.name))}, {"bytes_per_cycle", b.bytes_per_cycle}});
  }
  json memory = {{"default_bandwidth_gbs", m.memory.default_bandwidth_gbs},
                 {"table", detail::bandwidth_table_to_json(m.memory.table)}};
  if (!m.memory.chip_table.empty()) {
    memory["chip_table"] = detail::bandwidth_table_to_json(m.memory.chip_table);
  }
  if (m.memory.noncod_derating != 1.0) memory["noncod_derating"] = m.memory.noncod_derating;
  return {{"name", m.name},
          {"frequency_ghz", m.frequency_ghz},
          {"retire_width", m.retire_width},
          {"store_uop_weight", m.store_uop_weight},
          {"ports", ports},
          {"boundaries", bounds},
          {"memory", memory},
          {"numa",
           {{"domains", m.numa.n_domains},
            {"cores_per_domain", m.numa.cores_per_domain},
            {"cod", m.numa.cod_enabled}}}};
}

inline MachineModel load_machine(const std::filesystem::path& path) {
  const auto doc = detail::read_json_file(path);
  try {
    return machine_from_json(doc);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(path.string() + ": " + e.what());
  }
}

}  // namespace ecm
