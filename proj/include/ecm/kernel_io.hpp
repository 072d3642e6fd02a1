#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ecm/json_util.hpp"
#include "ecm/kernel.hpp"

namespace ecm {

inline KernelModel kernel_from_json(const nlohmann::json& doc,
                                    std::vector<std::string>* warnings = nullptr) {
  using detail::ObjectReader;
  ObjectReader top(doc, "", {"name", "element_bytes", "streams", "uops", "flops_per_iteration"});
  KernelModel k;
  k.name = top.string("name");
  k.element_bytes = static_cast<int>(top.integer("element_bytes"));
  k.flops_per_iteration = static_cast<int>(top.integer("flops_per_iteration"));

  const auto& streams = top.array("streams");
  for (std::size_t i = 0; i < streams.size(); ++i) {
    ObjectReader r(streams[i], "streams[" + std::to_string(i) + "]", {"array", "access", "nontemporal"});
    Stream s;
    s.array_name = r.string("array");
    auto access = access_from_string(r.string("access"));
    if (!access) throw SchemaError(r.field("access") + ": expected read, write or readwrite");
    s.access = *access;
    if (r.has("nontemporal")) s.nontemporal = r.boolean("nontemporal");
    k.streams.push_back(std::move(s));
  }

  const auto& uops = top.array("uops");
  for (std::size_t i = 0; i < uops.size(); ++i) {
    ObjectReader r(uops[i], "uops[" + std::to_string(i) + "]", {"count", "class", "addressing"});
    UopGroup g;
    g.count = static_cast<int>(r.integer("count"));
    auto klass = uop_class_from_string(r.string("class"));
    if (!klass) throw SchemaError(r.field("class") + ": unknown uop class '" + r.string("class") + "'");
    g.klass = *klass;
    if (r.has("addressing")) {
      auto a = addressing_from_string(r.string("addressing"));
      if (!a) throw SchemaError(r.field("addressing") + ": expected base-index-offset or offset-only");
      g.addressing = *a;
    }
    k.uops.push_back(g);
  }

  auto found = validate(k);
  if (warnings) warnings->insert(warnings->end(), found.begin(), found.end());
  return k;
}

inline nlohmann::json kernel_to_json(const KernelModel& k) {
  using nlohmann::json;
  json streams = json::array();
  for (const auto& s : k.streams) {
    json j = {{"array", s.array_name}, {"access", std::string(to_string(s.access))}};
    if (s.nontemporal) j["nontemporal"] = true;
    streams.push_back(std::move(j));
  }
  json uops = json::array();
  for (const auto& g : k.uops) {
    json j = {{"count", g.count}, {"class", std::string(to_string(g.klass))}};
    if (g.addressing) j["addressing"] = std::string(to_string(*g.addressing));
    uops.push_back(std::move(j));
  }
  return {{"name", k.name},
          {"element_bytes", k.element_bytes},
          {"streams", streams},
          {"uops", uops},
          {"flops_per_iteration", k.flops_per_iteration}};
}

inline KernelModel load_kernel(const std::filesystem::path& path,
                               std::vector<std::string>* warnings = nullptr) {
  const auto doc = detail::read_json_file(path);
  try {
    return kernel_from_json(doc, warnings);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(path.string() + ": " + e.what());
  }
}

}  // namespace ecm
