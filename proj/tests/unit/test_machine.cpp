#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "ecm/ecm.hpp"

namespace {

const std::string kData = ECM_TEST_DATA;
const std::string kRepo = ECM_REPO_DATA;

ecm::StreamSignature sig(int loads, int stores, int nt, int rw = 0) { return {loads, stores, nt, rw}; }

}  // namespace

TEST_CASE("builtin haswell parameters", "[machine]") {
  const auto m = ecm::builtin_haswell();
  CHECK(m.frequency_ghz == 2.3);
  CHECK(m.retire_width == 4);
  CHECK(m.store_uop_weight == 2);
  CHECK(m.bytes_per_cycle(ecm::BoundaryName::kL1L2) == 64);
  CHECK(m.bytes_per_cycle(ecm::BoundaryName::kL2L3) == 32);
  CHECK(m.numa.n_domains == 2);
  CHECK(m.numa.cores_per_domain == 7);
  CHECK(m.numa.cod_enabled);
  CHECK(ecm::validate(m).empty());
}

TEST_CASE("builtin bandwidth table", "[machine]") {
  const auto m = ecm::builtin_haswell();
  CHECK(ecm::lookup_bandwidth(m, sig(2, 0, 0)) == 32.4);
  CHECK(ecm::lookup_bandwidth(m, sig(1, 1, 0)) == 26.3);
  CHECK(ecm::lookup_bandwidth(m, sig(1, 1, 0, 1)) == 23.6);
  CHECK(ecm::lookup_bandwidth(m, sig(3, 1, 0)) == 27.8);
  CHECK(ecm::lookup_bandwidth(m, sig(2, 1, 0)) == 27.1);
  CHECK(ecm::lookup_bandwidth(m, sig(9, 9, 9)) == m.memory.default_bandwidth_gbs);
  CHECK_FALSE(ecm::has_bandwidth_entry(m, sig(2, 0, 1)));
}

TEST_CASE("chip bandwidth scales the per-domain value", "[machine]") {
  auto m = ecm::builtin_haswell();
  CHECK(ecm::chip_bandwidth(m, sig(2, 0, 0)) == Catch::Approx(64.8));
  m.memory.noncod_derating = 0.9;
  CHECK(ecm::chip_bandwidth(m, sig(2, 0, 0)) == Catch::Approx(58.32));
  m.memory.chip_table.push_back({sig(2, 0, 0), 60.0});
  CHECK(ecm::chip_bandwidth(m, sig(2, 0, 0)) == 60.0);
  CHECK(ecm::mode_bandwidth(m, sig(2, 0, 0), ecm::NumaMode::kCod) == 32.4);
}

TEST_CASE("machine validation rejects broken invariants", "[machine]") {
  using ecm::InvariantError;
  auto base = ecm::builtin_haswell();
  auto m = base;
  m.frequency_ghz = 0;
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.retire_width = 0;
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.store_uop_weight = 0;
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.store_uop_weight = 5;
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.ports[1].id = 0;
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.ports[0].capabilities.clear();
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.boundaries.pop_back();
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.boundaries.push_back(m.boundaries.front());
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.boundaries[1].bytes_per_cycle = 48;
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.memory.table[0].gbs = 0;
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.memory.default_bandwidth_gbs = -1;
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
  m = base;
  m.numa.cores_per_domain = 0;
  CHECK_THROWS_AS(ecm::validate(m), InvariantError);
}

TEST_CASE("boundary widths that divide or are multiples of a line are accepted", "[machine]") {
  auto m = ecm::builtin_haswell();
  for (int w : {1, 2, 16, 64, 128}) {
    m.boundaries[1].bytes_per_cycle = w;
    CHECK_NOTHROW(ecm::validate(m));
  }
}

TEST_CASE("machine without a store unit validates with a warning", "[machine]") {
  auto m = ecm::builtin_haswell();
  std::erase_if(m.ports, [](const ecm::PortSpec& p) { return p.id == 4; });
  const auto warnings = ecm::validate(m);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("store-data") != std::string::npos);
}

TEST_CASE("shipped machine file equals the builtin", "[machine]") {
  CHECK(ecm::load_machine(kRepo + "/machines/haswell.json") == ecm::builtin_haswell());
}

TEST_CASE("machine JSON round-trips field for field", "[machine]") {
  auto m = ecm::builtin_haswell();
  m.memory.chip_table.push_back({sig(2, 0, 0), 61.5});
  m.memory.noncod_derating = 0.95;
  const auto again = ecm::machine_from_json(nlohmann::json::parse(ecm::machine_to_json(m).dump()));
  CHECK(again == m);
}

TEST_CASE("zero-width boundary is a schema error naming the boundary", "[machine]") {
  try {
    ecm::load_machine(kData + "/bytes_per_cycle_zero.json");
    FAIL("expected a schema error");
  } catch (const ecm::SchemaError& e) {
    CHECK(std::string(e.what()).find("CacheBoundary") != std::string::npos);
  }
}

TEST_CASE("machine without a bandwidth table falls back everywhere", "[machine]") {
  const auto m = ecm::load_machine(kData + "/no_bandwidth_table.json");
  CHECK(m.memory.table.empty());
  for (const auto& s : {sig(2, 0, 0), sig(1, 1, 0), sig(0, 0, 0), sig(9, 9, 9)}) {
    CHECK(ecm::lookup_bandwidth(m, s) == 27.1);
  }
}

TEST_CASE("machine loading errors", "[machine]") {
  CHECK_THROWS_AS(ecm::load_machine(kData + "/does_not_exist.json"), ecm::IoError);
  auto doc = ecm::machine_to_json(ecm::builtin_haswell());
  doc["frequency"] = 1;
  CHECK_THROWS_AS(ecm::machine_from_json(doc), ecm::SchemaError);
  doc = ecm::machine_to_json(ecm::builtin_haswell());
  doc["ports"][0]["capabilities"][0] = "teleport";
  CHECK_THROWS_AS(ecm::machine_from_json(doc), ecm::SchemaError);
  doc = ecm::machine_to_json(ecm::builtin_haswell());
  doc.erase("retire_width");
  CHECK_THROWS_AS(ecm::machine_from_json(doc), ecm::SchemaError);
  doc = ecm::machine_to_json(ecm::builtin_haswell());
  doc["retire_width"] = 0;
  CHECK_THROWS_AS(ecm::machine_from_json(doc), ecm::InvariantError);

  const auto bad = std::filesystem::temp_directory_path() / "ecm_not_json.json";
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_AS(ecm::load_machine(bad), ecm::SchemaError);
  std::filesystem::remove(bad);
}

TEST_CASE("every looked-up bandwidth is positive", "[machine]") {
  const auto m = ecm::builtin_haswell();
  for (int l = 0; l < 4; ++l) {
    for (int s = 0; s < 3; ++s) {
      for (int n = 0; n < 2; ++n) CHECK(ecm::lookup_bandwidth(m, sig(l, s, n)) > 0);
    }
  }
}
