#pragma once

#include "flambe/env_factory.hpp"
#include "flambe/mdp.hpp"
#include "flambe/policy.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace flambe {

using Json = nlohmann::json;

// Versioned JSON schemas. Doubles round-trip exactly (shortest-exact
// encoding), so serialize/deserialize/serialize is byte-stable.

Json mdp_to_json(const LowRankMDP& mdp);
LowRankMDP mdp_from_json(const Json& j);

Json policy_to_json(const Policy& policy);
PolicyPtr policy_from_json(const Json& j);

Json hypothesis_class_to_json(const HypothesisClass& cls);
HypothesisClass hypothesis_class_from_json(const Json& j);

Json phi_to_json(const PhiMap& phi);
PhiPtr phi_from_json(const Json& j);

void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

// FNV-1a hash of a string, hex-encoded; used to stamp resolved configs
// into result files.
std::string fnv1a_hex(const std::string& text);

/**
 * CSV emitter with a provenance comment block:
 *   # generated_at=<ISO8601>       (excluded from determinism contracts)
 *   # config_hash=<hex> seed=<n> version=<v>
 *   header,row
 * Numbers are written with exact round-trip precision.
 */
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
            std::uint64_t seed, bool timestamp = true);

  void header(const std::vector<std::string>& columns);

  CsvWriter& field(const std::string& value);
  CsvWriter& field(double value);
  CsvWriter& field(long value);
  CsvWriter& field(int value) { return field(static_cast<long>(value)); }
  void end_row();

  static std::string format_double(double value);

 private:
  std::ofstream out_;
  bool row_started_ = false;
};

}  // namespace flambe
