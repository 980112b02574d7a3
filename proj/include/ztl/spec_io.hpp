#pragma once

#include "ztl/potential.hpp"
#include "ztl/renorm.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ztl {

// Input document: {"alphabet": [...], "r": 1, "phi": {"ab": "-5/3", ...}, "psi": {"ab": 0.1, ...}}.
// Words absent from phi are forbidden.
struct SystemSpec {
  std::vector<std::string> alphabet;
  int r = 1;
  std::map<std::string, std::string> phi;
  std::map<std::string, double> psi;

  bool operator==(const SystemSpec&) const = default;
};

SystemSpec parse_spec(std::string_view text);
SystemSpec load_spec(const std::filesystem::path& path);
nlohmann::json to_json(const SystemSpec& spec);
std::string serialize(const SystemSpec& spec);

// Splits a word key into symbol indices: one character per symbol when every
// symbol name is a single character, otherwise separated by '.', ',' or spaces.
Word split_word(const std::vector<std::string>& alphabet, std::string_view key);

System build_system(const SystemSpec& spec);

// Ladder, weights and limit measures; keys are sorted so dumps are byte-stable.
nlohmann::json limit_report(const ZeroTemperatureLimit& lim);

}  // namespace ztl
