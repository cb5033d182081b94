#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "scenopt/experiments.hpp"
#include "scenopt/scenario.hpp"

namespace scenopt {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Program file:
///   {"d": 2, "cost": [..], "bounds": [[lo, hi], ..],
///    "scenarios": [{"label": 1, "rows": [{"a": [..], "b": 0.5}, ..]}, ..]}
/// "bounds" is optional (free variables); a null bound entry means infinite.
ScenarioProgram program_from_json(const Json& j);
Json program_to_json(const ScenarioProgram& program);
ScenarioProgram load_program(const std::filesystem::path& path);

Json to_json(const Tolerances& tol);
Json to_json(const SolveCounts& counts);
Json to_json(const CascadeTrace& trace);
Json to_json(const GreedyTrace& trace);

/// 17 significant digits ("%.17g"), enough to round-trip a double.
std::string format_double(double v);

/// CSV with leading "# key: value" provenance lines.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace scenopt
