#include "scenopt/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace scenopt {

namespace {

double bound_value(const Json& v, double infinite) {
  if (v.is_null()) return infinite;
  if (!v.is_number()) throw InvalidInput("bound entries must be numbers or null");
  return v.get<double>();
}

Json bound_to_json(double v) { return std::isinf(v) ? Json(nullptr) : Json(v); }

std::vector<double> numbers(const Json& v, const char* what) {
  if (!v.is_array()) throw InvalidInput(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const Json& e : v) {
    if (!e.is_number()) throw InvalidInput(std::string(what) + " must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Json labels(const LabelSet& s) {
  Json out = Json::array();
  for (Label l : s) out.push_back(l);
  return out;
}

}  // namespace

ScenarioProgram program_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("program must be a JSON object");
  if (!j.contains("cost")) throw InvalidInput("program is missing \"cost\"");
  std::vector<double> cost = numbers(j.at("cost"), "cost");
  if (j.contains("d") && j.at("d").get<std::size_t>() != cost.size())
    throw InvalidInput("\"d\" does not match the cost length");

  std::vector<Bound> bounds(cost.size());
  if (j.contains("bounds")) {
    const Json& b = j.at("bounds");
    if (!b.is_array() || b.size() != cost.size())
      throw InvalidInput("\"bounds\" must hold one [lo, hi] pair per variable");
    for (std::size_t i = 0; i < cost.size(); ++i) {
      if (!b[i].is_array() || b[i].size() != 2) throw InvalidInput("bounds entries are [lo, hi]");
      bounds[i] = {bound_value(b[i][0], -kInf), bound_value(b[i][1], kInf)};
    }
  }

  if (!j.contains("scenarios") || !j.at("scenarios").is_array())
    throw InvalidInput("program is missing the \"scenarios\" array");
  std::vector<Scenario> scenarios;
  for (const Json& s : j.at("scenarios")) {
    if (!s.is_object() || !s.contains("label") || !s.contains("rows"))
      throw InvalidInput("scenarios need \"label\" and \"rows\"");
    const Json& label = s.at("label");
    if (!label.is_number_integer() || (!label.is_number_unsigned() && label.get<std::int64_t>() < 0))
      throw InvalidInput("labels are non-negative integers");
    Scenario sc{s.at("label").get<Label>(), {}};
    if (!s.at("rows").is_array()) throw InvalidInput("\"rows\" must be an array");
    for (const Json& r : s.at("rows")) {
      if (!r.is_object() || !r.contains("a") || !r.contains("b") || !r.at("b").is_number())
        throw InvalidInput("rows are {\"a\": [..], \"b\": number}");
      sc.rows.push_back(Row{numbers(r.at("a"), "a"), r.at("b").get<double>()});
    }
    scenarios.push_back(std::move(sc));
  }
  return ScenarioProgram(LinearProgram(std::move(cost), std::move(bounds)), std::move(scenarios));
}

Json program_to_json(const ScenarioProgram& program) {
  Json j;
  j["d"] = program.dimension();
  auto cost = program.base().cost();
  j["cost"] = std::vector<double>(cost.begin(), cost.end());
  Json bounds = Json::array();
  for (const Bound& b : program.base().bounds())
    bounds.push_back(Json::array({bound_to_json(b.lower), bound_to_json(b.upper)}));
  j["bounds"] = bounds;
  Json scenarios = Json::array();
  for (const Scenario& s : program.scenarios()) {
    Json rows = Json::array();
    for (const Row& r : s.rows) rows.push_back({{"a", r.a}, {"b", r.b}});
    scenarios.push_back({{"label", s.label}, {"rows", rows}});
  }
  j["scenarios"] = scenarios;
  return j;
}

ScenarioProgram load_program(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidInput("malformed JSON in " + path.string() + ": " + e.what());
  }
  try {
    return program_from_json(j);
  } catch (const Json::exception& e) {
    throw InvalidInput("bad program in " + path.string() + ": " + e.what());
  }
}

Json to_json(const Tolerances& tol) {
  return {{"feas", tol.feas}, {"active", tol.active}, {"x", tol.x}};
}

Json to_json(const SolveCounts& c) {
  return {{"stage", c.stage},
          {"support", c.support},
          {"nondegeneracy", c.nondegeneracy},
          {"total", c.total()}};
}

Json to_json(const CascadeTrace& trace) {
  Json stages = Json::array();
  for (const StageRecord& s : trace.stages) {
    stages.push_back({{"k", s.k},
                      {"minimizer", s.minimizer},
                      {"objective", s.objective},
                      {"support", labels(s.support)},
                      {"padding", labels(s.padding)},
                      {"removed", labels(s.removed)},
                      {"degenerate", s.degenerate}});
  }
  return {{"mode", to_string(trace.mode)},
          {"ell", trace.ell},
          {"stages", stages},
          {"final_x", trace.final_x},
          {"final_objective", trace.final_objective},
          {"discarded", labels(trace.discarded())},
          {"compression_candidate", labels(trace.compression_candidate)},
          {"solves", to_json(trace.counts)}};
}

Json to_json(const GreedyTrace& trace) {
  Json steps = Json::array();
  for (const GreedyStep& s : trace.steps) {
    steps.push_back({{"removed", s.removed},
                     {"objective", s.objective},
                     {"x", s.x},
                     {"candidates", s.candidates},
                     {"support_removed", s.support_removed}});
  }
  return {{"initial_objective", trace.initial_objective},
          {"initial_x", trace.initial_x},
          {"steps", steps},
          {"final_objective", trace.final_objective()},
          {"final_x", trace.final_x()},
          {"solves", to_json(trace.counts)}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (const auto& [key, value] : provenance) out << "# " << key << ": " << value << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace scenopt
