#include "scenopt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scenopt {

namespace {
constexpr std::size_t kNoStage = std::numeric_limits<std::size_t>::max();

std::string count_message(const char* what, std::size_t stage, std::size_t support,
                          std::size_t d) {
  return std::string(what) + " at stage " + std::to_string(stage) + ": support size " +
         std::to_string(support) + ", dimension " + std::to_string(d);
}
}  // namespace

ScenarioProgram::ScenarioProgram(LinearProgram base, std::vector<Scenario> scenarios)
    : base_(std::move(base)), scenarios_(std::move(scenarios)) {
  if (base_.row_count() != 0)
    throw InvalidInput("base program must not carry scenario rows");
  for (std::size_t i = 0; i < scenarios_.size(); ++i) {
    const Scenario& s = scenarios_[i];
    if (s.rows.empty())
      throw InvalidInput("scenario " + std::to_string(s.label) + " has an empty block");
    for (const Row& r : s.rows) {
      if (r.a.size() != dimension())
        throw InvalidInput("scenario " + std::to_string(s.label) + ": row length mismatch");
      bool ok = std::isfinite(r.b);
      for (double v : r.a) ok = ok && std::isfinite(v);
      if (!ok) throw InvalidInput("scenario " + std::to_string(s.label) + ": non-finite row");
    }
    if (!index_.emplace(s.label, i).second)
      throw InvalidInput("duplicate scenario label " + std::to_string(s.label));
  }
}

const Scenario& ScenarioProgram::scenario(Label label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw InvalidInput("unknown scenario label " + std::to_string(label));
  return scenarios_[it->second];
}

LabelSet ScenarioProgram::labels() const {
  LabelSet out;
  for (const auto& [label, idx] : index_) out.insert(label);
  return out;
}

ScenarioProgram ScenarioProgram::restricted_to(const LabelSet& labels) const {
  std::vector<Scenario> kept;
  for (Label l : labels) scenario(l);  // validates membership
  for (const Scenario& s : scenarios_)
    if (labels.count(s.label)) kept.push_back(s);
  return ScenarioProgram(base_, std::move(kept));
}

AssumptionViolated::AssumptionViolated(std::size_t k, std::size_t support_size, std::size_t d)
    : ScenarioError(count_message("fully-supported assumption violated", k, support_size, d)),
      stage(k) {}

DegeneracyDetected::DegeneracyDetected(std::size_t k, std::size_t support_size, std::size_t d)
    : ScenarioError(count_message("degeneracy detected", k, support_size, d)), stage(k) {}

StageSolveFailed::StageSolveFailed(std::size_t k, LpStatus s)
    : ScenarioError("program " + to_string(s) +
                    (k == kNoStage ? std::string() : " at stage " + std::to_string(k))),
      stage(k),
      status(s) {}

StageSolution solve_stage_detailed(const ScenarioProgram& program, const LabelSet& active,
                                   const Tolerances& tol) {
  LinearProgram lp = program.base();
  StageSolution out;
  for (Label l : active) {
    for (const Row& r : program.scenario(l).rows) {
      lp.add_row(r);
      out.row_owner.push_back(l);
    }
  }
  out.lp = solve(lp, tol);
  return out;
}

LpSolution solve_stage(const ScenarioProgram& program, const LabelSet& active,
                       const Tolerances& tol) {
  return solve_stage_detailed(program, active, tol).lp;
}

LabelSet support_set(const ScenarioProgram& program, const LabelSet& active,
                     const StageSolution& solved, const Tolerances& tol, SolveCounts* counts) {
  if (solved.lp.status != LpStatus::Optimal) throw StageSolveFailed(kNoStage, solved.lp.status);
  LabelSet candidates;
  for (std::size_t row : solved.lp.active_rows) candidates.insert(solved.row_owner[row]);

  LabelSet support;
  for (Label c : candidates) {
    LabelSet reduced = active;
    reduced.erase(c);
    LpSolution s = solve_stage(program, reduced, tol);
    if (counts) ++counts->support;
    if (s.status == LpStatus::Unbounded) {
      support.insert(c);
    } else if (s.status != LpStatus::Optimal) {
      throw StageSolveFailed(kNoStage, s.status);
    } else if (max_abs_diff(s.x, solved.lp.x) > tol.x) {
      support.insert(c);
    }
  }
  return support;
}

LabelSet support_set(const ScenarioProgram& program, const LabelSet& active,
                     const Tolerances& tol) {
  return support_set(program, active, solve_stage_detailed(program, active, tol), tol);
}

bool is_nondegenerate(const ScenarioProgram& program, const LabelSet& active,
                      const Tolerances& tol) {
  StageSolution full = solve_stage_detailed(program, active, tol);
  LabelSet support = support_set(program, active, full, tol);
  LpSolution reduced = solve_stage(program, support, tol);
  return reduced.status == LpStatus::Optimal && max_abs_diff(reduced.x, full.lp.x) <= tol.x;
}

LabelSet padding_set(const LabelSet& available, const LabelSet& support, std::size_t nu) {
  LabelSet out;
  for (Label l : available) {
    if (out.size() == nu) break;
    if (!support.count(l)) out.insert(l);
  }
  if (out.size() < nu)
    throw InsufficientScenarios("not enough non-support scenarios left for padding");
  return out;
}

std::string to_string(CascadeMode mode) {
  return mode == CascadeMode::FullySupported ? "fully-supported" : "regularized";
}

CascadeMode cascade_mode_from_string(const std::string& s) {
  if (s == "fully-supported" || s == "fully_supported" || s == "full") return CascadeMode::FullySupported;
  if (s == "regularized" || s == "regularised") return CascadeMode::Regularized;
  throw InvalidInput("unknown cascade mode '" + s + "'");
}

}  // namespace scenopt
