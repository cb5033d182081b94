#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenopt/lp.hpp"

namespace scenopt {

using Label = std::uint64_t;
/// Ordered label set; iteration follows the linear order on scenarios.
using LabelSet = std::set<Label>;

/// One sampled realization: the affine rows A(delta) x <= b it contributes.
struct Scenario {
  Label label = 0;
  std::vector<Row> rows;
};

/// Cost and domain (a row-free base program) plus labeled scenario blocks.
class ScenarioProgram {
 public:
  ScenarioProgram(LinearProgram base, std::vector<Scenario> scenarios);

  std::size_t dimension() const { return base_.dimension(); }
  std::size_t size() const { return scenarios_.size(); }
  const LinearProgram& base() const { return base_; }
  const std::vector<Scenario>& scenarios() const { return scenarios_; }
  const Scenario& scenario(Label label) const;
  bool contains(Label label) const { return index_.count(label) != 0; }
  LabelSet labels() const;

  /// Same base, restricted to the given labels (labels are kept).
  ScenarioProgram restricted_to(const LabelSet& labels) const;

 private:
  LinearProgram base_;
  std::vector<Scenario> scenarios_;
  std::map<Label, std::size_t> index_;
};

/// Tally of LP solves, split by purpose.
struct SolveCounts {
  std::size_t stage = 0;          ///< one per program instance in the scheme
  std::size_t support = 0;        ///< leave-one-out re-solves for support detection
  std::size_t nondegeneracy = 0;  ///< support-only re-solves
  std::size_t total() const { return stage + support + nondegeneracy; }
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully-supported mode met a stage whose support size differs from d.
class AssumptionViolated : public ScenarioError {
 public:
  AssumptionViolated(std::size_t stage, std::size_t support_size, std::size_t d);
  std::size_t stage;
};

/// More than d support scenarios were detected at a stage.
class DegeneracyDetected : public ScenarioError {
 public:
  DegeneracyDetected(std::size_t stage, std::size_t support_size, std::size_t d);
  std::size_t stage;
};

class InsufficientScenarios : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

/// A stage program (or a required re-solve) was infeasible or unbounded.
class StageSolveFailed : public ScenarioError {
 public:
  StageSolveFailed(std::size_t stage, LpStatus status);
  std::size_t stage;
  LpStatus status;
};

/// Solution of a stage program plus the owning label of every assembled row.
struct StageSolution {
  LpSolution lp;
  std::vector<Label> row_owner;
};

StageSolution solve_stage_detailed(const ScenarioProgram& program, const LabelSet& active,
                                   const Tolerances& tol = {});

LpSolution solve_stage(const ScenarioProgram& program, const LabelSet& active,
                       const Tolerances& tol = {});

/// Scenarios whose removal moves the minimizer by more than tol.x.
///
/// Only scenarios owning an active row at the minimizer are re-solved; an
/// inactive scenario cannot be of support. A removal that makes the program
/// unbounded counts as a change of minimizer.
LabelSet support_set(const ScenarioProgram& program, const LabelSet& active,
                     const StageSolution& solved, const Tolerances& tol = {},
                     SolveCounts* counts = nullptr);
LabelSet support_set(const ScenarioProgram& program, const LabelSet& active,
                     const Tolerances& tol = {});

bool is_nondegenerate(const ScenarioProgram& program, const LabelSet& active,
                      const Tolerances& tol = {});

/// The `nu` smallest labels of available \ support.
LabelSet padding_set(const LabelSet& available, const LabelSet& support, std::size_t nu);

enum class CascadeMode { FullySupported, Regularized };

std::string to_string(CascadeMode mode);
CascadeMode cascade_mode_from_string(const std::string& s);

struct StageRecord {
  std::size_t k = 0;
  std::vector<double> minimizer;
  double objective = 0.0;
  LabelSet support;
  LabelSet padding;
  /// support and padding; at the final stage this set is recorded but kept.
  LabelSet removed;
  bool degenerate = false;
  std::size_t support_solves = 0;
};

struct CascadeTrace {
  CascadeMode mode = CascadeMode::Regularized;
  std::size_t ell = 0;
  std::vector<StageRecord> stages;
  std::vector<double> final_x;
  double final_objective = 0.0;
  LabelSet compression_candidate;
  SolveCounts counts;

  /// Labels actually discarded (stages 0..ell-1).
  LabelSet discarded() const;
};

/// Solves the cascade of ell+1 programs, discarding d scenarios per stage.
///
/// Requires (ell+1)*d < m. In FullySupported mode each stage must have exactly
/// d support scenarios; Regularized mode pads smaller supports with the
/// smallest remaining labels.
CascadeTrace run_cascade(const ScenarioProgram& program, std::size_t ell, CascadeMode mode,
                         const Tolerances& tol = {});

/// Reruns the cascade on `candidate` only and compares every stage
/// minimizer (and, when regularized, every padding set) with `trace`.
bool verify_compression(const ScenarioProgram& program, const CascadeTrace& trace,
                        const LabelSet& candidate, const Tolerances& tol = {});
bool verify_compression(const ScenarioProgram& program, const CascadeTrace& trace,
                        const Tolerances& tol = {});

struct GreedyStep {
  Label removed = 0;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t candidates = 0;  ///< leave-one-out solves at this step
  /// False when no support scenario existed and the smallest label was dropped.
  bool support_removed = true;
};

struct GreedyTrace {
  double initial_objective = 0.0;
  std::vector<double> initial_x;
  std::vector<GreedyStep> steps;
  SolveCounts counts;

  double final_objective() const {
    return steps.empty() ? initial_objective : steps.back().objective;
  }
  const std::vector<double>& final_x() const {
    return steps.empty() ? initial_x : steps.back().x;
  }
};

/// Removes r scenarios one at a time, each time the support scenario whose
/// removal gives the lowest objective (ties: smallest label).
GreedyTrace greedy_removal(const ScenarioProgram& program, std::size_t r,
                           const Tolerances& tol = {});

}  // namespace scenopt
