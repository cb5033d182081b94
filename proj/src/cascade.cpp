#include <algorithm>
#include <cmath>

#include "scenopt/scenario.hpp"

namespace scenopt {

namespace {

// `exact_fit` admits m == (ell+1)d, the size of a compression candidate.
CascadeTrace cascade(const ScenarioProgram& program, std::size_t ell, CascadeMode mode,
                     const Tolerances& tol, bool exact_fit) {
  const std::size_t d = program.dimension();
  const std::size_t m = program.size();
  const std::size_t needed = (ell + 1) * d;
  if (exact_fit ? m < needed : m <= needed) {
    throw InsufficientScenarios("cascade with ell=" + std::to_string(ell) + " in dimension " +
                                std::to_string(d) + " needs more than " +
                                std::to_string(needed) + " scenarios, got " +
                                std::to_string(m));
  }

  CascadeTrace trace;
  trace.mode = mode;
  trace.ell = ell;
  LabelSet available = program.labels();

  for (std::size_t k = 0; k <= ell; ++k) {
    StageSolution solved = solve_stage_detailed(program, available, tol);
    ++trace.counts.stage;
    if (solved.lp.status != LpStatus::Optimal) throw StageSolveFailed(k, solved.lp.status);

    StageRecord rec;
    rec.k = k;
    rec.minimizer = solved.lp.x;
    rec.objective = solved.lp.objective;
    const std::size_t support_before = trace.counts.support;
    try {
      rec.support = support_set(program, available, solved, tol, &trace.counts);
    } catch (const StageSolveFailed& e) {
      throw StageSolveFailed(k, e.status);
    }
    rec.support_solves = trace.counts.support - support_before;
    if (rec.support.size() > d) throw DegeneracyDetected(k, rec.support.size(), d);
    if (mode == CascadeMode::FullySupported && rec.support.size() != d)
      throw AssumptionViolated(k, rec.support.size(), d);
    if (mode == CascadeMode::Regularized)
      rec.padding = padding_set(available, rec.support, d - rec.support.size());

    LpSolution reduced = solve_stage(program, rec.support, tol);
    ++trace.counts.nondegeneracy;
    rec.degenerate = reduced.status != LpStatus::Optimal ||
                     max_abs_diff(reduced.x, rec.minimizer) > tol.x;

    rec.removed = rec.support;
    rec.removed.insert(rec.padding.begin(), rec.padding.end());
    trace.compression_candidate.insert(rec.removed.begin(), rec.removed.end());
    if (k < ell)
      for (Label l : rec.removed) available.erase(l);
    trace.stages.push_back(std::move(rec));
  }

  trace.final_x = trace.stages.back().minimizer;
  trace.final_objective = trace.stages.back().objective;
  return trace;
}

}  // namespace

LabelSet CascadeTrace::discarded() const {
  LabelSet out;
  for (std::size_t k = 0; k < ell && k < stages.size(); ++k)
    out.insert(stages[k].removed.begin(), stages[k].removed.end());
  return out;
}

CascadeTrace run_cascade(const ScenarioProgram& program, std::size_t ell, CascadeMode mode,
                         const Tolerances& tol) {
  return cascade(program, ell, mode, tol, false);
}

bool verify_compression(const ScenarioProgram& program, const CascadeTrace& trace,
                        const LabelSet& candidate, const Tolerances& tol) {
  CascadeTrace rerun = cascade(program.restricted_to(candidate), trace.ell, trace.mode, tol, true);
  if (rerun.stages.size() != trace.stages.size()) return false;
  for (std::size_t k = 0; k < trace.stages.size(); ++k) {
    const StageRecord& a = trace.stages[k];
    const StageRecord& b = rerun.stages[k];
    if (max_abs_diff(a.minimizer, b.minimizer) > tol.x) return false;
    if (trace.mode == CascadeMode::Regularized && a.padding != b.padding) return false;
  }
  return true;
}

bool verify_compression(const ScenarioProgram& program, const CascadeTrace& trace,
                        const Tolerances& tol) {
  return verify_compression(program, trace, trace.compression_candidate, tol);
}

GreedyTrace greedy_removal(const ScenarioProgram& program, std::size_t r, const Tolerances& tol) {
  const std::size_t d = program.dimension();
  if (r + d >= program.size())
    throw InsufficientScenarios("greedy removal needs r < m - d");

  GreedyTrace trace;
  LabelSet active = program.labels();
  StageSolution current = solve_stage_detailed(program, active, tol);
  ++trace.counts.stage;
  if (current.lp.status != LpStatus::Optimal) throw StageSolveFailed(0, current.lp.status);
  trace.initial_objective = current.lp.objective;
  trace.initial_x = current.lp.x;

  for (std::size_t step = 1; step <= r; ++step) {
    LabelSet candidates;
    for (std::size_t row : current.lp.active_rows) candidates.insert(current.row_owner[row]);

    // Each leave-one-out solve doubles as the support test and the cost probe.
    bool found = false;
    Label best_label = 0;
    StageSolution best;
    std::size_t evaluated = 0;
    for (Label c : candidates) {
      LabelSet reduced = active;
      reduced.erase(c);
      StageSolution s = solve_stage_detailed(program, reduced, tol);
      ++evaluated;
      if (s.lp.status != LpStatus::Optimal) throw StageSolveFailed(step, s.lp.status);
      if (max_abs_diff(s.lp.x, current.lp.x) <= tol.x) continue;  // not of support
      double gap = 1e-12 * (1.0 + std::abs(s.lp.objective));
      if (!found || s.lp.objective < best.lp.objective - gap) {
        found = true;
        best_label = c;
        best = std::move(s);
      }
    }

    GreedyStep rec;
    rec.candidates = evaluated;
    if (found) {
      active.erase(best_label);
      current = std::move(best);
      ++trace.counts.stage;
      trace.counts.support += evaluated - 1;
      rec.removed = best_label;
    } else {
      // No support scenario: any removal leaves the minimizer in place.
      trace.counts.support += evaluated;
      rec.support_removed = false;
      rec.removed = *active.begin();
      active.erase(active.begin());
      current = solve_stage_detailed(program, active, tol);
      ++trace.counts.stage;
    }
    rec.objective = current.lp.objective;
    rec.x = current.lp.x;
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace scenopt
