#include "scenopt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace scenopt {

std::optional<double> ScenarioFamily::exact_violation(std::span<const double>) const {
  return std::nullopt;
}

ScenarioProgram ScenarioFamily::sample(std::size_t m, RandomSource& rng) const {
  std::vector<Scenario> scenarios;
  scenarios.reserve(m);
  for (std::size_t i = 1; i <= m; ++i) scenarios.push_back(draw(i, rng));
  return ScenarioProgram(base(), std::move(scenarios));
}

LinearProgram AnalyticFamily::base() const {
  return LinearProgram({1.0}, {Bound{0.0, 1.0}});
}

Scenario AnalyticFamily::draw(Label label, RandomSource& rng) const {
  return Scenario{label, {Row{{-1.0}, -rng.uniform()}}};
}

std::optional<double> AnalyticFamily::exact_violation(std::span<const double> x) const {
  return std::clamp(1.0 - x[0], 0.0, 1.0);
}

ResourceFamily::ResourceFamily(std::size_t d, std::size_t n, std::vector<double> b)
    : d_(d), n_(n), b_(std::move(b)) {
  if (d_ < 1 || n_ < 1) throw InvalidInput("resource family needs d >= 1 and n >= 1");
  if (b_.empty()) b_.assign(n_, 1.0);
  if (b_.size() != n_) throw InvalidInput("resource vector must have n entries");
  for (double v : b_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("resources must be finite and >= 0");
}

LinearProgram ResourceFamily::base() const {
  return LinearProgram(std::vector<double>(d_, -1.0), std::vector<Bound>(d_, Bound{0.0, kInf}));
}

Scenario ResourceFamily::draw(Label label, RandomSource& rng) const {
  static const double scale = std::sqrt(kLaplaceVariance / 2.0);
  Scenario s{label, {}};
  s.rows.reserve(n_);
  for (std::size_t p = 0; p < n_; ++p) {
    Row row{std::vector<double>(d_), b_[p]};
    for (double& a : row.a) a = kEntryScale * rng.laplace(kLaplaceMean, scale);
    s.rows.push_back(std::move(row));
  }
  return s;
}

ScenarioProgram gen_analytic(std::size_t m, RandomSource& rng) {
  if (m < 2) throw InvalidInput("analytic generator needs m >= 2");
  return AnalyticFamily().sample(m, rng);
}

ScenarioProgram gen_resource(std::size_t d, std::size_t n, std::size_t m, RandomSource& rng) {
  if (m < 1) throw InvalidInput("resource generator needs m >= 1");
  return ResourceFamily(d, n).sample(m, rng);
}

bool violates(const Scenario& scenario, std::span<const double> x, double tol_feas) {
  for (const Row& r : scenario.rows) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += r.a[j] * x[j];
    if (lhs - r.b > tol_feas) return true;
  }
  return false;
}

double half_width_95(double p, std::size_t n) {
  return n == 0 ? 0.0 : 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

ViolationEstimate estimate_violation(const ScenarioFamily& family, std::span<const double> x,
                                     std::size_t n_samples, RandomSource& rng,
                                     const Tolerances& tol) {
  if (n_samples == 0) throw InvalidInput("violation estimate needs n_samples >= 1");
  if (x.size() != family.dimension()) throw InvalidInput("point has the wrong dimension");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_samples; ++i)
    if (violates(family.draw(i, rng), x, tol.feas)) ++hits;
  double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  return {p, n_samples, half_width_95(p, n_samples)};
}

std::string to_string(Scheme s) { return s == Scheme::Cascade ? "cascade" : "greedy"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "cascade") return Scheme::Cascade;
  if (s == "greedy") return Scheme::Greedy;
  throw InvalidInput("unknown scheme '" + s + "'");
}

namespace {

TrialRecord run_trial(const ScenarioFamily& family, const OuterMcConfig& cfg, std::size_t i) {
  RandomSource rng = RandomSource(cfg.seed).substream(i);
  TrialRecord rec;
  rec.seed = rng.seed();
  rec.trial = i;
  ScenarioProgram program = family.sample(cfg.m, rng);

  std::vector<double> x;
  try {
    if (cfg.scheme == Scheme::Cascade) {
      CascadeTrace t = run_cascade(program, cfg.removed / family.dimension(), cfg.mode, cfg.tol);
      x = t.final_x;
      rec.final_objective = t.final_objective;
    } else {
      GreedyTrace t = greedy_removal(program, cfg.removed, cfg.tol);
      x = t.final_x();
      rec.final_objective = t.final_objective();
    }
  } catch (const AssumptionViolated&) {
    rec.excluded = true;
    return rec;
  }

  if (auto exact = family.exact_violation(x)) {
    rec.violation = *exact;
  } else {
    ViolationEstimate e = estimate_violation(family, x, cfg.inner_samples, rng, cfg.tol);
    rec.violation = e.point;
    rec.inner_half_width = e.half_width_95;
  }
  rec.exceed = rec.violation > cfg.epsilon;
  return rec;
}

}  // namespace

OuterProbabilityEstimate outer_probability_mc(const ScenarioFamily& family,
                                              const OuterMcConfig& cfg) {
  if (cfg.trials == 0) throw InvalidInput("outer Monte Carlo needs trials >= 1");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) throw InvalidInput("epsilon must lie in [0, 1]");
  const std::size_t d = family.dimension();
  if (cfg.scheme == Scheme::Cascade && cfg.removed % d != 0)
    throw InvalidInput("cascade removals must be a multiple of d");
  if (cfg.removed + d >= cfg.m) throw InvalidInput("need removed + d < m");

  std::vector<TrialRecord> records(cfg.trials);
  std::vector<std::exception_ptr> errors(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.trials; i = next++) {
      try {
        records[i] = run_trial(family, cfg, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, cfg.trials));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  OuterProbabilityEstimate out;
  out.epsilon = cfg.epsilon;
  std::size_t straddling = 0;
  for (const TrialRecord& r : records) {
    if (r.excluded) {
      ++out.excluded;
      continue;
    }
    ++out.trials;
    if (r.exceed) ++out.exceed_count;
    if (r.inner_half_width > 0.0 && std::abs(r.violation - cfg.epsilon) <= r.inner_half_width)
      ++straddling;
  }
  if (static_cast<double>(out.excluded) > kMaxExcludedFraction * static_cast<double>(cfg.trials))
    throw ScenarioError(std::to_string(out.excluded) + " of " + std::to_string(cfg.trials) +
                        " trials violated the fully-supported assumption (limit 1%)");
  if (out.trials > 0) {
    const double n = static_cast<double>(out.trials);
    out.point = static_cast<double>(out.exceed_count) / n;
    out.straddle_fraction = static_cast<double>(straddling) / n;
    out.half_width_95 = half_width_95(out.point, out.trials) + out.straddle_fraction;
  }
  out.records = std::move(records);
  return out;
}

double relative_improvement(double cascade_objective, double greedy_objective) {
  if (cascade_objective == greedy_objective) return 0.0;
  return 100.0 * (cascade_objective - greedy_objective) / greedy_objective;
}

namespace {

CostComparison from_prefixes(const CascadeTrace& cascade, std::size_t ell,
                             const GreedyTrace& greedy, std::size_t r, std::size_t d) {
  CostComparison c;
  c.cascade_ell = ell;
  c.cascade_removed = ell * d;
  c.cascade_objective = cascade.stages[ell].objective;
  c.cascade_counts.stage = ell + 1;
  for (std::size_t k = 0; k <= ell; ++k) {
    c.cascade_counts.support += cascade.stages[k].support_solves;
    ++c.cascade_counts.nondegeneracy;
  }

  c.greedy_removed = r;
  c.greedy_objective = r == 0 ? greedy.initial_objective : greedy.steps[r - 1].objective;
  c.greedy_counts.stage = r + 1;
  for (std::size_t s = 0; s < r; ++s) {
    const GreedyStep& step = greedy.steps[s];
    c.greedy_counts.support += step.support_removed ? step.candidates - 1 : step.candidates;
  }
  c.relative_improvement = relative_improvement(c.cascade_objective, c.greedy_objective);
  return c;
}

}  // namespace

CostComparison compare_cost(const ScenarioProgram& program, std::size_t r, CascadeMode mode,
                            const Tolerances& tol) {
  const std::size_t d = program.dimension();
  if (r % d != 0) throw InvalidInput("cascade arm needs r to be a multiple of d");
  CascadeTrace cascade = run_cascade(program, r / d, mode, tol);
  GreedyTrace greedy = greedy_removal(program, r, tol);
  return from_prefixes(cascade, r / d, greedy, r, d);
}

std::vector<SizedComparison> sized_comparison(const ScenarioProgram& program,
                                              const std::vector<double>& epsilons, double beta,
                                              CascadeMode mode, const Tolerances& tol) {
  const std::size_t m = program.size();
  const std::size_t d = program.dimension();
  std::vector<SizedComparison> rows;
  std::size_t max_ell = 0, max_r = 0;
  for (double eps : epsilons) {
    SizedComparison row;
    row.epsilon = eps;
    row.beta = beta;
    row.cascade_count = removal_counts(m, d, eps, beta, BoundFormula::Cascade);
    row.cg11_count = removal_counts(m, d, eps, beta, BoundFormula::Cg11);
    max_ell = std::max(max_ell, row.cascade_count.batched / d);
    max_r = std::max(max_r, row.cg11_count.strict);
    rows.push_back(row);
  }
  CascadeTrace cascade = run_cascade(program, max_ell, mode, tol);
  GreedyTrace greedy = greedy_removal(program, max_r, tol);
  for (SizedComparison& row : rows)
    row.cost = from_prefixes(cascade, row.cascade_count.batched / d, greedy, row.cg11_count.strict, d);
  return rows;
}

std::size_t greedy_solves_published_convention(std::size_t r, std::size_t d) {
  return 1 + r * (d + 1);
}

SolverCallCount solver_call_count(const CostComparison& c, std::size_t d) {
  SolverCallCount out;
  out.cascade_stage_solves = c.cascade_counts.stage;
  out.cascade_support_solves = c.cascade_counts.support;
  out.greedy_raw = c.greedy_counts.stage + c.greedy_counts.support;
  out.greedy_published = greedy_solves_published_convention(c.greedy_removed, d);
  return out;
}

}  // namespace scenopt
