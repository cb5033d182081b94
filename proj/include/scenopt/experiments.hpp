#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "scenopt/bounds.hpp"
#include "scenopt/lp.hpp"
#include "scenopt/scenario.hpp"

namespace scenopt {

/// Seeded stream on std::mt19937_64 with portable conversions to doubles, so
/// a seed yields the same samples on every conforming platform.
class RandomSource {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/splitmix64-substreams";

  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::string algorithm() const { return kAlgorithm; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Laplace(mean, scale) by inverse CDF; variance is 2 scale^2.
  double laplace(double mean, double scale);

  /// Independent stream for item `index`, derived only from (seed, index).
  RandomSource substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// A law for scenarios plus the deterministic part of the program.
class ScenarioFamily {
 public:
  virtual ~ScenarioFamily() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual LinearProgram base() const = 0;
  virtual Scenario draw(Label label, RandomSource& rng) const = 0;
  /// Closed-form violation probability of x, when one is known.
  virtual std::optional<double> exact_violation(std::span<const double> x) const;

  /// m i.i.d. scenarios labeled 1..m in draw order.
  ScenarioProgram sample(std::size_t m, RandomSource& rng) const;
};

/// min x over [0, 1] subject to x >= delta_i, delta_i ~ U[0, 1].
class AnalyticFamily final : public ScenarioFamily {
 public:
  std::string name() const override { return "analytic"; }
  std::size_t dimension() const override { return 1; }
  LinearProgram base() const override;
  Scenario draw(Label label, RandomSource& rng) const override;
  std::optional<double> exact_violation(std::span<const double> x) const override;
};

/// min -sum x over x >= 0 subject to A(delta_i) x <= b, A = 0.04 B with B
/// entries i.i.d. Laplace(mean 1, variance 3).
class ResourceFamily final : public ScenarioFamily {
 public:
  static constexpr double kEntryScale = 0.04;
  static constexpr double kLaplaceMean = 1.0;
  static constexpr double kLaplaceVariance = 3.0;

  ResourceFamily(std::size_t d, std::size_t n, std::vector<double> b = {});

  std::string name() const override { return "resource"; }
  std::size_t dimension() const override { return d_; }
  std::size_t rows_per_scenario() const { return n_; }
  const std::vector<double>& resources() const { return b_; }
  LinearProgram base() const override;
  Scenario draw(Label label, RandomSource& rng) const override;

 private:
  std::size_t d_;
  std::size_t n_;
  std::vector<double> b_;
};

ScenarioProgram gen_analytic(std::size_t m, RandomSource& rng);
ScenarioProgram gen_resource(std::size_t d, std::size_t n, std::size_t m, RandomSource& rng);

/// True when some row of the block exceeds its right-hand side by more than tol_feas.
bool violates(const Scenario& scenario, std::span<const double> x, double tol_feas);

struct ViolationEstimate {
  double point = 0.0;
  std::size_t n_samples = 0;
  double half_width_95 = 0.0;
};

double half_width_95(double p, std::size_t n);

ViolationEstimate estimate_violation(const ScenarioFamily& family, std::span<const double> x,
                                     std::size_t n_samples, RandomSource& rng,
                                     const Tolerances& tol = {});

enum class Scheme { Cascade, Greedy };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct OuterMcConfig {
  std::size_t m = 0;
  /// Scenarios removed; the cascade uses ell = removed / d.
  std::size_t removed = 0;
  Scheme scheme = Scheme::Cascade;
  CascadeMode mode = CascadeMode::Regularized;
  double epsilon = 0.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  /// Fresh scenarios per trial when the family has no closed-form violation.
  std::size_t inner_samples = 10000;
  unsigned jobs = 1;
  Tolerances tol;
};

struct TrialRecord {
  std::uint64_t seed = 0;  ///< substream seed of this trial
  std::size_t trial = 0;
  double final_objective = 0.0;
  double violation = 0.0;
  double inner_half_width = 0.0;  ///< 0 when the violation is exact
  bool exceed = false;
  bool excluded = false;  ///< the trial hit AssumptionViolated
};

struct OuterProbabilityEstimate {
  double epsilon = 0.0;
  std::size_t trials = 0;  ///< trials counted (excluded ones left out)
  std::size_t exceed_count = 0;
  std::size_t excluded = 0;
  double point = 0.0;
  /// Binomial half-width, widened by the fraction of trials whose inner
  /// interval straddles epsilon.
  double half_width_95 = 0.0;
  double straddle_fraction = 0.0;
  std::vector<TrialRecord> records;
};

inline constexpr double kMaxExcludedFraction = 0.01;

/// Estimates P^m{ violation(x*) > epsilon } over independent trials. Trial i
/// uses RandomSource(seed).substream(i), so results do not depend on `jobs`.
/// Throws ScenarioError when more than 1% of trials are excluded.
OuterProbabilityEstimate outer_probability_mc(const ScenarioFamily& family,
                                              const OuterMcConfig& config);

struct CostComparison {
  std::size_t cascade_removed = 0;
  std::size_t greedy_removed = 0;
  double cascade_objective = 0.0;
  double greedy_objective = 0.0;
  /// 100 (f_cascade - f_greedy) / f_greedy; positive when the cascade is
  /// cheaper on a negative-valued cost.
  double relative_improvement = 0.0;
  SolveCounts cascade_counts;
  SolveCounts greedy_counts;
  std::size_t cascade_ell = 0;
};

double relative_improvement(double cascade_objective, double greedy_objective);

/// Cascade with ell = r/d and greedy with r removals on the same scenarios.
CostComparison compare_cost(const ScenarioProgram& program, std::size_t r,
                            CascadeMode mode = CascadeMode::Regularized,
                            const Tolerances& tol = {});

struct SizedComparison {
  double epsilon = 0.0;
  double beta = 0.0;
  RemovalCount cascade_count;  ///< sizing from the cascade bound
  RemovalCount cg11_count;     ///< sizing from the Cg11 bound
  CostComparison cost;
};

/// For each epsilon: the cascade removes cascade_count.batched scenarios, the
/// greedy baseline removes cg11_count.strict. One cascade and one greedy run
/// at the largest sizes are shared across the grid.
std::vector<SizedComparison> sized_comparison(const ScenarioProgram& program,
                                              const std::vector<double>& epsilons, double beta,
                                              CascadeMode mode = CascadeMode::Regularized,
                                              const Tolerances& tol = {});

struct SolverCallCount {
  std::size_t cascade_stage_solves = 0;
  std::size_t cascade_support_solves = 0;
  std::size_t greedy_raw = 0;    ///< every LP solved by greedy_removal
  std::size_t greedy_published = 0;  ///< (r+1) winner solves + r*d candidate solves
};

SolverCallCount solver_call_count(const CostComparison& comparison, std::size_t d);

/// Greedy count under the published convention: 1 + r (d + 1).
std::size_t greedy_solves_published_convention(std::size_t r, std::size_t d);

}  // namespace scenopt
