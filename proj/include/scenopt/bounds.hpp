#pragma once

#include <cstddef>
#include <string>

namespace scenopt {

/// Violation-probability bounds for scenario programs with discarded scenarios.
///
/// All of them reduce to the binomial tail
///   B(m, k; eps) = sum_{i=0}^{k} C(m,i) eps^i (1-eps)^(m-i).
///
///   Cg11        C(r+d-1, r) * B(m, r+d-1)   removal with violated discards
///   Cascade     B(m, r+d-1)                 batched cascade, r = ell*d
///   Compression B(m, zeta-1)                unique compression of size zeta
///   AnalyticToy B(m, r)                     exact law of the uniform 1-D example
enum class BoundFormula { Cg11, Compression, Cascade, AnalyticToy };

std::string to_string(BoundFormula f);
BoundFormula bound_formula_from_string(const std::string& s);

struct BoundQuery {
  std::size_t m = 0;
  std::size_t d = 1;
  std::size_t r = 0;  ///< removed count; for Compression the size is r + d
  double epsilon = 0.0;
};

struct BoundValue {
  double value = 0.0;  ///< clamped to [0, 1]
  double raw = 0.0;    ///< unclamped expression (Cg11 may exceed 1)
  BoundFormula formula = BoundFormula::Cascade;
};

/// B(m, k_max; eps), summed term by term from log-space binomial
/// probabilities (saddle-point form with Stirling corrections) using
/// compensated summation. Requires k_max < m and eps in [0, 1].
double binom_tail(std::size_t m, std::size_t k_max, double epsilon);

/// C(n, k) in double precision; exact while the value stays below 2^53.
double binomial_coefficient(std::size_t n, std::size_t k);

BoundValue bound_cg11(const BoundQuery& q);
BoundValue bound_cascade(const BoundQuery& q);
BoundValue bound_compression(std::size_t m, std::size_t zeta, double epsilon);
double analytic_violation_cdf(std::size_t m, std::size_t r, double epsilon);

/// Dispatches on formula. AnalyticToy requires d == 1.
BoundValue evaluate_bound(BoundFormula formula, const BoundQuery& q);

/// Same expressions with r real, via the regularized incomplete beta
/// continuation of the tail in its index (and gamma functions for the Cg11
/// factor). Agrees with evaluate_bound at integer r.
double continuous_bound(BoundFormula formula, std::size_t m, std::size_t d, double r,
                        double epsilon);

struct EpsilonInversion {
  double epsilon = 0.0;
  /// bound(eps -> 0+) already met beta, so 0 is returned.
  bool at_boundary = false;
};

inline constexpr double kInversionTolerance = 1e-9;

/// Smallest eps (bisection to kInversionTolerance) with bound(m,d,r,eps) <= beta.
EpsilonInversion invert_epsilon(std::size_t m, std::size_t d, std::size_t r, double beta,
                                BoundFormula formula);

struct RemovalCount {
  /// Continuous root of bound(r) = beta, rounded to the nearest integer.
  std::size_t reported = 0;
  /// Largest integer r with bound(r) <= beta.
  std::size_t strict = 0;
  /// strict rounded down to a multiple of d.
  std::size_t batched = 0;
  /// False when even r = 0 exceeds beta.
  bool feasible = false;
};

RemovalCount removal_counts(std::size_t m, std::size_t d, double epsilon, double beta,
                            BoundFormula formula);

/// The reported count, or the batch-rounded one when `batch` is set.
std::size_t max_removable(std::size_t m, std::size_t d, double epsilon, double beta,
                          BoundFormula formula, bool batch);

}  // namespace scenopt
