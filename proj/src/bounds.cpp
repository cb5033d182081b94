#include "scenopt/bounds.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "scenopt/lp.hpp"

namespace scenopt {

namespace {

// log(n!) - log(sqrt(2 pi n) (n/e)^n) for n = 0..15.
constexpr std::array<double, 16> kStirlingError = {
    0.0,
    0.08106146679532725822,
    0.041340695955409294094,
    0.027677925684998339149,
    0.020790672103765093112,
    0.016644691189821192163,
    0.013876128823070747999,
    0.011896709945891770095,
    0.010411265261972096497,
    0.0092554621827127329177,
    0.0083305634333628712565,
    0.007573675487951840795,
    0.0069428401072095298657,
    0.0064089941880042070684,
    0.0059513701127588477356,
    0.005554733551962801371,
};

double stirling_error(double n) {
  if (n <= 15.0) return kStirlingError[static_cast<std::size_t>(n)];
  constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680,
                   s4 = 1.0 / 1188;
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x/np) + np - x without cancellation near x = np.
double deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// log P{Binomial(n, p) = x}, 0 < p < 1.
double log_binomial_pmf(double x, double n, double p) {
  const double q = 1.0 - p;
  if (x == 0.0) return p < 0.1 ? -deviance(n, n * q) - n * p : n * std::log1p(-p);
  if (x == n) return q < 0.1 ? -deviance(n, n * p) - n * q : n * std::log(p);
  const double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x) -
                    deviance(x, n * p) - deviance(n - x, n * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in [0, 1]");
}

void check_query(const BoundQuery& q) {
  if (q.d < 1) throw InvalidInput("dimension d must be >= 1");
  if (q.m <= q.r + q.d) throw InvalidInput("bound requires m > r + d");
  check_epsilon(q.epsilon);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

__extension__ using Uint128 = unsigned __int128;

}  // namespace

std::string to_string(BoundFormula f) {
  switch (f) {
    case BoundFormula::Cg11: return "cg11";
    case BoundFormula::Compression: return "compression";
    case BoundFormula::Cascade: return "cascade";
    case BoundFormula::AnalyticToy: return "analytic";
  }
  return "unknown";
}

BoundFormula bound_formula_from_string(const std::string& s) {
  if (s == "cg11") return BoundFormula::Cg11;
  if (s == "compression") return BoundFormula::Compression;
  if (s == "cascade") return BoundFormula::Cascade;
  if (s == "analytic") return BoundFormula::AnalyticToy;
  throw InvalidInput("unknown bound formula '" + s + "'");
}

double binom_tail(std::size_t m, std::size_t k_max, double epsilon) {
  if (m == 0 || k_max >= m) throw InvalidInput("binomial tail requires 0 <= k_max < m");
  check_epsilon(epsilon);
  if (epsilon == 0.0) return 1.0;
  if (epsilon == 1.0) return 0.0;

  const double n = static_cast<double>(m);
  // Neumaier summation.
  double sum = 0.0, carry = 0.0;
  for (std::size_t i = 0; i <= k_max; ++i) {
    double lp = log_binomial_pmf(static_cast<double>(i), n, epsilon);
    if (lp < -745.0) continue;
    double term = std::exp(lp);
    double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return clamp01(sum + carry);
}

double binomial_coefficient(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  // Exact integer recurrence while the intermediate product fits.
  Uint128 exact = 1;
  const Uint128 limit = static_cast<Uint128>(1) << 100;
  std::size_t j = 1;
  for (; j <= k && exact < limit; ++j) exact = exact * (n - k + j) / j;
  double result = static_cast<double>(exact);
  for (; j <= k; ++j)
    result = result * static_cast<double>(n - k + j) / static_cast<double>(j);
  return result;
}

BoundValue bound_cascade(const BoundQuery& q) {
  check_query(q);
  double v = binom_tail(q.m, q.r + q.d - 1, q.epsilon);
  return {v, v, BoundFormula::Cascade};
}

BoundValue bound_cg11(const BoundQuery& q) {
  check_query(q);
  const double tail = binom_tail(q.m, q.r + q.d - 1, q.epsilon);
  const double factor = binomial_coefficient(q.r + q.d - 1, q.r);
  double raw = 0.0;
  if (std::isfinite(factor)) {
    raw = factor * tail;
  } else if (tail > 0.0) {
    double lfactor = std::lgamma(static_cast<double>(q.r + q.d)) -
                     std::lgamma(static_cast<double>(q.r + 1)) -
                     std::lgamma(static_cast<double>(q.d));
    raw = std::exp(lfactor + std::log(tail));
  }
  return {clamp01(raw), raw, BoundFormula::Cg11};
}

BoundValue bound_compression(std::size_t m, std::size_t zeta, double epsilon) {
  if (zeta < 1 || zeta >= m) throw InvalidInput("compression bound requires 1 <= zeta < m");
  double v = binom_tail(m, zeta - 1, epsilon);
  return {v, v, BoundFormula::Compression};
}

double analytic_violation_cdf(std::size_t m, std::size_t r, double epsilon) {
  if (r >= m) throw InvalidInput("analytic example requires r < m");
  return binom_tail(m, r, epsilon);
}

BoundValue evaluate_bound(BoundFormula formula, const BoundQuery& q) {
  switch (formula) {
    case BoundFormula::Cg11: return bound_cg11(q);
    case BoundFormula::Cascade: return bound_cascade(q);
    case BoundFormula::Compression: {
      check_query(q);
      BoundValue v = bound_compression(q.m, q.r + q.d, q.epsilon);
      return v;
    }
    case BoundFormula::AnalyticToy: {
      if (q.d != 1) throw InvalidInput("analytic example is one-dimensional (d = 1)");
      check_query(q);
      double v = analytic_violation_cdf(q.m, q.r, q.epsilon);
      return {v, v, BoundFormula::AnalyticToy};
    }
  }
  throw InvalidInput("unknown bound formula");
}

double continuous_bound(BoundFormula formula, std::size_t m, std::size_t d, double r,
                        double epsilon) {
  check_epsilon(epsilon);
  if (d < 1 || !(r >= 0.0)) throw InvalidInput("continuous bound requires d >= 1, r >= 0");
  const double k = r + static_cast<double>(d) - 1.0;
  const double n = static_cast<double>(m);
  if (!(k < n - 1.0 + 1e-12)) throw InvalidInput("continuous bound requires r + d < m");
  // sum_{i<=k} C(n,i) e^i (1-e)^(n-i) = I_{1-e}(n-k, k+1)
  double tail = boost::math::ibeta(n - k, k + 1.0, 1.0 - epsilon);
  if (formula != BoundFormula::Cg11) return tail;
  double lfactor = std::lgamma(r + static_cast<double>(d)) - std::lgamma(r + 1.0) -
                   std::lgamma(static_cast<double>(d));
  return tail > 0.0 ? std::exp(lfactor + std::log(tail)) : 0.0;
}

EpsilonInversion invert_epsilon(std::size_t m, std::size_t d, std::size_t r, double beta,
                                BoundFormula formula) {
  if (!(beta > 0.0)) throw InvalidInput("beta must be positive");
  auto bound_at = [&](double eps) { return evaluate_bound(formula, {m, d, r, eps}).raw; };
  if (bound_at(0.0) <= beta) return {0.0, true};
  double lo = 0.0, hi = 1.0;  // bound(lo) > beta >= bound(hi)
  while (hi - lo > kInversionTolerance) {
    double mid = 0.5 * (lo + hi);
    (bound_at(mid) <= beta ? hi : lo) = mid;
  }
  return {hi, false};
}

RemovalCount removal_counts(std::size_t m, std::size_t d, double epsilon, double beta,
                            BoundFormula formula) {
  if (d < 1 || m <= d + 0) throw InvalidInput("removal count requires m > d >= 1");
  if (!(beta > 0.0)) throw InvalidInput("beta must be positive");
  check_epsilon(epsilon);
  auto bound_at = [&](std::size_t r) { return evaluate_bound(formula, {m, d, r, epsilon}).raw; };

  RemovalCount out;
  if (m <= d + 1 || bound_at(0) > beta) return out;
  out.feasible = true;
  const std::size_t r_max = m - d - 1;
  std::size_t r = 0;
  while (r < r_max && bound_at(r + 1) <= beta) ++r;
  out.strict = r;
  out.batched = r / d * d;
  out.reported = r;
  if (r < r_max) {
    const double target = std::log(beta);
    double lo = static_cast<double>(r), hi = lo + 1.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      double v = continuous_bound(formula, m, d, mid, epsilon);
      (v > 0.0 && std::log(v) > target ? hi : lo) = mid;
    }
    if (0.5 * (lo + hi) - static_cast<double>(r) >= 0.5) out.reported = r + 1;
  }
  return out;
}

std::size_t max_removable(std::size_t m, std::size_t d, double epsilon, double beta,
                          BoundFormula formula, bool batch) {
  RemovalCount c = removal_counts(m, d, epsilon, beta, formula);
  return batch ? c.batched : c.reported;
}

}  // namespace scenopt
