#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. None of them calls the library's simplex or tail code.

#include <gmpxx.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "scenopt/lp.hpp"
#include "scenopt/scenario.hpp"

namespace oracle {

using scenopt::Label;
using scenopt::LabelSet;
using scenopt::LinearProgram;

// ---------------------------------------------------------------------------
// Linear programs by vertex enumeration.

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

/// Box added around variables with an infinite bound; an optimum on it means
/// the program is unbounded (instances keep optima far below this).
inline constexpr double kArtificialBox = 1e6;

/// Optimal value, then lexicographically smallest minimizer, over all basic
/// feasible points. Exponential; meant for d <= 4 and a few dozen rows.
inline Result lexmin(const LinearProgram& lp, double tol = 1e-9, double box = kArtificialBox) {
  const std::size_t d = lp.dimension();
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<bool> artificial;
  auto add = [&](std::vector<double> a, double rhs, bool art) {
    A.push_back(std::move(a));
    b.push_back(rhs);
    artificial.push_back(art);
  };
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> e(d, 0.0);
    const scenopt::Bound bd = lp.bounds()[j];
    e[j] = -1.0;
    const bool lo_inf = std::isinf(bd.lower);
    add(e, lo_inf ? box : -bd.lower, lo_inf);
    e[j] = 1.0;
    const bool hi_inf = std::isinf(bd.upper);
    add(e, hi_inf ? box : bd.upper, hi_inf);
  }
  for (std::size_t i = 0; i < lp.row_count(); ++i) {
    auto r = lp.row(i);
    add(std::vector<double>(r.begin(), r.end()), lp.rhs(i), false);
  }
  const std::size_t K = A.size();

  Result best;
  std::vector<std::size_t> pick(d);
  for (std::size_t i = 0; i < d; ++i) pick[i] = i;
  auto feasible = [&](const Eigen::VectorXd& x) {
    for (std::size_t k = 0; k < K; ++k) {
      double lhs = 0.0, scale = std::abs(b[k]);
      for (std::size_t j = 0; j < d; ++j) {
        lhs += A[k][j] * x[j];
        scale += std::abs(A[k][j] * x[j]);
      }
      if (lhs - b[k] > tol * (1.0 + scale)) return false;
    }
    return true;
  };
  auto better = [&](const std::vector<double>& x, double f) {
    if (best.status != Status::Optimal) return true;
    double gap = tol * (1.0 + std::abs(best.objective));
    if (f < best.objective - gap) return true;
    if (f > best.objective + gap) return false;
    for (std::size_t j = 0; j < d; ++j) {
      if (x[j] < best.x[j] - tol * (1.0 + std::abs(x[j]))) return true;
      if (x[j] > best.x[j] + tol * (1.0 + std::abs(x[j]))) return false;
    }
    return false;
  };

  while (true) {
    Eigen::MatrixXd M(d, d);
    Eigen::VectorXd h(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) M(i, j) = A[pick[i]][j];
      h[i] = b[pick[i]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.rank() == static_cast<Eigen::Index>(d)) {
      Eigen::VectorXd x = lu.solve(h);
      if (feasible(x)) {
        std::vector<double> xv(x.data(), x.data() + d);
        double f = 0.0;
        for (std::size_t j = 0; j < d; ++j) f += lp.cost()[j] * xv[j];
        if (better(xv, f)) {
          best.status = Status::Optimal;
          best.x = xv;
          best.objective = f;
        }
      }
    }
    // next combination
    std::size_t i = d;
    while (i > 0 && pick[i - 1] == K - d + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < d; ++j) pick[j] = pick[j - 1] + 1;
  }

  if (best.status == Status::Optimal) {
    for (std::size_t k = 0; k < K; ++k) {
      if (!artificial[k]) continue;
      double lhs = 0.0;
      for (std::size_t j = 0; j < d; ++j) lhs += A[k][j] * best.x[j];
      if (std::abs(lhs - b[k]) <= 1e-6 * box) {
        best.status = Status::Unbounded;
        break;
      }
    }
  }
  return best;
}

/// True when min cost.x is unbounded: the optimal value keeps moving as the
/// artificial box grows.
inline bool cost_unbounded(const LinearProgram& lp) {
  Result a = lexmin(lp, 1e-9, kArtificialBox);
  Result b = lexmin(lp, 1e-9, 2 * kArtificialBox);
  if (a.status == Status::Infeasible) return false;
  return std::abs(a.objective - b.objective) > 1e-6 * (1.0 + std::abs(a.objective));
}

inline LinearProgram assemble(const scenopt::ScenarioProgram& p, const LabelSet& active) {
  LinearProgram lp = p.base();
  for (Label l : active)
    for (const scenopt::Row& r : p.scenario(l).rows) lp.add_row(r);
  return lp;
}

/// Support by definition: every active scenario is removed in turn and the
/// reduced program re-solved by enumeration.
inline LabelSet support(const scenopt::ScenarioProgram& p, const LabelSet& active,
                        double tol_x = 1e-6) {
  Result full = lexmin(assemble(p, active));
  LabelSet out;
  for (Label l : active) {
    LabelSet reduced = active;
    reduced.erase(l);
    Result r = lexmin(assemble(p, reduced));
    if (r.status != Status::Optimal) {
      out.insert(l);
      continue;
    }
    double diff = 0.0;
    for (std::size_t j = 0; j < full.x.size(); ++j)
      diff = std::max(diff, std::abs(r.x[j] - full.x[j]));
    if (diff > tol_x) out.insert(l);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact binomial tails.

/// tails[k] = sum_{i<=k} C(m,i) e^i (1-e)^(m-i), computed in exact rational
/// arithmetic from the binary value of e, then rounded to double.
inline std::vector<mpq_class> exact_tails(std::size_t m, double e, std::size_t k_max) {
  const mpq_class eps(e);
  const mpq_class q = mpq_class(1) - eps;
  std::vector<mpq_class> out;
  mpq_class term(1);
  for (std::size_t i = 0; i < m; ++i) term *= q;  // i = 0 term
  mpq_class sum = 0;
  for (std::size_t i = 0; i <= k_max && i <= m; ++i) {
    if (i > 0) {
      if (q == 0) {
        term = (i == m) ? mpq_class(1) : mpq_class(0);
      } else {
        term *= static_cast<unsigned long>(m - i + 1);
        term /= static_cast<unsigned long>(i);
        term *= eps;
        term /= q;
      }
    }
    sum += term;
    sum.canonicalize();
    out.push_back(sum);
  }
  return out;
}

inline mpz_class exact_choose(std::size_t n, std::size_t k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

inline double to_double(const mpq_class& q) {
  mpf_class f(q, 256);
  return f.get_d();
}

// ---------------------------------------------------------------------------
// Hand-rolled generators for property tests.

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53);
  }
  long integer(long lo, long hi) {
    return lo + static_cast<long>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin() { return (eng_() >> 63) != 0; }
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

/// Box-bounded LP; integer data (many ties and degenerate vertices) or
/// continuous data.
inline LinearProgram random_box_lp(Gen& g, std::size_t d, std::size_t rows, bool integer) {
  std::vector<double> c(d);
  std::vector<scenopt::Bound> bounds(d);
  for (std::size_t j = 0; j < d; ++j) {
    c[j] = integer ? static_cast<double>(g.integer(-2, 2)) : g.uniform(-1, 1);
    double lo = integer ? static_cast<double>(g.integer(-3, 0)) : g.uniform(-2, 0);
    double hi = integer ? static_cast<double>(g.integer(1, 3)) : g.uniform(0.5, 2);
    bounds[j] = {lo, hi};
  }
  LinearProgram lp(c, bounds);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> a(d);
    for (double& v : a) v = integer ? static_cast<double>(g.integer(-3, 3)) : g.uniform(-1, 1);
    double b = integer ? static_cast<double>(g.integer(-2, 3)) : g.uniform(-0.5, 1);
    lp.add_row(a, b);
  }
  return lp;
}

/// Scenario program on a box with `per` rows per scenario; continuous data.
inline scenopt::ScenarioProgram random_box_program(Gen& g, std::size_t d, std::size_t m,
                                                   std::size_t per, bool integer = false) {
  std::vector<double> c(d);
  for (double& v : c) v = integer ? static_cast<double>(g.integer(-2, 2)) : g.uniform(-1, 1);
  LinearProgram base(c, std::vector<scenopt::Bound>(d, scenopt::Bound{-2.0, 2.0}));
  std::vector<scenopt::Scenario> sc;
  for (std::size_t i = 1; i <= m; ++i) {
    scenopt::Scenario s{i, {}};
    for (std::size_t k = 0; k < per; ++k) {
      std::vector<double> a(d);
      for (double& v : a) v = integer ? static_cast<double>(g.integer(-2, 2)) : g.uniform(-1, 1);
      double b = integer ? static_cast<double>(g.integer(0, 2)) : g.uniform(0.0, 1.0);
      s.rows.push_back({a, b});
    }
    sc.push_back(std::move(s));
  }
  return scenopt::ScenarioProgram(base, std::move(sc));
}

}  // namespace oracle
