#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scenopt {

/// Numerical tolerances shared by the solver and everything built on it.
struct Tolerances {
  double feas = 1e-7;    ///< row/bound satisfaction
  double active = 1e-6;  ///< |a.x - b| below this marks a row active
  double x = 1e-6;       ///< infinity-norm threshold for "same minimizer"
};

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the simplex cannot finish (iteration limit, singular basis).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bound {
  double lower = -kInf;
  double upper = kInf;
};

/// One affine constraint a.x <= b.
struct Row {
  std::vector<double> a;
  double b = 0.0;
};

/// minimize cost.x subject to rows and per-variable bounds.
///
/// Coefficients and right-hand sides must be finite. Bounds may be infinite
/// (free or half-bounded variables) but never NaN, and lower <= upper.
class LinearProgram {
 public:
  LinearProgram(std::vector<double> cost, std::vector<Bound> bounds,
                std::vector<Row> rows = {});

  void add_row(std::span<const double> a, double b);
  void add_row(const Row& row) { add_row(row.a, row.b); }

  std::size_t dimension() const { return cost_.size(); }
  std::size_t row_count() const { return rhs_.size(); }

  std::span<const double> cost() const { return cost_; }
  std::span<const Bound> bounds() const { return bounds_; }
  std::span<const double> row(std::size_t i) const {
    return {coeffs_.data() + i * dimension(), dimension()};
  }
  double rhs(std::size_t i) const { return rhs_[i]; }

 private:
  std::vector<double> cost_;
  std::vector<Bound> bounds_;
  std::vector<double> coeffs_;  // row-major, row_count x dimension
  std::vector<double> rhs_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<std::size_t> active_rows;
  std::size_t iterations = 0;
  /// False only when the optimal face is unbounded along a tie-break
  /// coordinate, so the lexicographic minimum does not exist.
  bool tie_break_complete = true;
};

/// Solves the program with a dense two-phase primal simplex (Bland's rule).
///
/// Among all minimizers of cost.x the lexicographically smallest point is
/// returned (minimize x_1, then x_2, ... over the optimal face), so the
/// result depends only on the feasible set and never on row order.
LpSolution solve(const LinearProgram& lp, const Tolerances& tol = {});

bool check_feasible(const LinearProgram& lp, std::span<const double> x,
                    const Tolerances& tol = {});

/// Infinity-norm distance; both spans must have equal length.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace scenopt
