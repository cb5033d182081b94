#include "scenopt/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace scenopt {

namespace {

bool finite(double v) { return std::isfinite(v); }

constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kRatioTie = 1e-12;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Dense system g_k.x <= h_k in n dimensions.
struct System {
  std::size_t n = 0;
  std::vector<double> g;
  std::vector<double> h;
  std::vector<double> scale;  // l1 norm of each normal

  explicit System(std::size_t dim) : n(dim) {}

  std::size_t size() const { return h.size(); }
  std::span<const double> normal(std::size_t k) const {
    return {g.data() + k * n, n};
  }
  std::size_t add(std::span<const double> normal, double rhs) {
    g.insert(g.end(), normal.begin(), normal.end());
    h.push_back(rhs);
    double s = 0.0;
    for (double v : normal) s += std::abs(v);
    scale.push_back(std::max(s, 1e-300));
    return h.size() - 1;
  }
};

// A working-set member: either a constraint held at equality, or a
// pseudo-constraint pinning a free coordinate at `value`.
struct Slot {
  bool pseudo = false;
  std::size_t index = 0;  // constraint index, or coordinate when pseudo
  double value = 0.0;
};

enum class Outcome { Optimal, Unbounded, TieBreakUnbounded };

Eigen::MatrixXd basis_matrix(const System& sys, const std::vector<Slot>& w) {
  const auto n = static_cast<Eigen::Index>(sys.n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Slot& s = w[static_cast<std::size_t>(r)];
    if (s.pseudo) {
      b(r, static_cast<Eigen::Index>(s.index)) = 1.0;
    } else {
      auto g = sys.normal(s.index);
      for (Eigen::Index c = 0; c < n; ++c) b(r, c) = g[static_cast<std::size_t>(c)];
    }
  }
  return b;
}

Eigen::MatrixXd basis_inverse(const System& sys, const std::vector<Slot>& w) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix(sys, w));
  if (!lu.isInvertible()) throw SolverError("simplex basis became singular");
  return lu.inverse();
}

// Primal simplex on the inequality form: the working set holds n linearly
// independent constraints at equality (the nonbasic slacks). Pricing compares
// multiplier vectors lexicographically across `objectives`, which is the
// simplex on the objective c + eta e_1 + eta^2 e_2 + ... for infinitesimal
// eta. Entering and leaving choices follow Bland's smallest-index rule.
class ActiveSetSimplex {
 public:
  ActiveSetSimplex(const System& sys, std::vector<Slot> working,
                   std::vector<std::vector<double>> objectives)
      : sys_(sys),
        working_(std::move(working)),
        objectives_(std::move(objectives)),
        in_working_(sys.size(), 0) {
    for (const Slot& s : working_)
      if (!s.pseudo) in_working_[s.index] = 1;
  }

  Outcome run(std::size_t max_iterations) {
    const std::size_t n = sys_.n;
    for (iterations_ = 0; iterations_ < max_iterations; ++iterations_) {
      refresh();

      // Lexicographic multipliers: lambda = -B^{-T} q for every objective q.
      std::vector<Eigen::VectorXd> lambdas;
      std::vector<double> qtol;
      for (const auto& q : objectives_) {
        Eigen::Map<const Eigen::VectorXd> qv(q.data(), static_cast<Eigen::Index>(n));
        lambdas.push_back(-(inverse_.transpose() * qv));
        qtol.push_back(kDualTol * std::max(1.0, qv.cwiseAbs().maxCoeff()));
      }
      auto first_nonzero = [&](std::size_t r) -> double {
        for (std::size_t l = 0; l < lambdas.size(); ++l) {
          double v = lambdas[l](static_cast<Eigen::Index>(r));
          if (std::abs(v) > qtol[l]) return v;
        }
        return 0.0;
      };

      std::size_t enter = kNone;
      double sigma = 0.0;
      for (std::size_t r = 0; r < n && enter == kNone; ++r) {
        if (!working_[r].pseudo) continue;
        double v = first_nonzero(r);
        if (v != 0.0) {
          enter = r;
          sigma = v > 0.0 ? 1.0 : -1.0;
        }
      }
      if (enter == kNone) {
        std::size_t best_index = kNone;
        for (std::size_t r = 0; r < n; ++r) {
          if (working_[r].pseudo) continue;
          if (first_nonzero(r) < 0.0 && working_[r].index < best_index) {
            best_index = working_[r].index;
            enter = r;
          }
        }
        sigma = -1.0;
      }
      if (enter == kNone) return Outcome::Optimal;

      Eigen::VectorXd p = sigma * inverse_.col(static_cast<Eigen::Index>(enter));
      std::span<const double> ps(p.data(), n);
      const double pnorm = p.cwiseAbs().maxCoeff();

      std::size_t leave = kNone;
      double best_t = kInf;
      for (std::size_t k = 0; k < sys_.size(); ++k) {
        if (in_working_[k]) continue;
        auto g = sys_.normal(k);
        double gp = dot(g, ps);
        if (gp <= kPivotTol * sys_.scale[k] * pnorm) continue;
        double slack = std::max(0.0, sys_.h[k] - dot(g, x_));
        double t = slack / gp;
        // Ascending scan keeps the smallest index among (near-)ties.
        if (leave == kNone || t < best_t - kRatioTie * (1.0 + best_t)) {
          best_t = t;
          leave = k;
        }
      }
      if (leave == kNone) {
        double primary = dot(objectives_.front(), ps);
        double tol0 = kDualTol * std::max(1.0, pnorm);
        return primary < -tol0 ? Outcome::Unbounded : Outcome::TieBreakUnbounded;
      }

      Slot& s = working_[enter];
      if (!s.pseudo) in_working_[s.index] = 0;
      s = Slot{false, leave, 0.0};
      in_working_[leave] = 1;
    }
    throw SolverError("simplex iteration limit reached");
  }

  // Rebuilds the basis inverse and the vertex defined by the working set.
  void refresh() {
    const std::size_t n = sys_.n;
    inverse_ = basis_inverse(sys_, working_);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      const Slot& s = working_[r];
      rhs(static_cast<Eigen::Index>(r)) = s.pseudo ? s.value : sys_.h[s.index];
    }
    Eigen::VectorXd xv = inverse_ * rhs;
    x_.assign(xv.data(), xv.data() + n);
  }

  const std::vector<double>& x() const { return x_; }
  const std::vector<Slot>& working() const { return working_; }
  std::size_t iterations() const { return iterations_; }

 private:
  const System& sys_;
  std::vector<Slot> working_;
  std::vector<std::vector<double>> objectives_;
  std::vector<char> in_working_;
  Eigen::MatrixXd inverse_;
  std::vector<double> x_;
  std::size_t iterations_ = 0;
};

std::vector<double> unit(std::size_t n, std::size_t j) {
  std::vector<double> e(n, 0.0);
  e[j] = 1.0;
  return e;
}

}  // namespace

LinearProgram::LinearProgram(std::vector<double> cost, std::vector<Bound> bounds,
                             std::vector<Row> rows)
    : cost_(std::move(cost)), bounds_(std::move(bounds)) {
  if (cost_.empty()) throw InvalidInput("linear program needs dimension >= 1");
  if (bounds_.size() != cost_.size())
    throw InvalidInput("bounds length does not match cost length");
  for (double c : cost_)
    if (!finite(c)) throw InvalidInput("cost coefficients must be finite");
  for (const Bound& b : bounds_) {
    if (std::isnan(b.lower) || std::isnan(b.upper))
      throw InvalidInput("bounds must not be NaN");
    if (b.lower == kInf || b.upper == -kInf || b.lower > b.upper)
      throw InvalidInput("each lower bound must not exceed its upper bound");
  }
  for (const Row& r : rows) add_row(r);
}

void LinearProgram::add_row(std::span<const double> a, double b) {
  if (a.size() != dimension()) throw InvalidInput("row length does not match dimension");
  for (double v : a)
    if (!finite(v)) throw InvalidInput("row coefficients must be finite");
  if (!finite(b)) throw InvalidInput("row right-hand side must be finite");
  coeffs_.insert(coeffs_.end(), a.begin(), a.end());
  rhs_.push_back(b);
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

LpSolution solve(const LinearProgram& lp, const Tolerances& tol) {
  const std::size_t d = lp.dimension();
  const std::size_t rows = lp.row_count();
  auto bounds = lp.bounds();

  // Phase-2 system: finite bounds first, then rows.
  System sys(d);
  std::vector<Slot> start(d);
  std::vector<double> x0(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    std::optional<std::size_t> lo, hi;
    std::vector<double> e = unit(d, j);
    if (std::isfinite(bounds[j].lower)) {
      std::vector<double> ne = e;
      ne[j] = -1.0;
      lo = sys.add(ne, -bounds[j].lower);
    }
    if (std::isfinite(bounds[j].upper)) hi = sys.add(e, bounds[j].upper);
    if (lo) {
      start[j] = Slot{false, *lo, 0.0};
      x0[j] = bounds[j].lower;
    } else if (hi) {
      start[j] = Slot{false, *hi, 0.0};
      x0[j] = bounds[j].upper;
    } else {
      start[j] = Slot{true, j, 0.0};
    }
  }
  const std::size_t row_offset = sys.size();
  for (std::size_t i = 0; i < rows; ++i) sys.add(lp.row(i), lp.rhs(i));

  const std::size_t max_iter = 50 * (sys.size() + d) + 1000;
  std::size_t iterations = 0;

  std::size_t worst = kNone;
  double worst_violation = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double v = dot(lp.row(i), x0) - lp.rhs(i);
    if (v > worst_violation) {
      worst_violation = v;
      worst = i;
    }
  }

  std::vector<Slot> working = start;
  if (worst != kNone) {
    // Phase 1: minimize t subject to rows a.x - t <= b, original bounds, t >= 0.
    System aux(d + 1);
    std::vector<double> g(d + 1);
    for (std::size_t k = 0; k < row_offset; ++k) {
      auto n = sys.normal(k);
      std::copy(n.begin(), n.end(), g.begin());
      g[d] = 0.0;
      aux.add(g, sys.h[k]);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      auto a = lp.row(i);
      std::copy(a.begin(), a.end(), g.begin());
      g[d] = -1.0;
      aux.add(g, lp.rhs(i));
    }
    std::fill(g.begin(), g.end(), 0.0);
    g[d] = -1.0;
    const std::size_t t_index = aux.add(g, 0.0);

    std::vector<Slot> w1 = start;
    w1.push_back(Slot{false, row_offset + worst, 0.0});
    ActiveSetSimplex phase1(aux, std::move(w1), {unit(d + 1, d)});
    phase1.run(max_iter);
    iterations += phase1.iterations();
    phase1.refresh();
    if (phase1.x()[d] > tol.feas) {
      LpSolution out;
      out.status = LpStatus::Infeasible;
      out.iterations = iterations;
      return out;
    }

    std::vector<Slot> w = phase1.working();
    bool has_t = std::any_of(w.begin(), w.end(), [&](const Slot& s) {
      return !s.pseudo && s.index == t_index;
    });
    if (!has_t) {
      // Degenerate finish: pivot t >= 0 into the working set in place of the
      // member with the largest coefficient in its representation.
      Eigen::MatrixXd inv = basis_inverse(aux, w);
      Eigen::Map<const Eigen::VectorXd> nt(aux.normal(t_index).data(),
                                           static_cast<Eigen::Index>(d + 1));
      Eigen::VectorXd y = inv.transpose() * nt;
      Eigen::Index r = 0;
      y.cwiseAbs().maxCoeff(&r);
      w[static_cast<std::size_t>(r)] = Slot{false, t_index, 0.0};
    }
    working.clear();
    for (const Slot& s : w)
      if (s.pseudo || s.index != t_index) working.push_back(s);
  }

  std::vector<std::vector<double>> objectives;
  objectives.emplace_back(lp.cost().begin(), lp.cost().end());
  for (std::size_t j = 0; j < d; ++j) objectives.push_back(unit(d, j));

  std::vector<double> cost = objectives.front();
  ActiveSetSimplex phase2(sys, std::move(working), std::move(objectives));
  Outcome outcome = phase2.run(max_iter);
  iterations += phase2.iterations();
  phase2.refresh();
  std::vector<double> x = phase2.x();

  if (outcome == Outcome::TieBreakUnbounded) {
    // No lexicographic minimum; the cost itself may still be unbounded along
    // another edge, so finish on the cost alone.
    ActiveSetSimplex primary(sys, phase2.working(), {cost});
    Outcome settled = primary.run(max_iter);
    iterations += primary.iterations();
    if (settled == Outcome::Unbounded) outcome = settled;
    primary.refresh();
    x = primary.x();
  }

  LpSolution out;
  out.iterations = iterations;
  if (outcome == Outcome::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.tie_break_complete = outcome == Outcome::Optimal;
  out.x = std::move(x);
  out.objective = dot(lp.cost(), out.x);
  for (std::size_t i = 0; i < rows; ++i)
    if (std::abs(dot(lp.row(i), out.x) - lp.rhs(i)) <= tol.active) out.active_rows.push_back(i);
  return out;
}

bool check_feasible(const LinearProgram& lp, std::span<const double> x, const Tolerances& tol) {
  if (x.size() != lp.dimension()) throw InvalidInput("point dimension does not match program");
  auto bounds = lp.bounds();
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= bounds[j].lower - tol.feas && x[j] <= bounds[j].upper + tol.feas)) return false;
  }
  for (std::size_t i = 0; i < lp.row_count(); ++i)
    if (!(dot(lp.row(i), x) <= lp.rhs(i) + tol.feas)) return false;
  return true;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("vector lengths differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace scenopt
