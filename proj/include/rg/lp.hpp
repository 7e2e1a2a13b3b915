#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rg/rational.hpp"

namespace rg {

enum class Sense { LE, EQ, GE };

enum class PivotRule {
  // Largest reduced cost, switching to Bland's rule for good after a run of degenerate pivots.
  DantzigThenBland,
  Bland,
};

struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, Rational>> coeffs;
    Sense sense = Sense::LE;
    Rational rhs;
  };

  bool maximize = true;
  std::vector<Rational> objective;
  std::vector<bool> free_var;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int add_var(const Rational& cost = 0, bool free = false);
  int add_row(std::vector<std::pair<int, Rational>> coeffs, Sense sense, const Rational& rhs);
  void validate() const;
  // Plain-text dump in CPLEX LP syntax, for external cross-checks only.
  std::string to_lp_format() const;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Rational objective;
  std::vector<Rational> primal;
  // Optimal dual, one entry per row. For a maximization: LE rows >= 0, GE rows <= 0,
  // and sum_r a_rv y_r >= c_v for every nonnegative variable (= for free ones).
  std::vector<Rational> dual;
  // When infeasible: y with sum_r a_rv y_r >= 0 (= 0 for free variables), LE rows >= 0,
  // GE rows <= 0 and b.y < 0.
  std::vector<Rational> farkas;
  int pivots = 0;
};

struct LPOptions {
  PivotRule rule = PivotRule::DantzigThenBland;
  int degenerate_limit = 50;
};

// Exact two-phase primal simplex. Every optimum is returned with a dual solution whose
// objective equals the primal one; certificates are re-checked before returning.
LPResult solve_lp(const LinearProgram& lp, const LPOptions& options = {});

// Exact checks of the certificates carried by a result.
bool verify_optimality(const LinearProgram& lp, const LPResult& result);
bool verify_farkas(const LinearProgram& lp, const std::vector<Rational>& y);

}  // namespace rg
