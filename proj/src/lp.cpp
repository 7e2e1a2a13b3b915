#include "rg/lp.hpp"

#include <sstream>
#include <stdexcept>

#include "rg/errors.hpp"

namespace rg {

int LinearProgram::add_var(const Rational& cost, bool free) {
  objective.push_back(cost);
  free_var.push_back(free);
  return num_vars() - 1;
}

int LinearProgram::add_row(std::vector<std::pair<int, Rational>> coeffs, Sense sense,
                           const Rational& rhs) {
  rows.push_back(Row{std::move(coeffs), sense, rhs});
  return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::validate() const {
  if (free_var.size() != objective.size()) throw ValidationError("LP: free flags size mismatch");
  for (const auto& row : rows) {
    for (const auto& [v, a] : row.coeffs) {
      if (v < 0 || v >= num_vars()) throw ValidationError("LP: coefficient on unknown variable");
    }
  }
}

std::string LinearProgram::to_lp_format() const {
  std::ostringstream out;
  auto term = [&](const Rational& a, int v) {
    out << (sgn(a) < 0 ? " - " : " + ") << to_double(abs(a)) << " x" << v;
  };
  out << (maximize ? "Maximize\n obj:" : "Minimize\n obj:");
  for (int v = 0; v < num_vars(); ++v) {
    if (!is_zero(objective[v])) term(objective[v], v);
  }
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << " r" << r << ":";
    for (const auto& [v, a] : rows[r].coeffs) term(a, v);
    out << (rows[r].sense == Sense::LE ? " <= " : rows[r].sense == Sense::GE ? " >= " : " = ")
        << to_double(rows[r].rhs) << "\n";
  }
  out << "Bounds\n";
  for (int v = 0; v < num_vars(); ++v) {
    if (free_var[v]) out << " x" << v << " free\n";
  }
  out << "End\n";
  return out.str();
}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LPOptions& options) : lp_(lp), options_(options) {
    m_ = static_cast<int>(lp.rows.size());
    // Structural columns: x+ for every variable, x- for free ones.
    for (int v = 0; v < lp.num_vars(); ++v) {
      plus_col_.push_back(ncols_++);
      minus_col_.push_back(lp.free_var[v] ? ncols_++ : -1);
    }
    flip_.assign(m_, 1);
    sense_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      Sense s = lp.rows[r].sense;
      if (sgn(lp.rows[r].rhs) < 0) {
        flip_[r] = -1;
        if (s == Sense::LE) s = Sense::GE;
        else if (s == Sense::GE) s = Sense::LE;
      }
      sense_[r] = s;
    }
    slack_col_.assign(m_, -1);
    for (int r = 0; r < m_; ++r) {
      if (sense_[r] != Sense::EQ) slack_col_[r] = ncols_++;
    }
    first_artificial_ = ncols_;
    id_col_.assign(m_, -1);
    for (int r = 0; r < m_; ++r) {
      id_col_[r] = sense_[r] == Sense::LE ? slack_col_[r] : ncols_++;
    }
    rhs_ = ncols_;
    t_.assign(m_, std::vector<Rational>(ncols_ + 1, Rational(0)));
    for (int r = 0; r < m_; ++r) {
      Rational f = flip_[r];
      for (const auto& [v, a] : lp.rows[r].coeffs) {
        t_[r][plus_col_[v]] += f * a;
        if (minus_col_[v] >= 0) t_[r][minus_col_[v]] -= f * a;
      }
      if (slack_col_[r] >= 0) t_[r][slack_col_[r]] = sense_[r] == Sense::LE ? 1 : -1;
      t_[r][id_col_[r]] = 1;
      t_[r][rhs_] = f * lp.rows[r].rhs;
    }
    basis_ = id_col_;
    bland_ = options.rule == PivotRule::Bland;
  }

  LPResult run() {
    LPResult result;
    // Phase 1: maximize minus the sum of artificials.
    cost_.assign(ncols_, Rational(0));
    for (int c = first_artificial_; c < ncols_; ++c) cost_[c] = -1;
    bar_artificial_ = false;
    compute_reduced_costs();
    iterate();
    if (sgn(objective_value()) < 0) {
      result.status = LPStatus::Infeasible;
      result.farkas = row_duals();
      result.pivots = pivots_;
      if (!verify_farkas(lp_, result.farkas)) {
        throw std::logic_error("simplex: Farkas certificate failed verification");
      }
      return result;
    }
    drive_out_artificials();
    // Phase 2.
    cost_.assign(ncols_, Rational(0));
    Rational sign = lp_.maximize ? 1 : -1;
    for (int v = 0; v < lp_.num_vars(); ++v) {
      cost_[plus_col_[v]] = sign * lp_.objective[v];
      if (minus_col_[v] >= 0) cost_[minus_col_[v]] = -sign * lp_.objective[v];
    }
    bar_artificial_ = true;
    compute_reduced_costs();
    if (!iterate()) {
      result.status = LPStatus::Unbounded;
      result.pivots = pivots_;
      return result;
    }
    result.status = LPStatus::Optimal;
    std::vector<Rational> value(ncols_, Rational(0));
    for (int r = 0; r < m_; ++r) value[basis_[r]] = t_[r][rhs_];
    result.primal.assign(lp_.num_vars(), Rational(0));
    for (int v = 0; v < lp_.num_vars(); ++v) {
      result.primal[v] = value[plus_col_[v]];
      if (minus_col_[v] >= 0) result.primal[v] -= value[minus_col_[v]];
    }
    result.objective = sign * objective_value();
    result.dual = row_duals();
    if (!lp_.maximize) {
      for (auto& y : result.dual) y = -y;
    }
    result.pivots = pivots_;
    if (!verify_optimality(lp_, result)) {
      throw std::logic_error("simplex: optimality certificate failed verification");
    }
    return result;
  }

 private:
  void compute_reduced_costs() {
    d_.assign(ncols_ + 1, Rational(0));
    for (int c = 0; c <= ncols_; ++c) {
      Rational acc = 0;
      for (int r = 0; r < m_; ++r) {
        const Rational& cb = cost_[basis_[r]];
        if (!is_zero(cb) && !is_zero(t_[r][c])) acc += cb * t_[r][c];
      }
      d_[c] = c == rhs_ ? acc : acc - cost_[c];
    }
  }

  Rational objective_value() const { return d_[rhs_]; }

  // Entries of c_B B^{-1}, mapped back to the caller's row signs.
  std::vector<Rational> row_duals() const {
    std::vector<Rational> y(m_, Rational(0));
    for (int r = 0; r < m_; ++r) {
      Rational acc = 0;
      for (int i = 0; i < m_; ++i) {
        const Rational& cb = cost_[basis_[i]];
        if (!is_zero(cb) && !is_zero(t_[i][id_col_[r]])) acc += cb * t_[i][id_col_[r]];
      }
      y[r] = flip_[r] * acc;
    }
    return y;
  }

  bool enterable(int c) const { return !(bar_artificial_ && c >= first_artificial_); }

  // Returns false on unboundedness.
  bool iterate() {
    int degenerate_run = 0;
    while (true) {
      int enter = -1;
      if (bland_) {
        for (int c = 0; c < ncols_; ++c) {
          if (enterable(c) && sgn(d_[c]) < 0) {
            enter = c;
            break;
          }
        }
      } else {
        for (int c = 0; c < ncols_; ++c) {
          if (enterable(c) && sgn(d_[c]) < 0 && (enter < 0 || d_[c] < d_[enter])) enter = c;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int r = 0; r < m_; ++r) {
        if (sgn(t_[r][enter]) <= 0) continue;
        Rational ratio = t_[r][rhs_] / t_[r][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      if (is_zero(best)) {
        if (++degenerate_run > options_.degenerate_limit) bland_ = true;
      } else {
        degenerate_run = 0;
      }
      pivot(leave, enter);
    }
  }

  void pivot(int r, int e) {
    ++pivots_;
    std::vector<Rational>& prow = t_[r];
    Rational piv = prow[e];
    std::vector<int> nz;
    for (int c = 0; c <= ncols_; ++c) {
      if (!is_zero(prow[c])) {
        prow[c] /= piv;
        nz.push_back(c);
      }
    }
    Rational f;
    for (int i = 0; i < m_; ++i) {
      if (i == r || is_zero(t_[i][e])) continue;
      f = t_[i][e];
      std::vector<Rational>& row = t_[i];
      for (int c : nz) row[c] -= f * prow[c];
    }
    if (!is_zero(d_[e])) {
      f = d_[e];
      for (int c : nz) d_[c] -= f * prow[c];
    }
    basis_[r] = e;
  }

  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < first_artificial_) continue;
      for (int c = 0; c < first_artificial_; ++c) {
        if (!is_zero(t_[r][c])) {
          pivot(r, c);
          break;
        }
      }
    }
  }

  const LinearProgram& lp_;
  LPOptions options_;
  int m_ = 0;
  int ncols_ = 0;
  int rhs_ = 0;
  int first_artificial_ = 0;
  bool bland_ = false;
  bool bar_artificial_ = false;
  int pivots_ = 0;
  std::vector<int> plus_col_, minus_col_, slack_col_, id_col_, basis_, flip_;
  std::vector<Sense> sense_;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> cost_, d_;
};

}  // namespace

LPResult solve_lp(const LinearProgram& lp, const LPOptions& options) {
  lp.validate();
  Tableau tableau(lp, options);
  return tableau.run();
}

bool verify_optimality(const LinearProgram& lp, const LPResult& result) {
  if (result.status != LPStatus::Optimal) return false;
  if (static_cast<int>(result.primal.size()) != lp.num_vars()) return false;
  if (result.dual.size() != lp.rows.size()) return false;
  Rational obj = 0;
  for (int v = 0; v < lp.num_vars(); ++v) {
    if (!lp.free_var[v] && sgn(result.primal[v]) < 0) return false;
    obj += lp.objective[v] * result.primal[v];
  }
  if (obj != result.objective) return false;
  std::vector<Rational> aty(lp.num_vars(), Rational(0));
  Rational dual_obj = 0;
  int orient = lp.maximize ? 1 : -1;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    Rational lhs = 0;
    for (const auto& [v, a] : row.coeffs) {
      lhs += a * result.primal[v];
      aty[v] += a * result.dual[r];
    }
    if (row.sense == Sense::LE && lhs > row.rhs) return false;
    if (row.sense == Sense::GE && lhs < row.rhs) return false;
    if (row.sense == Sense::EQ && lhs != row.rhs) return false;
    int ys = orient * sgn(result.dual[r]);
    if (row.sense == Sense::LE && ys < 0) return false;
    if (row.sense == Sense::GE && ys > 0) return false;
    dual_obj += row.rhs * result.dual[r];
  }
  for (int v = 0; v < lp.num_vars(); ++v) {
    int gap = orient * sgn(aty[v] - lp.objective[v]);
    if (lp.free_var[v] ? gap != 0 : gap < 0) return false;
  }
  return dual_obj == result.objective;
}

bool verify_farkas(const LinearProgram& lp, const std::vector<Rational>& y) {
  if (y.size() != lp.rows.size()) return false;
  std::vector<Rational> aty(lp.num_vars(), Rational(0));
  Rational by = 0;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    if (row.sense == Sense::LE && sgn(y[r]) < 0) return false;
    if (row.sense == Sense::GE && sgn(y[r]) > 0) return false;
    for (const auto& [v, a] : row.coeffs) aty[v] += a * y[r];
    by += row.rhs * y[r];
  }
  for (int v = 0; v < lp.num_vars(); ++v) {
    if (lp.free_var[v] ? !is_zero(aty[v]) : sgn(aty[v]) < 0) return false;
  }
  return sgn(by) < 0;
}

}  // namespace rg
