#include <future>

#include "rg/audit.hpp"
#include "rg/aux_solver.hpp"
#include "rg/belief.hpp"
#include "rg/errors.hpp"
#include "rg/oracle.hpp"
#include "rg/strategy.hpp"

namespace rg {

VStarBounds vstar_bounds(const GameSpec& spec, const InitialLaw& pi, int n_max, int m_max,
                         const OracleOptions& options) {
  if (n_max < 1 || m_max < 0) throw ValidationError("vstar needs n_max >= 1 and m_max >= 0");
  VStarBounds out;
  out.n_max = n_max;
  out.m_max = m_max;
  std::vector<std::vector<std::future<Rational>>> cells(static_cast<std::size_t>(m_max + 1));
  for (int m = 0; m <= m_max; ++m) {
    for (int n = 1; n <= n_max; ++n) {
      cells[m].push_back(std::async(std::launch::async, [&spec, &pi, m, n, options] {
        return shifted_window_value(spec, pi, m, n, options);
      }));
    }
  }
  out.table.resize(cells.size());
  for (std::size_t m = 0; m < cells.size(); ++m) {
    for (auto& cell : cells[m]) out.table[m].push_back(cell.get());
  }
  for (int n = 1; n <= n_max; ++n) {
    Rational best = out.table[0][n - 1];
    for (int m = 1; m <= m_max; ++m) {
      if (out.table[m][n - 1] > best) best = out.table[m][n - 1];
    }
    if (n == 1 || best < out.upper) out.upper = best;
  }

  Evaluation theta = Evaluation::uniform(n_max);
  if (audit_all(spec, pi).usable()) {
    AuxSolver solver(spec);
    auto rules = aux_optimal_stage_rules(solver, phi(pi, spec.num_states()), theta);
    BehaviorStrategy sigma = lift_markov_strategy(spec, solver.kernel(), pi, rules);
    out.lower = best_reply_value(spec, pi, sigma, theta, options).value;
    out.lower_source = "lifted Markov strategy, " + std::to_string(n_max) + " stages";
  } else {
    OracleResult r = oracle_value(spec, pi, theta, options);
    out.lower = best_reply_value(spec, pi, r.sigma, theta, options).value;
    out.lower_source = "oracle-optimal strategy, " + std::to_string(n_max) + " stages";
  }
  return out;
}

}  // namespace rg
