#include "rg/optimization.hpp"

#include <map>

#include "rg/errors.hpp"

namespace rg {

GameValueResult matrix_game(const Matrix& m) {
  if (m.empty() || m.front().empty()) throw ValidationError("matrix game needs a nonempty matrix");
  std::size_t rows = m.size(), cols = m.front().size();
  LinearProgram lp;
  std::vector<int> x(rows);
  for (std::size_t i = 0; i < rows; ++i) x[i] = lp.add_var(0);
  int v = lp.add_var(1, true);
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<std::pair<int, Rational>> row{{v, Rational(1)}};
    for (std::size_t i = 0; i < rows; ++i) {
      if (m[i].size() != cols) throw ValidationError("ragged matrix");
      if (!is_zero(m[i][j])) row.emplace_back(x[i], -m[i][j]);
    }
    lp.add_row(std::move(row), Sense::LE, 0);
  }
  std::vector<std::pair<int, Rational>> simplex;
  for (int xi : x) simplex.emplace_back(xi, Rational(1));
  lp.add_row(std::move(simplex), Sense::EQ, 1);
  LPResult res = solve_lp(lp);
  GameValueResult out;
  out.value = res.objective;
  for (int xi : x) out.strategy1.push_back(res.primal[xi]);
  for (std::size_t j = 0; j < cols; ++j) out.strategy2.push_back(res.dual[j]);
  out.certificate = res.dual;
  return out;
}

ProfileGameResult profile_stage_game(const GameSpec& spec, const BeliefAtomLaw& z) {
  int ni = spec.num_actions1(), nj = spec.num_actions2();
  LinearProgram lp;
  std::vector<std::vector<int>> a(z.atoms.size());
  for (std::size_t s = 0; s < z.atoms.size(); ++s) {
    for (int i = 0; i < ni; ++i) a[s].push_back(lp.add_var(0));
  }
  int v = lp.add_var(1, true);
  for (int j = 0; j < nj; ++j) {
    std::vector<std::pair<int, Rational>> row{{v, Rational(1)}};
    for (std::size_t s = 0; s < z.atoms.size(); ++s) {
      for (int i = 0; i < ni; ++i) {
        Rational coef = z.atoms[s].second * stage_payoff_extended(spec, z.atoms[s].first, i, j);
        if (!is_zero(coef)) row.emplace_back(a[s][i], -coef);
      }
    }
    lp.add_row(std::move(row), Sense::LE, 0);
  }
  for (std::size_t s = 0; s < z.atoms.size(); ++s) {
    std::vector<std::pair<int, Rational>> row;
    for (int i = 0; i < ni; ++i) row.emplace_back(a[s][i], Rational(1));
    lp.add_row(std::move(row), Sense::EQ, 1);
  }
  LPResult res = solve_lp(lp);
  ProfileGameResult out;
  out.value = res.objective;
  for (std::size_t s = 0; s < z.atoms.size(); ++s) {
    std::vector<Rational> dist;
    for (int i = 0; i < ni; ++i) dist.push_back(res.primal[a[s][i]]);
    out.action.rules.emplace_back(z.atoms[s].first, dist);
  }
  for (int j = 0; j < nj; ++j) out.response.push_back(res.dual[j]);
  out.certificate = res.dual;
  return out;
}

Rational aux_payoff(const GameSpec& spec, const BeliefAtomLaw& z, const AuxAction& a,
                    const std::vector<Rational>& b) {
  Rational total = 0;
  for (const auto& [p, w] : z.atoms) {
    const auto& rule = a.rule(p);
    for (int i = 0; i < spec.num_actions1(); ++i) {
      if (is_zero(rule[i])) continue;
      for (int j = 0; j < spec.num_actions2(); ++j) {
        if (is_zero(b[j])) continue;
        total += w * rule[i] * b[j] * stage_payoff_extended(spec, p, i, j);
      }
    }
  }
  return total;
}

Rational aux_payoff_min(const GameSpec& spec, const BeliefAtomLaw& z, const AuxAction& a) {
  Rational best;
  for (int j = 0; j < spec.num_actions2(); ++j) {
    std::vector<Rational> b(static_cast<std::size_t>(spec.num_actions2()), Rational(0));
    b[j] = 1;
    Rational g = aux_payoff(spec, z, a, b);
    if (j == 0 || g < best) best = g;
  }
  return best;
}

Rational l1_distance(const BeliefPoint& p, const BeliefPoint& q) {
  if (p.size() != q.size()) throw ValidationError("belief dimension mismatch");
  Rational d = 0;
  for (int k = 0; k < p.size(); ++k) d += abs(p.probs[k] - q.probs[k]);
  return d;
}

TransportResult wasserstein_distance(const BeliefAtomLaw& z, const BeliefAtomLaw& zp) {
  if (z.dimension() != zp.dimension()) throw ValidationError("mismatched state spaces");
  std::size_t n = z.atoms.size(), m = zp.atoms.size();
  LinearProgram lp;
  lp.maximize = false;
  std::vector<std::vector<int>> var(n, std::vector<int>(m));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      var[a][b] = lp.add_var(l1_distance(z.atoms[a].first, zp.atoms[b].first));
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::pair<int, Rational>> row;
    for (std::size_t b = 0; b < m; ++b) row.emplace_back(var[a][b], Rational(1));
    lp.add_row(std::move(row), Sense::EQ, z.atoms[a].second);
  }
  for (std::size_t b = 0; b < m; ++b) {
    std::vector<std::pair<int, Rational>> row;
    for (std::size_t a = 0; a < n; ++a) row.emplace_back(var[a][b], Rational(1));
    lp.add_row(std::move(row), Sense::EQ, zp.atoms[b].second);
  }
  LPResult res = solve_lp(lp);
  if (res.status != LPStatus::Optimal) throw std::logic_error("transport LP not optimal");
  TransportResult out;
  out.distance = res.objective;
  out.coupling.assign(n, std::vector<Rational>(m));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < m; ++b) out.coupling[a][b] = res.primal[var[a][b]];
  }
  return out;
}

Rational evaluate_concave(const std::vector<AffinePiece>& pieces, const std::vector<Rational>& x) {
  Rational best;
  for (std::size_t s = 0; s < pieces.size(); ++s) {
    Rational v = pieces[s].constant;
    for (std::size_t r = 0; r < x.size(); ++r) v += pieces[s].slope[r] * x[r];
    if (s == 0 || v < best) best = v;
  }
  return best;
}

ChoquetResult choquet_leq(const PointLaw& mu, const PointLaw& nu) {
  if (mu.empty() || nu.empty()) throw ValidationError("Choquet comparison of empty laws");
  std::size_t dim = mu.front().first.size();
  for (const auto& a : mu) {
    if (a.first.size() != dim) throw ValidationError("dimension mismatch");
  }
  for (const auto& a : nu) {
    if (a.first.size() != dim) throw ValidationError("dimension mismatch");
  }
  std::size_t n = nu.size(), m = mu.size();
  LinearProgram lp;
  std::vector<std::vector<int>> var(n, std::vector<int>(m));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < m; ++b) var[a][b] = lp.add_var(0);
  }
  // mu marginal.
  for (std::size_t b = 0; b < m; ++b) {
    std::vector<std::pair<int, Rational>> row;
    for (std::size_t a = 0; a < n; ++a) row.emplace_back(var[a][b], Rational(1));
    lp.add_row(std::move(row), Sense::EQ, mu[b].second);
  }
  // Mass and mean of every nu atom: coordinate 0 is the constant function.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t r = 0; r <= dim; ++r) {
      std::vector<std::pair<int, Rational>> row;
      for (std::size_t b = 0; b < m; ++b) {
        Rational e = r == 0 ? Rational(1) : mu[b].first[r - 1];
        if (!is_zero(e)) row.emplace_back(var[a][b], e);
      }
      Rational target = r == 0 ? Rational(1) : nu[a].first[r - 1];
      lp.add_row(std::move(row), Sense::EQ, nu[a].second * target);
    }
  }
  LPResult res = solve_lp(lp);
  ChoquetResult out;
  if (res.status == LPStatus::Optimal) {
    out.holds = true;
    out.kernel.assign(n, std::vector<Rational>(m));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < m; ++b) out.kernel[a][b] = res.primal[var[a][b]];
    }
    return out;
  }
  // Farkas rows for nu atom a give an affine function; their minimum separates the laws.
  for (std::size_t a = 0; a < n; ++a) {
    AffinePiece piece;
    std::size_t base = m + a * (dim + 1);
    piece.constant = res.farkas[base];
    for (std::size_t r = 1; r <= dim; ++r) piece.slope.push_back(res.farkas[base + r]);
    out.witness.push_back(piece);
  }
  Rational int_mu = 0, int_nu = 0;
  for (const auto& [x, w] : mu) int_mu += w * evaluate_concave(out.witness, x);
  for (const auto& [x, w] : nu) int_nu += w * evaluate_concave(out.witness, x);
  out.gap = int_mu - int_nu;
  if (sgn(out.gap) <= 0) throw std::logic_error("Choquet witness does not separate");
  return out;
}

ChoquetResult choquet_leq(const BeliefAtomLaw& mu, const BeliefAtomLaw& nu) {
  PointLaw a, b;
  for (const auto& [p, w] : mu.atoms) a.emplace_back(p.probs, w);
  for (const auto& [p, w] : nu.atoms) b.emplace_back(p.probs, w);
  return choquet_leq(a, b);
}

ChoquetResult choquet_leq(const HierarchyLaw& mu, const HierarchyLaw& nu) {
  std::map<BeliefPoint, std::size_t> index;
  for (const auto* law : {&mu, &nu}) {
    for (const auto& [z, w] : law->atoms) {
      for (const auto& [p, m] : z.atoms) index.emplace(p, 0);
    }
  }
  std::size_t next = 0;
  for (auto& [p, idx] : index) idx = next++;
  auto embed = [&](const HierarchyLaw& eta) {
    PointLaw out;
    for (const auto& [z, w] : eta.atoms) {
      std::vector<Rational> v(index.size(), Rational(0));
      for (const auto& [p, m] : z.atoms) v[index[p]] = m;
      out.emplace_back(v, w);
    }
    return out;
  };
  return choquet_leq(embed(mu), embed(nu));
}

}  // namespace rg
