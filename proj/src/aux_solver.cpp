#include "rg/aux_solver.hpp"

#include <map>
#include <sstream>

#include "rg/errors.hpp"

namespace rg {

std::vector<Rational> MarkovStageRule::at(const BeliefPoint& x, const BeliefAtomLaw& y) const {
  auto it = table.find({x, y});
  if (it != table.end()) return it->second;
  if (fallback) return *fallback;
  return std::vector<Rational>(static_cast<std::size_t>(num_actions), Rational(1, num_actions));
}

bool MarkovStageRule::has(const BeliefPoint& x, const BeliefAtomLaw& y) const {
  return table.count({x, y}) > 0;
}

void MarkovStageRule::set(const BeliefPoint& x, const BeliefAtomLaw& y, std::vector<Rational> dist) {
  table.emplace(std::pair{x, y}, std::move(dist));
}

AuxAction MarkovStageRule::action(const BeliefAtomLaw& y) const {
  AuxAction a;
  for (const auto& [p, m] : y.atoms) a.rules.emplace_back(p, at(p, y));
  return a;
}

MarkovStageRule MarkovStageRule::uniform(int num_actions) {
  MarkovStageRule r;
  r.num_actions = num_actions;
  return r;
}

namespace {

FirstOrderKernel checked_kernel(const GameSpec& spec) {
  KernelResult k = derive_first_order_kernel(spec);
  if (k.verdict == Verdict::Fail) throw PreconditionError("A1b fails: no first-order kernel F");
  if (!check_signal_inclusion(spec).pass) throw PreconditionError("A'2b fails");
  if (check_pushforward_independence(spec, k.kernel).verdict == Verdict::Fail) {
    throw PreconditionError("A'3 fails");
  }
  return std::move(k.kernel);
}

struct SignalMass {
  int c;
  int d;
  Rational mass;
};

// Law of (c, d) given belief p, action i and player 2's action j.
std::vector<SignalMass> signal_law(const GameSpec& spec, const BeliefPoint& p, int i, int j) {
  std::map<std::pair<int, int>, Rational> acc;
  for (int k = 0; k < spec.num_states(); ++k) {
    if (is_zero(p.probs[k])) continue;
    for (const auto& atom : spec.transition(k, i, j)) acc[{atom.c, atom.d}] += p.probs[k] * atom.mass;
  }
  std::vector<SignalMass> out;
  for (auto& [key, m] : acc) {
    if (is_positive(m)) out.push_back(SignalMass{key.first, key.second, m});
  }
  return out;
}

struct TreeNode {
  int depth = 1;
  std::vector<BeliefPoint> atoms;
  int base = 0;  // alpha(a, i) is variable base + a * I + i
  int v = -1;
};

}  // namespace

AuxSolver::AuxSolver(const GameSpec& spec) : spec_(spec), kernel_(checked_kernel(spec)) {}

AuxSolver::AuxSolver(const GameSpec& spec, FirstOrderKernel kernel)
    : spec_(spec), kernel_(std::move(kernel)) {}

std::size_t AuxSolver::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

std::shared_ptr<const AuxSolution> AuxSolver::solve(const BeliefAtomLaw& z, const Evaluation& theta,
                                                    const AuxOptions& options) {
  z.validate();
  theta.validate();
  if (sgn(options.tol) <= 0) throw ValidationError("tol must be positive");
  if (z.dimension() != spec_.num_states()) throw ValidationError("belief dimension mismatch");
  const int horizon = theta.effective_horizon();
  Evaluation trimmed{std::vector<Rational>(theta.weights.begin(), theta.weights.begin() + horizon)};
  auto key = std::pair{to_string(z), to_string(trimmed) + (options.prefer_uniform ? "|u" : "|v")};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }

  const int nI = spec_.num_actions1();
  const int nJ = spec_.num_actions2();
  LinearProgram lp;
  std::vector<TreeNode> nodes;
  // Per node and atom: the inflow terms, or the root mass.
  std::vector<std::vector<std::map<int, Rational>>> inflow;

  auto add_node = [&](int depth, std::vector<BeliefPoint> atoms,
                      std::vector<std::map<int, Rational>> in) {
    TreeNode n;
    n.depth = depth;
    n.atoms = std::move(atoms);
    n.base = lp.num_vars();
    for (std::size_t a = 0; a < n.atoms.size() * static_cast<std::size_t>(nI); ++a) lp.add_var(0);
    if (is_positive(trimmed.weights[depth - 1])) n.v = lp.add_var(trimmed.weights[depth - 1], true);
    nodes.push_back(std::move(n));
    inflow.push_back(std::move(in));
  };

  {
    std::vector<BeliefPoint> atoms;
    for (const auto& [p, m] : z.atoms) atoms.push_back(p);
    add_node(1, std::move(atoms), std::vector<std::map<int, Rational>>(z.atoms.size()));
  }
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (nodes[n].depth >= horizon) continue;
    std::map<int, std::map<BeliefPoint, std::map<int, Rational>>> children;
    for (std::size_t a = 0; a < nodes[n].atoms.size(); ++a) {
      const BeliefPoint p = nodes[n].atoms[a];
      for (int i = 0; i < nI; ++i) {
        int var = nodes[n].base + static_cast<int>(a) * nI + i;
        for (const auto& s : signal_law(spec_, p, i, 0)) {
          children[s.d][kernel_.apply(p, i, s.c)][var] += s.mass;
        }
      }
    }
    for (auto& [d, atoms] : children) {
      std::vector<BeliefPoint> pts;
      std::vector<std::map<int, Rational>> in;
      for (auto& [p, terms] : atoms) {
        pts.push_back(p);
        in.push_back(std::move(terms));
      }
      add_node(nodes[n].depth + 1, std::move(pts), std::move(in));
    }
  }

  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const TreeNode& node = nodes[n];
    for (std::size_t a = 0; a < node.atoms.size(); ++a) {
      std::vector<std::pair<int, Rational>> row;
      for (int i = 0; i < nI; ++i) row.emplace_back(node.base + static_cast<int>(a) * nI + i, 1);
      for (const auto& [var, c] : inflow[n][a]) row.emplace_back(var, -c);
      lp.add_row(std::move(row), Sense::EQ, n == 0 ? z.atoms[a].second : Rational(0));
    }
    if (node.v < 0) continue;
    for (int j = 0; j < nJ; ++j) {
      std::vector<std::pair<int, Rational>> row{{node.v, Rational(1)}};
      for (std::size_t a = 0; a < node.atoms.size(); ++a) {
        for (int i = 0; i < nI; ++i) {
          Rational g = stage_payoff_extended(spec_, node.atoms[a], i, j);
          if (!is_zero(g)) row.emplace_back(node.base + static_cast<int>(a) * nI + i, -g);
        }
      }
      lp.add_row(std::move(row), Sense::LE, 0);
    }
  }

  LPResult res = solve_lp(lp);
  if (res.status != LPStatus::Optimal) throw std::logic_error("aux LP not optimal");
  std::vector<Rational> alpha = res.primal;

  if (options.prefer_uniform) {
    // Among optimal rules: best against a uniform b, then closest to uniform.
    LinearProgram robust = lp;
    std::vector<std::pair<int, Rational>> obj_row;
    for (int v = 0; v < lp.num_vars(); ++v) {
      if (!is_zero(lp.objective[v])) obj_row.emplace_back(v, lp.objective[v]);
      robust.objective[v] = 0;
    }
    robust.add_row(std::move(obj_row), Sense::GE, res.objective);
    for (const auto& node : nodes) {
      const Rational& w = trimmed.weights[node.depth - 1];
      if (is_zero(w)) continue;
      for (std::size_t a = 0; a < node.atoms.size(); ++a) {
        for (int i = 0; i < nI; ++i) {
          Rational g = 0;
          for (int j = 0; j < nJ; ++j) g += stage_payoff_extended(spec_, node.atoms[a], i, j);
          robust.objective[node.base + static_cast<int>(a) * nI + i] = w * g / nJ;
        }
      }
    }
    LPResult rres = solve_lp(robust);
    if (rres.status != LPStatus::Optimal) throw std::logic_error("tie-break LP not optimal");
    LinearProgram tie = robust;
    tie.maximize = false;
    std::vector<std::pair<int, Rational>> robust_row;
    for (int v = 0; v < robust.num_vars(); ++v) {
      if (!is_zero(robust.objective[v])) robust_row.emplace_back(v, robust.objective[v]);
      tie.objective[v] = 0;
    }
    tie.add_row(std::move(robust_row), Sense::GE, rres.objective);
    Rational share(1, nI);
    for (const auto& node : nodes) {
      for (std::size_t a = 0; a < node.atoms.size(); ++a) {
        int first = node.base + static_cast<int>(a) * nI;
        for (int i = 0; i < nI; ++i) {
          int e = tie.add_var(1);
          // e >= |alpha(a, i) - mu(a) / I| with mu(a) = sum_i' alpha(a, i').
          std::vector<std::pair<int, Rational>> up{{e, Rational(1)}}, down{{e, Rational(1)}};
          for (int ip = 0; ip < nI; ++ip) {
            Rational coeff = (ip == i ? Rational(1) : Rational(0)) - share;
            if (is_zero(coeff)) continue;
            up.emplace_back(first + ip, -coeff);
            down.emplace_back(first + ip, coeff);
          }
          tie.add_row(std::move(up), Sense::GE, 0);
          tie.add_row(std::move(down), Sense::GE, 0);
        }
      }
    }
    LPResult tres = solve_lp(tie);
    if (tres.status != LPStatus::Optimal) throw std::logic_error("tie-break LP not optimal");
    alpha.assign(tres.primal.begin(), tres.primal.begin() + lp.num_vars());
  }

  auto sol = std::make_shared<AuxSolution>();
  sol->value = res.objective;
  sol->lp_rows = static_cast<int>(lp.rows.size());
  sol->lp_cols = lp.num_vars();
  for (const auto& node : nodes) {
    Atoms<BeliefPoint> mu;
    std::vector<std::vector<Rational>> rules;
    Rational total = 0;
    for (std::size_t a = 0; a < node.atoms.size(); ++a) {
      std::vector<Rational> w(alpha.begin() + node.base + static_cast<long>(a) * nI,
                              alpha.begin() + node.base + static_cast<long>(a + 1) * nI);
      Rational m = sum(w);
      if (!is_positive(m)) continue;
      for (auto& x : w) x /= m;
      mu.emplace_back(node.atoms[a], m);
      rules.push_back(std::move(w));
      total += m;
    }
    if (!is_positive(total)) continue;
    AuxRuleNode out;
    out.depth = node.depth;
    out.mass = total;
    for (std::size_t s = 0; s < mu.size(); ++s) out.action.rules.emplace_back(mu[s].first, rules[s]);
    out.y = BeliefAtomLaw::normalized(std::move(mu));
    if (node.depth < horizon) aux_transition(spec_, kernel_, out.y, out.action);
    sol->nodes.push_back(std::move(out));
  }

  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(key, std::move(sol)).first->second;
}

Rational AuxSolver::w(const BeliefAtomLaw& z, const Evaluation& theta) {
  AuxOptions options;
  options.prefer_uniform = false;
  return solve(z, theta, options)->value;
}

std::string AuxValueResult::rule_tree() const {
  std::ostringstream out;
  for (const auto& node : nodes) {
    std::string digest = sha256_hex(to_string(node.y)).substr(0, 12);
    for (const auto& [x, dist] : node.action.rules) {
      out << "depth " << node.depth << " z " << digest << " x " << to_string(x) << " : "
          << join_rationals(dist, " ") << "\n";
    }
  }
  return out.str();
}

AuxValueResult aux_value(AuxSolver& solver, const HierarchyLaw& eta, const Evaluation& theta,
                         const AuxOptions& options) {
  eta.validate();
  theta.validate();
  if (sgn(options.tol) <= 0) throw ValidationError("tol must be positive");
  AuxValueResult out;
  Rational value = 0;
  const int horizon = theta.effective_horizon();
  for (int t = 0; t < horizon; ++t) out.rules.push_back(MarkovStageRule::uniform(solver.spec().num_actions1()));
  for (const auto& [z, wz] : eta.atoms) {
    auto sol = solver.solve(z, theta, options);
    value += wz * sol->value;
    for (const auto& node : sol->nodes) {
      AuxRuleNode scaled = node;
      scaled.mass *= wz;
      for (const auto& [x, dist] : node.action.rules) out.rules[node.depth - 1].set(x, node.y, dist);
      out.nodes.push_back(std::move(scaled));
    }
  }
  out.lower = value;
  out.upper = value;
  out.exact = value;
  return out;
}

AuxValueResult aux_value(const GameSpec& spec, const FirstOrderKernel& f, const HierarchyLaw& eta,
                         const Evaluation& theta, const AuxOptions& options) {
  AuxSolver solver(spec, f);
  return aux_value(solver, eta, theta, options);
}

std::vector<MarkovStageRule> aux_optimal_stage_rules(AuxSolver& solver, const HierarchyLaw& eta,
                                                     const Evaluation& theta,
                                                     const AuxOptions& options) {
  return aux_value(solver, eta, theta, options).rules;
}

int ProbeReport::violations() const {
  int n = 0;
  for (const auto& e : entries) n += e.holds ? 0 : 1;
  return n;
}

ProbeReport lipschitz_probe(AuxSolver& solver, const Evaluation& theta,
                            const std::vector<std::pair<BeliefAtomLaw, BeliefAtomLaw>>& pairs) {
  ProbeReport report;
  for (const auto& [z, zp] : pairs) {
    Rational gap = abs(solver.w(z, theta) - solver.w(zp, theta));
    Rational d = wasserstein_distance(z, zp).distance;
    report.entries.push_back(ProbeEntry{gap <= d, gap, d, to_string(z) + " vs " + to_string(zp)});
  }
  return report;
}

ProbeReport concavity_probe(AuxSolver& solver, const Evaluation& theta,
                            const std::vector<ConcavityTriple>& triples) {
  ProbeReport report;
  for (const auto& t : triples) {
    if (t.lambda < 0 || t.lambda > 1) throw ValidationError("lambda must lie in [0,1]");
    BeliefAtomLaw mixed = mix({{t.z, t.lambda}, {t.zp, 1 - t.lambda}});
    Rational lhs = solver.w(mixed, theta);
    Rational rhs = t.lambda * solver.w(t.z, theta) + (1 - t.lambda) * solver.w(t.zp, theta);
    report.entries.push_back(ProbeEntry{lhs >= rhs, lhs, rhs, "lambda=" + to_string(t.lambda)});
  }
  return report;
}

namespace {

BeliefAtomLaw split_mixture(const Split& split) {
  std::vector<std::pair<BeliefAtomLaw, Rational>> parts;
  for (std::size_t s = 0; s < split.z.size(); ++s) parts.emplace_back(split.z[s], split.lambda[s]);
  return mix(parts);
}

void validate_split(const Split& split, int num_actions) {
  if (split.lambda.size() != split.z.size() || split.a.size() != split.z.size() || split.z.empty()) {
    throw ValidationError("split needs one weight, law and action per part");
  }
  for (const auto& l : split.lambda) {
    if (l < 0) throw ValidationError("negative split weight");
  }
  if (sum(split.lambda) != 1) throw ValidationError("split weights must sum to 1");
  for (std::size_t s = 0; s < split.z.size(); ++s) {
    split.z[s].validate();
    split.a[s].validate(num_actions);
    if (!split.a[s].covers(split.z[s])) throw ValidationError("split action does not cover its law");
  }
}

}  // namespace

AuxAction splitting_action(const Split& split, int num_actions) {
  validate_split(split, num_actions);
  BeliefAtomLaw z = split_mixture(split);
  AuxAction a;
  for (const auto& [p, zp] : z.atoms) {
    std::vector<Rational> rule(static_cast<std::size_t>(num_actions), Rational(0));
    for (std::size_t s = 0; s < split.z.size(); ++s) {
      Rational w = split.lambda[s] * split.z[s].mass_of(p);
      if (is_zero(w)) continue;
      const auto& rs = split.a[s].rule(p);
      for (int i = 0; i < num_actions; ++i) rule[i] += w * rs[i];
    }
    for (auto& r : rule) r /= zp;
    a.rules.emplace_back(p, std::move(rule));
  }
  return a;
}

SplitCheck check_split(const GameSpec& spec, const FirstOrderKernel& f, const Split& split) {
  AuxAction a = splitting_action(split, spec.num_actions1());
  BeliefAtomLaw z = split_mixture(split);
  std::vector<std::pair<HierarchyLaw, Rational>> parts;
  SplitCheck out;
  out.g_parts = 0;
  for (std::size_t s = 0; s < split.z.size(); ++s) {
    if (is_zero(split.lambda[s])) continue;
    parts.emplace_back(aux_transition(spec, f, split.z[s], split.a[s]), split.lambda[s]);
    out.g_parts += split.lambda[s] * aux_payoff_min(spec, split.z[s], split.a[s]);
  }
  out.certificate = choquet_leq(mix(parts), aux_transition(spec, f, z, a));
  out.choquet = out.certificate.holds;
  out.g_mixed = aux_payoff_min(spec, z, a);
  out.payoff = out.g_mixed >= out.g_parts;
  return out;
}

ProbeReport splitting_probe(const GameSpec& spec, const FirstOrderKernel& f,
                            const std::vector<Split>& splits) {
  ProbeReport report;
  for (const auto& split : splits) {
    SplitCheck c = check_split(spec, f, split);
    std::string detail = std::string("choquet ") + (c.choquet ? "holds" : "fails") + ", payoff " +
                         (c.payoff ? "holds" : "fails");
    report.entries.push_back(ProbeEntry{c.choquet && c.payoff, c.g_mixed, c.g_parts, detail});
  }
  return report;
}

}  // namespace rg
