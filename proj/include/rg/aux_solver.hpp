#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rg/audit.hpp"
#include "rg/belief.hpp"
#include "rg/game.hpp"
#include "rg/optimization.hpp"

namespace rg {

// psi_n(x, y): a mixed action over I for each (first-order belief, second-order belief) pair.
struct MarkovStageRule {
  int num_actions = 0;
  std::map<std::pair<BeliefPoint, BeliefAtomLaw>, std::vector<Rational>> table;
  std::optional<std::vector<Rational>> fallback;  // uniform when unset

  std::vector<Rational> at(const BeliefPoint& x, const BeliefAtomLaw& y) const;
  bool has(const BeliefPoint& x, const BeliefAtomLaw& y) const;
  // Keeps the first rule stored for a key.
  void set(const BeliefPoint& x, const BeliefAtomLaw& y, std::vector<Rational> dist);
  // The aux action played at every atom of y.
  AuxAction action(const BeliefAtomLaw& y) const;
  static MarkovStageRule uniform(int num_actions);
};

struct AuxOptions {
  Rational tol = Rational(1, 1000);
  // Deterministic tie-break among optimal rules: best payoff against a uniform b (drops weakly
  // dominated actions), then closest to uniform in l1.
  bool prefer_uniform = true;
};

// One node of the rule tree: player 2's posterior y at a depth, and the rule per atom of y.
struct AuxRuleNode {
  int depth = 1;
  BeliefAtomLaw y;
  Rational mass;  // probability of reaching this node
  AuxAction action;
};

struct AuxSolution {
  Rational value;
  std::vector<AuxRuleNode> nodes;
  int lp_rows = 0;
  int lp_cols = 0;
};

struct AuxValueResult {
  Rational lower;
  Rational upper;
  std::optional<Rational> exact;
  std::vector<MarkovStageRule> rules;  // rules[t-1] for stage t
  std::vector<AuxRuleNode> nodes;

  double width() const { return to_double(upper - lower); }
  // Lines "depth t z <digest> x <belief> : probabilities".
  std::string rule_tree() const;
};

// Evaluates w_theta(z) by the recursion over second-order beliefs. The sup over a is solved
// exactly: one LP over the unnormalized rule weights mu_N(p) a_N(p, i) on the tree of
// player-2 posteriors, which is linear because l(z, a) does not depend on b.
class AuxSolver {
 public:
  // Throws PreconditionError when A1b, A'2b or A'3 fails outright.
  explicit AuxSolver(const GameSpec& spec);
  AuxSolver(const GameSpec& spec, FirstOrderKernel kernel);

  const GameSpec& spec() const { return spec_; }
  const FirstOrderKernel& kernel() const { return kernel_; }

  // w_theta(z), cached by (z, theta).
  std::shared_ptr<const AuxSolution> solve(const BeliefAtomLaw& z, const Evaluation& theta,
                                           const AuxOptions& options = {});
  Rational w(const BeliefAtomLaw& z, const Evaluation& theta);

  std::size_t cache_size() const;

 private:
  GameSpec spec_;
  FirstOrderKernel kernel_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<const AuxSolution>> cache_;
};

// sum_z eta(z) w_theta(z).
AuxValueResult aux_value(AuxSolver& solver, const HierarchyLaw& eta, const Evaluation& theta,
                         const AuxOptions& options = {});
AuxValueResult aux_value(const GameSpec& spec, const FirstOrderKernel& f, const HierarchyLaw& eta,
                         const Evaluation& theta, const AuxOptions& options = {});

std::vector<MarkovStageRule> aux_optimal_stage_rules(AuxSolver& solver, const HierarchyLaw& eta,
                                                     const Evaluation& theta,
                                                     const AuxOptions& options = {});

struct ProbeEntry {
  bool holds = false;
  Rational lhs;
  Rational rhs;
  std::string detail;
};

struct ProbeReport {
  std::vector<ProbeEntry> entries;
  int violations() const;
  bool all_hold() const { return violations() == 0; }
};

// |v(z) - v(z')| <= d(z, z').
ProbeReport lipschitz_probe(AuxSolver& solver, const Evaluation& theta,
                            const std::vector<std::pair<BeliefAtomLaw, BeliefAtomLaw>>& pairs);

struct ConcavityTriple {
  BeliefAtomLaw z;
  BeliefAtomLaw zp;
  Rational lambda;
};

// v(lambda z + (1 - lambda) z') >= lambda v(z) + (1 - lambda) v(z').
ProbeReport concavity_probe(AuxSolver& solver, const Evaluation& theta,
                            const std::vector<ConcavityTriple>& triples);

struct Split {
  std::vector<Rational> lambda;
  std::vector<BeliefAtomLaw> z;
  std::vector<AuxAction> a;
};

// a(p) = sum_s lambda_s z_s(p) a_s(p) / z(p) on z = sum_s lambda_s z_s.
AuxAction splitting_action(const Split& split, int num_actions);

struct SplitCheck {
  bool choquet = false;
  bool payoff = false;
  ChoquetResult certificate;
  Rational g_mixed;  // min_b G(z, a, b)
  Rational g_parts;  // sum_s lambda_s min_b G(z_s, a_s, b)
};

SplitCheck check_split(const GameSpec& spec, const FirstOrderKernel& f, const Split& split);
ProbeReport splitting_probe(const GameSpec& spec, const FirstOrderKernel& f,
                            const std::vector<Split>& splits);

}  // namespace rg
