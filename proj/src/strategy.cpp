#include "rg/strategy.hpp"

#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "rg/belief.hpp"
#include "rg/errors.hpp"

namespace rg {

namespace {

struct LiftState {
  BeliefPoint x;
  BeliefAtomLaw y;
};

// Signals c that player 1 can observe after (x, i), with the player-2 actions that allow them.
std::map<int, std::vector<int>> reachable_signals(const GameSpec& spec, const BeliefPoint& x, int i) {
  std::map<int, std::vector<int>> out;
  for (int j = 0; j < spec.num_actions2(); ++j) {
    std::map<int, Rational> mass;
    for (int k = 0; k < spec.num_states(); ++k) {
      if (is_zero(x.probs[k])) continue;
      for (const auto& atom : spec.transition(k, i, j)) mass[atom.c] += x.probs[k] * atom.mass;
    }
    for (const auto& [c, m] : mass) {
      if (is_positive(m)) out[c].push_back(j);
    }
  }
  return out;
}

BehaviorStrategy lift_impl(const GameSpec& spec, const FirstOrderKernel& f, const InitialLaw& pi,
                           const std::vector<MarkovStageRule>& rules,
                           std::map<History, LiftState>* states) {
  if (rules.empty()) throw ValidationError("no stage rules to lift");
  A2aResult a2a = check_a2a(pi, spec.num_states());
  if (!a2a.pass) throw PreconditionError("A2a fails at c'=" + pi.signals1[a2a.c]);
  SignalInclusionResult incl = check_signal_inclusion(spec);
  if (!incl.pass) throw PreconditionError("A'2b fails at c=" + spec.signals1[incl.c]);
  std::vector<BeliefPoint> x1 = first_order_table(pi, spec.num_states());
  const int depth = static_cast<int>(rules.size());

  BehaviorStrategy sigma;
  sigma.player = 1;
  sigma.depth = depth;
  sigma.num_actions = spec.num_actions1();

  auto visit = [&](auto&& self, const History& h, const BeliefPoint& x, const BeliefAtomLaw& y,
                   int n) -> void {
    const MarkovStageRule& rule = rules[n - 1];
    std::vector<Rational> dist = rule.at(x, y);
    sigma.table[h] = dist;
    if (states) (*states)[h] = LiftState{x, y};
    if (n == depth) return;
    AuxAction a = rule.action(y);
    for (int i = 0; i < spec.num_actions1(); ++i) {
      if (is_zero(dist[i])) continue;
      for (const auto& [c, js] : reachable_signals(spec, x, i)) {
        int d = incl.h[c];
        std::optional<BeliefAtomLaw> next;
        for (int j : js) {
          auto yj = updated_second_order(spec, f, y, a, j, d);
          if (!yj) throw std::logic_error("player 2's signal has zero mass under the lifted rule");
          if (next && !(*next == *yj)) {
            throw PreconditionError("player 2's posterior depends on his action, which signal " +
                                    spec.signals1[c] + " does not reveal");
          }
          next = std::move(yj);
        }
        History child = h;
        child.push_back(i);
        child.push_back(c);
        self(self, child, f.apply(x, i, c), *next, n + 1);
      }
    }
  };
  for (int c = 0; c < static_cast<int>(pi.signals1.size()); ++c) {
    if (!is_positive(pi.mass_c(c))) continue;
    visit(visit, History{c}, x1[c], a2a.table[c], 1);
  }
  return sigma;
}

}  // namespace

BehaviorStrategy lift_markov_strategy(const GameSpec& spec, const FirstOrderKernel& f,
                                      const InitialLaw& pi,
                                      const std::vector<MarkovStageRule>& rules) {
  return lift_impl(spec, f, pi, rules, nullptr);
}

ReplayCheck replay_second_order(const GameSpec& spec, const FirstOrderKernel& f,
                                const InitialLaw& pi, const std::vector<MarkovStageRule>& rules) {
  std::map<History, LiftState> states;
  BehaviorStrategy sigma = lift_impl(spec, f, pi, rules, &states);
  using Key = std::tuple<int, History, History>;
  std::map<Key, Rational> level;
  for (const auto& a : pi.atoms) level[{a.k, History{a.c}, History{a.d}}] += a.mass;
  ReplayCheck out;
  const Rational b(1, spec.num_actions2());
  for (int n = 1; n <= sigma.depth; ++n) {
    std::map<History, Atoms<BeliefPoint>> posterior;
    std::map<History, std::vector<const LiftState*>> carried;
    for (const auto& [key, m] : level) {
      const auto& [k, h1, h2] = key;
      const LiftState& s = states.at(h1);
      posterior[h2].emplace_back(s.x, m);
      carried[h2].push_back(&s);
    }
    for (auto& [h2, atoms] : posterior) {
      ++out.histories;
      BeliefAtomLaw truth = BeliefAtomLaw::normalized(std::move(atoms));
      for (const LiftState* s : carried[h2]) {
        if (!(s->y == truth)) {
          out.pass = false;
          out.witness = "stage " + std::to_string(n) + ": carried " + to_string(s->y) +
                        ", conditional " + to_string(truth);
          return out;
        }
      }
    }
    if (n == sigma.depth) break;
    std::map<Key, Rational> next;
    for (const auto& [key, m] : level) {
      const auto& [k, h1, h2] = key;
      const auto& dist = sigma.at(h1);
      for (int i = 0; i < spec.num_actions1(); ++i) {
        if (is_zero(dist[i])) continue;
        for (int j = 0; j < spec.num_actions2(); ++j) {
          for (const auto& atom : spec.transition(k, i, j)) {
            History n1 = h1, n2 = h2;
            n1.push_back(i);
            n1.push_back(atom.c);
            n2.push_back(j);
            n2.push_back(atom.d);
            next[{atom.next, std::move(n1), std::move(n2)}] += m * dist[i] * b * atom.mass;
          }
        }
      }
    }
    level = std::move(next);
  }
  return out;
}

BehaviorStrategy block_strategy(const GameSpec& spec, const InitialLaw& pi, int n, int blocks,
                                const OracleOptions& options) {
  if (n < 1 || blocks < 1) throw ValidationError("block length and count must be positive");
  BehaviorStrategy tau;
  tau.player = 2;
  tau.depth = n * blocks;
  tau.num_actions = spec.num_actions2();
  for (int l = 0; l < blocks; ++l) {
    OracleResult r = solve_extensive(spec, pi, Evaluation::window(n * l, n), Fixing{},
                                     Fixing{&tau, n * l}, options);
    for (auto& [h, dist] : r.tau.table) tau.table.emplace(h, dist);
  }
  return tau;
}

OracleResult best_reply_value(const GameSpec& spec, const InitialLaw& pi,
                              const BehaviorStrategy& fixed, const Evaluation& theta,
                              const OracleOptions& options) {
  int h = theta.effective_horizon();
  if (fixed.player == 1) return solve_extensive(spec, pi, theta, Fixing{&fixed, h}, Fixing{}, options);
  return solve_extensive(spec, pi, theta, Fixing{}, Fixing{&fixed, h}, options);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

template <class Weights>
std::size_t draw(std::mt19937_64& rng, const Weights& weights) {
  double u = std::generate_canonical<double, 64>(rng);
  double acc = 0;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    acc += weights[s];
    if (u < acc) return s;
  }
  // Rounding left u beyond the total: take the last positive weight.
  for (std::size_t s = weights.size(); s-- > 0;) {
    if (weights[s] > 0) return s;
  }
  return 0;
}

std::vector<double> as_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& q : v) out.push_back(to_double(q));
  return out;
}

}  // namespace

SimulationResult simulate_play(const GameSpec& spec, const InitialLaw& pi,
                               const BehaviorStrategy& sigma, const BehaviorStrategy& tau,
                               int horizon, int samples, std::uint64_t seed) {
  if (horizon < 1 || samples < 1) throw ValidationError("horizon and samples must be positive");
  std::vector<double> init;
  for (const auto& a : pi.atoms) init.push_back(to_double(a.mass));
  std::vector<std::vector<double>> rows(spec.transitions.size());
  for (std::size_t r = 0; r < spec.transitions.size(); ++r) {
    for (const auto& atom : spec.transitions[r]) rows[r].push_back(to_double(atom.mass));
  }
  Rational total = 0;
  for (int s = 0; s < samples; ++s) {
    std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(s)));
    const InitialAtom& start = pi.atoms[draw(rng, init)];
    int k = start.k;
    History h1{start.c}, h2{start.d};
    for (int t = 1; t <= horizon; ++t) {
      int i = static_cast<int>(draw(rng, as_doubles(sigma.at(h1))));
      int j = static_cast<int>(draw(rng, as_doubles(tau.at(h2))));
      total += spec.payoff(k, i, j);
      if (t == horizon) break;
      std::size_t cell = spec.cell(k, i, j);
      const TransitionAtom& atom = spec.transitions[cell][draw(rng, rows[cell])];
      k = atom.next;
      h1.push_back(i);
      h1.push_back(atom.c);
      h2.push_back(j);
      h2.push_back(atom.d);
    }
  }
  SimulationResult out;
  out.samples = samples;
  out.horizon = horizon;
  out.mean = total / (Rational(samples) * horizon);
  // Hoeffding on the hull of [0,1] and the payoff range.
  Rational hi = spec.max_payoff() > 1 ? spec.max_payoff() : Rational(1);
  Rational lo = spec.min_payoff() < 0 ? spec.min_payoff() : Rational(0);
  double range = to_double(hi - lo);
  out.radius = range * std::sqrt(std::log(2.0 / 0.01) / (2.0 * samples));
  return out;
}

}  // namespace rg
