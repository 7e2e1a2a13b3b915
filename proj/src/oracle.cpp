#include "rg/oracle.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "rg/errors.hpp"

namespace rg {

namespace {

// Sequence-form bookkeeping for one player.
struct Side {
  int player = 1;
  int num_actions = 0;
  const Fixing* fix = nullptr;
  HistoryInterner hist;
  std::vector<int> infoset_of;  // per history id, -1 when not a free decision point
  std::vector<int> latest_seq;  // per history id: last own free sequence on the path
  std::vector<int> info_hist;
  std::vector<int> info_parent;
  std::vector<int> info_first;  // sequences of an infoset are contiguous
  std::vector<int> seq_info;    // infoset of each nonempty sequence, -1 for the empty one
  int num_seqs = 1;

  void grow() {
    while (infoset_of.size() < hist.size()) {
      infoset_of.push_back(-1);
      latest_seq.push_back(0);
    }
  }

  int root(int signal) {
    int h = hist.root(signal);
    grow();
    return h;
  }

  int child(int h, int action, int signal) {
    int c = hist.child(h, action, signal);
    if (static_cast<std::size_t>(c) >= infoset_of.size()) {
      grow();
      latest_seq[c] = fix->fixed_at(hist.stage(h)) ? latest_seq[h] : info_first[infoset_of[h]] + action;
    }
    return c;
  }

  int ensure_infoset(int h) {
    if (infoset_of[h] >= 0) return infoset_of[h];
    int id = static_cast<int>(info_hist.size());
    infoset_of[h] = id;
    info_hist.push_back(h);
    info_parent.push_back(latest_seq[h]);
    info_first.push_back(num_seqs);
    for (int a = 0; a < num_actions; ++a) seq_info.push_back(id);
    num_seqs += num_actions;
    return id;
  }

  // Probability factor and attached sequence for action a at history h (stage t).
  std::pair<Rational, int> act(int h, int a, int t) {
    if (fix->fixed_at(t)) {
      const auto& dist = fix->strategy->at(hist.history(h));
      return {dist[a], latest_seq[h]};
    }
    int info = ensure_infoset(h);
    return {Rational(1), info_first[info] + a};
  }
};

}  // namespace

OracleResult solve_extensive(const GameSpec& spec, const InitialLaw& pi, const Evaluation& theta,
                             const Fixing& fix1, const Fixing& fix2,
                             const OracleOptions& options) {
  theta.validate();
  pi.validate(spec.num_states());
  const int horizon = theta.effective_horizon();
  Side s1, s2;
  s1.player = 1;
  s1.num_actions = spec.num_actions1();
  s1.fix = &fix1;
  s2.player = 2;
  s2.num_actions = spec.num_actions2();
  s2.fix = &fix2;
  s1.seq_info.push_back(-1);
  s2.seq_info.push_back(-1);

  using Key = std::tuple<int, int, int>;
  std::map<Key, Rational> level;
  for (const auto& a : pi.atoms) level[{a.k, s1.root(a.c), s2.root(a.d)}] += a.mass;
  std::size_t nodes = level.size();
  std::size_t max_branch = 1;
  for (const auto& row : spec.transitions) max_branch = std::max(max_branch, row.size());
  max_branch *= static_cast<std::size_t>(spec.num_actions1() * spec.num_actions2());

  std::map<std::pair<int, int>, Rational> payoff;
  for (int t = 1; t <= horizon; ++t) {
    const Rational& w = theta.weights[t - 1];
    std::map<Key, Rational> next;
    for (const auto& [key, prob] : level) {
      auto [k, h1, h2] = key;
      for (int i = 0; i < spec.num_actions1(); ++i) {
        auto [p1, q1] = s1.act(h1, i, t);
        if (is_zero(p1)) continue;
        for (int j = 0; j < spec.num_actions2(); ++j) {
          auto [p2, q2] = s2.act(h2, j, t);
          if (is_zero(p2)) continue;
          Rational reach = prob * p1 * p2;
          if (!is_zero(w) && !is_zero(spec.payoff(k, i, j))) {
            payoff[{q1, q2}] += reach * w * spec.payoff(k, i, j);
          }
          if (t == horizon) continue;
          for (const auto& atom : spec.transition(k, i, j)) {
            next[{atom.next, s1.child(h1, i, atom.c), s2.child(h2, j, atom.d)}] += reach * atom.mass;
          }
        }
      }
      if (nodes + next.size() > options.node_budget) {
        double est = static_cast<double>(nodes) +
                     static_cast<double>(level.size()) *
                         std::pow(static_cast<double>(max_branch), horizon - t);
        auto estimate = static_cast<std::size_t>(std::min(est, 1e18));
        throw BudgetError("node budget of " + std::to_string(options.node_budget) +
                              " exceeded at stage " + std::to_string(t + 1) +
                              "; estimated tree size " + std::to_string(estimate),
                          estimate);
      }
    }
    nodes += next.size();
    level = std::move(next);
  }

  // max u_root  s.t.  E x = e, x >= 0, F^T u <= A^T x.
  LinearProgram lp;
  std::vector<int> xv(s1.num_seqs), uv(s2.info_hist.size() + 1);
  for (int s = 0; s < s1.num_seqs; ++s) xv[s] = lp.add_var(0);
  for (std::size_t r = 0; r < uv.size(); ++r) uv[r] = lp.add_var(r == 0 ? 1 : 0, true);
  lp.add_row({{xv[0], Rational(1)}}, Sense::EQ, 1);
  for (std::size_t h = 0; h < s1.info_hist.size(); ++h) {
    std::vector<std::pair<int, Rational>> row;
    for (int a = 0; a < s1.num_actions; ++a) row.emplace_back(xv[s1.info_first[h] + a], Rational(1));
    row.emplace_back(xv[s1.info_parent[h]], Rational(-1));
    lp.add_row(std::move(row), Sense::EQ, 0);
  }
  std::vector<std::vector<std::pair<int, Rational>>> by_col(s2.num_seqs);
  for (const auto& [key, val] : payoff) by_col[key.second].emplace_back(key.first, val);
  std::vector<std::vector<int>> children(s2.num_seqs);
  for (std::size_t h = 0; h < s2.info_hist.size(); ++h) {
    children[s2.info_parent[h]].push_back(static_cast<int>(h));
  }
  int first_col_row = static_cast<int>(lp.rows.size());
  for (int s = 0; s < s2.num_seqs; ++s) {
    std::vector<std::pair<int, Rational>> row;
    row.emplace_back(uv[s == 0 ? 0 : s2.seq_info[s] + 1], Rational(1));
    for (int h : children[s]) row.emplace_back(uv[h + 1], Rational(-1));
    for (const auto& [sq, val] : by_col[s]) row.emplace_back(xv[sq], -val);
    lp.add_row(std::move(row), Sense::LE, 0);
  }
  LPResult res = solve_lp(lp);
  if (res.status != LPStatus::Optimal) throw std::logic_error("sequence-form LP not optimal");

  OracleResult out;
  out.value = res.objective;
  out.certificate = res.dual;
  out.nodes = nodes;
  out.lp_rows = static_cast<int>(lp.rows.size());
  out.lp_cols = lp.num_vars();
  auto behavior = [&](const Side& side, const std::vector<Rational>& plan) {
    BehaviorStrategy b;
    b.player = side.player;
    b.num_actions = side.num_actions;
    b.depth = horizon;
    for (std::size_t h = 0; h < side.info_hist.size(); ++h) {
      const Rational& parent = plan[side.info_parent[h]];
      std::vector<Rational> dist;
      for (int a = 0; a < side.num_actions; ++a) {
        dist.push_back(is_positive(parent) ? plan[side.info_first[h] + a] / parent
                                           : Rational(1, side.num_actions));
      }
      b.table[side.hist.history(side.info_hist[h])] = dist;
    }
    return b;
  };
  std::vector<Rational> x(s1.num_seqs), y(s2.num_seqs);
  for (int s = 0; s < s1.num_seqs; ++s) x[s] = res.primal[xv[s]];
  for (int s = 0; s < s2.num_seqs; ++s) y[s] = res.dual[first_col_row + s];
  out.sigma = behavior(s1, x);
  out.tau = behavior(s2, y);
  return out;
}

OracleResult oracle_value(const GameSpec& spec, const InitialLaw& pi, const Evaluation& theta,
                          const OracleOptions& options) {
  return solve_extensive(spec, pi, theta, Fixing{}, Fixing{}, options);
}

Rational evaluate_profile(const GameSpec& spec, const InitialLaw& pi, const BehaviorStrategy& sigma,
                          const BehaviorStrategy& tau, const Evaluation& theta,
                          const OracleOptions& options) {
  int h = theta.effective_horizon();
  return solve_extensive(spec, pi, theta, Fixing{&sigma, h}, Fixing{&tau, h}, options).value;
}

Rational shifted_window_value(const GameSpec& spec, const InitialLaw& pi, int m, int n,
                              const OracleOptions& options) {
  if (m < 0 || n < 1) throw ValidationError("window needs m >= 0 and n >= 1");
  return oracle_value(spec, pi, Evaluation::window(m, n), options).value;
}

std::string VStarBounds::to_csv() const {
  std::ostringstream out;
  out << "m";
  for (int n = 1; n <= n_max; ++n) out << ",n=" << n;
  out << "\n";
  for (std::size_t m = 0; m < table.size(); ++m) {
    out << m;
    for (const auto& v : table[m]) out << "," << to_string(v);
    out << "\n";
  }
  return out.str();
}

}  // namespace rg
