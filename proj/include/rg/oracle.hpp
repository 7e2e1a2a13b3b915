#pragma once

#include <string>
#include <vector>

#include "rg/behavior.hpp"
#include "rg/game.hpp"
#include "rg/lp.hpp"

namespace rg {

struct OracleOptions {
  std::size_t node_budget = 1000000;
};

// A player's behavior strategy imposed on stages 1..until_stage.
struct Fixing {
  const BehaviorStrategy* strategy = nullptr;
  int until_stage = 0;

  bool fixed_at(int stage) const { return strategy && stage <= until_stage; }
};

struct OracleResult {
  Rational value;
  BehaviorStrategy sigma;  // player 1, free stages only
  BehaviorStrategy tau;    // player 2, free stages only
  std::vector<Rational> certificate;
  std::size_t nodes = 0;
  int lp_rows = 0;
  int lp_cols = 0;
};

// Exact value of the game with payoff sum_m theta_m g(k_m, i_m, j_m) by sequence-form LP on the
// tree of (state, private history, private history) nodes; fixed players act as chance.
OracleResult solve_extensive(const GameSpec& spec, const InitialLaw& pi, const Evaluation& theta,
                             const Fixing& fix1, const Fixing& fix2,
                             const OracleOptions& options = {});

OracleResult oracle_value(const GameSpec& spec, const InitialLaw& pi, const Evaluation& theta,
                          const OracleOptions& options = {});

// Exact expected payoff of a fixed strategy pair.
Rational evaluate_profile(const GameSpec& spec, const InitialLaw& pi, const BehaviorStrategy& sigma,
                          const BehaviorStrategy& tau, const Evaluation& theta,
                          const OracleOptions& options = {});

Rational shifted_window_value(const GameSpec& spec, const InitialLaw& pi, int m, int n,
                              const OracleOptions& options = {});

struct VStarBounds {
  Rational lower;
  Rational upper;
  std::string lower_source;
  int n_max = 0;
  int m_max = 0;
  std::vector<std::vector<Rational>> table;  // table[m][n-1] = v_{m,n}

  std::string to_csv() const;
};

// Truncated: the sup over m is taken over m <= m_max only.
VStarBounds vstar_bounds(const GameSpec& spec, const InitialLaw& pi, int n_max, int m_max,
                         const OracleOptions& options = {});

}  // namespace rg
