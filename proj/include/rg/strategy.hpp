#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rg/audit.hpp"
#include "rg/aux_solver.hpp"
#include "rg/behavior.hpp"
#include "rg/game.hpp"
#include "rg/oracle.hpp"

namespace rg {

// Player 1 plays rules[n-1](x_n, y_n): x_n advanced by F, y_n by the disintegration driven by
// his own rule, and player 2's signal read off player 1's signal through h.
BehaviorStrategy lift_markov_strategy(const GameSpec& spec, const FirstOrderKernel& f,
                                      const InitialLaw& pi, const std::vector<MarkovStageRule>& rules);

struct ReplayCheck {
  bool pass = true;
  int histories = 0;  // player-2 histories compared
  std::string witness;
};

// Full-information replay of the lifted strategy: for every positive-mass player-2 history the
// true conditional law of x_n must equal the y_n player 1 carries, whatever player 2 plays.
ReplayCheck replay_second_order(const GameSpec& spec, const FirstOrderKernel& f,
                                const InitialLaw& pi, const std::vector<MarkovStageRule>& rules);

// Block l plays an optimal strategy of the window (n l, n) game with blocks 0..l-1 fixed.
BehaviorStrategy block_strategy(const GameSpec& spec, const InitialLaw& pi, int n, int blocks,
                                const OracleOptions& options = {});

// Exact value of the free player's best reply; value is what the fixed player guarantees.
OracleResult best_reply_value(const GameSpec& spec, const InitialLaw& pi,
                              const BehaviorStrategy& fixed, const Evaluation& theta,
                              const OracleOptions& options = {});

struct SimulationResult {
  Rational mean;     // exact sample mean of the Cesaro payoffs
  double radius = 0;  // Hoeffding radius at 99% confidence
  int samples = 0;
  int horizon = 0;
};

// Sample s draws from mt19937_64 seeded with splitmix64(seed + s); one stream per play.
SimulationResult simulate_play(const GameSpec& spec, const InitialLaw& pi,
                               const BehaviorStrategy& sigma, const BehaviorStrategy& tau,
                               int horizon, int samples, std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rg
