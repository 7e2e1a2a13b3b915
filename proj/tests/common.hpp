#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "rg/game.hpp"
#include "rg/rational.hpp"

namespace rgtest {

inline std::string games_dir() { return RG_GAMES_DIR; }

inline rg::GameDocument load(const std::string& name) {
  return rg::load_game_document(games_dir() + "/" + name + ".game");
}

inline rg::Rational Q(const std::string& s) { return rg::parse_rational(s); }

inline rg::BeliefPoint P(const std::vector<std::string>& probs) {
  rg::BeliefPoint p;
  for (const auto& s : probs) p.probs.push_back(Q(s));
  return p;
}

// Binary-state belief with mass x on the first state.
inline rg::BeliefPoint X(const rg::Rational& x) { return rg::BeliefPoint{{x, 1 - x}}; }

inline rg::BeliefAtomLaw Z(const std::vector<std::pair<rg::BeliefPoint, std::string>>& atoms) {
  rg::Atoms<rg::BeliefPoint> out;
  for (const auto& [p, m] : atoms) out.emplace_back(p, Q(m));
  return rg::BeliefAtomLaw::make(out);
}

// One-state, one-action game with payoff c and trivial signals.
inline std::string constant_game_text(const std::string& c, int actions = 1) {
  std::ostringstream s;
  s << "[game]\nstates = k\nactions1 =";
  for (int i = 0; i < actions; ++i) s << " a" << i;
  s << "\nactions2 =";
  for (int j = 0; j < actions; ++j) s << " b" << j;
  s << "\nsignals1 = c\nsignals2 = d\n[payoff]\n";
  for (int i = 0; i < actions; ++i)
    for (int j = 0; j < actions; ++j) s << "k a" << i << " b" << j << " = " << c << "\n";
  s << "[transition]\n";
  for (int i = 0; i < actions; ++i)
    for (int j = 0; j < actions; ++j) s << "k a" << i << " b" << j << " -> k c d : 1\n";
  s << "[initial]\nk c d : 1\n";
  return s.str();
}

// Player 1 always sees the fresh uniform state. Player 2 sees it after L and sees nothing after R.
inline std::string a3_violating_text() {
  return "[game]\nstates = k1 k2\nactions1 = T\nactions2 = L R\n"
         "signals1 = k1x k2x k1y k2y\nsignals2 = x1 x2 y\n"
         "[payoff]\nk1 T L = 1\nk1 T R = 0\nk2 T L = 0\nk2 T R = 1\n"
         "[transition]\n"
         "k1 T L -> k1 k1x x1 : 1/2\nk1 T L -> k2 k2x x2 : 1/2\n"
         "k2 T L -> k1 k1x x1 : 1/2\nk2 T L -> k2 k2x x2 : 1/2\n"
         "k1 T R -> k1 k1y y : 1/2\nk1 T R -> k2 k2y y : 1/2\n"
         "k2 T R -> k1 k1y y : 1/2\nk2 T R -> k2 k2y y : 1/2\n"
         "[initial]\nk1 c d : 1/2\nk2 c d : 1/2\n";
}

}  // namespace rgtest
