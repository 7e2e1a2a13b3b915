#pragma once

#include <vector>

#include "rg/game.hpp"
#include "rg/lp.hpp"

namespace rg {

using Matrix = std::vector<std::vector<Rational>>;

struct GameValueResult {
  Rational value;
  std::vector<Rational> strategy1;  // over rows
  std::vector<Rational> strategy2;  // over columns
  std::vector<Rational> certificate;
};

// Row player maximizes.
GameValueResult matrix_game(const Matrix& m);

struct ProfileGameResult {
  Rational value;
  AuxAction action;
  std::vector<Rational> response;  // over J
  std::vector<Rational> certificate;
};

// sup_a min_b G(z, a, b) as one LP over the rule weights a(p, i).
ProfileGameResult profile_stage_game(const GameSpec& spec, const BeliefAtomLaw& z);

// G(z, a, b) = sum_p z(p) sum_{i,j} a(p,i) b(j) g(p,i,j).
Rational aux_payoff(const GameSpec& spec, const BeliefAtomLaw& z, const AuxAction& a,
                    const std::vector<Rational>& b);
// min over pure j of G(z, a, j).
Rational aux_payoff_min(const GameSpec& spec, const BeliefAtomLaw& z, const AuxAction& a);

Rational l1_distance(const BeliefPoint& p, const BeliefPoint& q);

struct TransportResult {
  Rational distance;
  Matrix coupling;  // rows index atoms of the first law
};

TransportResult wasserstein_distance(const BeliefAtomLaw& z, const BeliefAtomLaw& zp);

// Finitely supported law on a common finite-dimensional affine space.
using PointLaw = std::vector<std::pair<std::vector<Rational>, Rational>>;

struct AffinePiece {
  Rational constant;
  std::vector<Rational> slope;
};

struct ChoquetResult {
  bool holds = false;
  // When holds: joint masses over (nu atom, mu atom).
  Matrix kernel;
  // When not: concave f = min of the pieces with  int f dmu - int f dnu = gap > 0.
  std::vector<AffinePiece> witness;
  Rational gap;
};

// mu <= nu in the reversed Choquet order: nu splits into mu by a barycenter-preserving kernel.
ChoquetResult choquet_leq(const PointLaw& mu, const PointLaw& nu);
ChoquetResult choquet_leq(const BeliefAtomLaw& mu, const BeliefAtomLaw& nu);
// Belief-atom laws are embedded as mass vectors over the union of both supports.
ChoquetResult choquet_leq(const HierarchyLaw& mu, const HierarchyLaw& nu);

Rational evaluate_concave(const std::vector<AffinePiece>& pieces, const std::vector<Rational>& x);

}  // namespace rg
