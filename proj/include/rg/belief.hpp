#pragma once

#include <vector>

#include "rg/audit.hpp"
#include "rg/game.hpp"

namespace rg {

BeliefPoint first_order_update(const FirstOrderKernel& f, const BeliefPoint& x, int i, int c);

// x1(c') = L(k | c') for every initial signal-1 label with positive mass.
std::vector<BeliefPoint> first_order_table(const InitialLaw& pi, int num_states);
// y1(d') = sum_c' pi(c' | d') delta_{x1(c')} for every signal-2 label with positive mass.
std::vector<BeliefAtomLaw> second_order_table(const InitialLaw& pi, int num_states);

struct HierarchyTriple {
  std::vector<BeliefPoint> x1;    // by c'
  std::vector<BeliefAtomLaw> y1;  // by d', normalized
  std::vector<Rational> d_mass;   // pi(d'): the total of the unnormalized y1(d')
  HierarchyLaw eta;
};

// Requires A1a; throws PreconditionError with the witness otherwise.
HierarchyTriple initial_hierarchy(const InitialLaw& pi, int num_states);
HierarchyLaw phi(const InitialLaw& pi, int num_states);

// pi(k, (p, z), z) = eta(z) z(p) p(k). Labels are the printed beliefs.
InitialLaw canonical_game(const HierarchyLaw& eta);

struct JointAtom {
  int k2 = 0;
  BeliefPoint p;  // updated belief F(p, i1, c2)
  int i1 = 0;
  int c2 = 0;
  int j1 = 0;
  int d2 = 0;
  Rational mass;
};

struct JointStageLaw {
  std::vector<JointAtom> atoms;
  Rational total() const;
};

JointStageLaw joint_after_stage(const GameSpec& spec, const FirstOrderKernel& f,
                                const BeliefAtomLaw& z, const AuxAction& a,
                                const std::vector<Rational>& b);

struct Disintegration {
  struct Part {
    int j1 = 0;
    int d2 = 0;
    Rational mass;
    BeliefAtomLaw conditional;
  };
  std::vector<Part> parts;  // positive-mass player-2 atoms in (j1, d2) order
  HierarchyLaw law;
};

Disintegration disintegrate(const JointStageLaw& q);

// l(z, a): computed for every pure j and required to agree exactly; throws BDependenceError.
HierarchyLaw aux_transition(const GameSpec& spec, const FirstOrderKernel& f, const BeliefAtomLaw& z,
                            const AuxAction& a);

// Conditional law of the updated beliefs given player 2's new signal d2 after his action j,
// or nullopt when (j, d2) has zero mass.
std::optional<BeliefAtomLaw> updated_second_order(const GameSpec& spec, const FirstOrderKernel& f,
                                                  const BeliefAtomLaw& y, const AuxAction& a,
                                                  int j, int d2);

}  // namespace rg
