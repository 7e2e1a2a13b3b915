#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "rg/rational.hpp"

namespace rg {

struct TransitionAtom {
  int next = 0;
  int c = 0;
  int d = 0;
  Rational mass;
};

// Finite repeated game (K, I, J, C, D, g, q).
struct GameSpec {
  std::vector<std::string> states;
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;
  std::vector<std::string> signals1;
  std::vector<std::string> signals2;
  std::vector<Rational> payoffs;                       // indexed by cell(k, i, j)
  std::vector<std::vector<TransitionAtom>> transitions;  // indexed by cell(k, i, j)

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions1() const { return static_cast<int>(actions1.size()); }
  int num_actions2() const { return static_cast<int>(actions2.size()); }
  int num_signals1() const { return static_cast<int>(signals1.size()); }
  int num_signals2() const { return static_cast<int>(signals2.size()); }

  std::size_t cell(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * actions1.size() + static_cast<std::size_t>(i)) *
               actions2.size() +
           static_cast<std::size_t>(j);
  }
  const Rational& payoff(int k, int i, int j) const { return payoffs[cell(k, i, j)]; }
  const std::vector<TransitionAtom>& transition(int k, int i, int j) const {
    return transitions[cell(k, i, j)];
  }

  // Sizes the tables for the declared alphabets (payoffs 0, rows empty).
  void allocate();
  // Sorts and merges transition atoms; drops zero atoms.
  void canonicalize();
  // Throws ValidationError on any broken invariant.
  void validate() const;
  bool payoffs_in_unit_interval() const;
  Rational min_payoff() const;
  Rational max_payoff() const;

  int state_index(const std::string& label) const;
  int action1_index(const std::string& label) const;
  int action2_index(const std::string& label) const;
  int signal1_index(const std::string& label) const;
  int signal2_index(const std::string& label) const;
};

struct InitialAtom {
  int k = 0;
  int c = 0;
  int d = 0;
  Rational mass;
};

// Finitely supported law over state x initial signal 1 x initial signal 2.
struct InitialLaw {
  std::string name;
  std::vector<std::string> signals1;
  std::vector<std::string> signals2;
  std::vector<InitialAtom> atoms;

  // Sorts atoms by (k, c, d); labels keep their order.
  void canonicalize();
  void validate(int num_states) const;
  Rational mass_c(int c) const;
  Rational mass_d(int d) const;
};

// Parsed file: one game and one or more named initial laws.
struct GameDocument {
  GameSpec spec;
  std::vector<InitialLaw> initials;

  const InitialLaw& initial(const std::string& name) const;
};

struct BeliefPoint {
  std::vector<Rational> probs;

  int size() const { return static_cast<int>(probs.size()); }
  void validate() const;
  static BeliefPoint uniform(int n);
  static BeliefPoint dirac(int n, int k);
};

bool operator==(const BeliefPoint& a, const BeliefPoint& b);
bool operator<(const BeliefPoint& a, const BeliefPoint& b);
inline bool operator!=(const BeliefPoint& a, const BeliefPoint& b) { return !(a == b); }

// Normalizes a nonnegative vector with positive total.
BeliefPoint normalized_point(const std::vector<Rational>& weights);

template <class T>
using Atoms = std::vector<std::pair<T, Rational>>;

// Sorts, merges equal supports and drops zero masses.
template <class T>
Atoms<T> canonical_atoms(Atoms<T> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Atoms<T> out;
  for (auto& atom : atoms) {
    if (!out.empty() && out.back().first == atom.first) {
      out.back().second += atom.second;
    } else {
      out.push_back(std::move(atom));
    }
  }
  std::erase_if(out, [](const auto& a) { return sgn(a.second) == 0; });
  return out;
}

template <class T>
bool atoms_equal(const Atoms<T>& a, const Atoms<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].first == b[i].first) || a[i].second != b[i].second) return false;
  }
  return true;
}

template <class T>
bool atoms_less(const Atoms<T>& a, const Atoms<T>& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].first < b[i].first) return true;
    if (b[i].first < a[i].first) return false;
    if (a[i].second != b[i].second) return a[i].second < b[i].second;
  }
  return a.size() < b.size();
}

// z in the finitely supported laws over beliefs.
struct BeliefAtomLaw {
  Atoms<BeliefPoint> atoms;

  static BeliefAtomLaw make(Atoms<BeliefPoint> atoms);
  // Divides by the total mass, which must be positive.
  static BeliefAtomLaw normalized(Atoms<BeliefPoint> atoms);
  static BeliefAtomLaw dirac(const BeliefPoint& p);
  void validate() const;
  int dimension() const { return atoms.empty() ? 0 : atoms.front().first.size(); }
  BeliefPoint mean() const;
  Rational mass_of(const BeliefPoint& p) const;
};

bool operator==(const BeliefAtomLaw& a, const BeliefAtomLaw& b);
bool operator<(const BeliefAtomLaw& a, const BeliefAtomLaw& b);

// Convex combination sum_s w_s z_s of belief-atom laws.
BeliefAtomLaw mix(const std::vector<std::pair<BeliefAtomLaw, Rational>>& parts);

// eta in the finitely supported laws over belief-atom laws.
struct HierarchyLaw {
  Atoms<BeliefAtomLaw> atoms;

  static HierarchyLaw make(Atoms<BeliefAtomLaw> atoms);
  static HierarchyLaw normalized(Atoms<BeliefAtomLaw> atoms);
  static HierarchyLaw dirac(const BeliefAtomLaw& z);
  void validate() const;
  // The mixture sum_z eta(z) z.
  BeliefAtomLaw barycenter() const;
};

bool operator==(const HierarchyLaw& a, const HierarchyLaw& b);
bool operator<(const HierarchyLaw& a, const HierarchyLaw& b);

HierarchyLaw mix(const std::vector<std::pair<HierarchyLaw, Rational>>& parts);

std::string to_string(const BeliefPoint& p);
std::string to_string(const BeliefAtomLaw& z);
std::string to_string(const HierarchyLaw& eta);

// Parses the z-file format: one "mass : p_1 p_2 ... p_K" atom per line.
BeliefAtomLaw parse_belief_atom_law(const std::string& text);

struct Evaluation {
  std::vector<Rational> weights;

  int horizon() const { return static_cast<int>(weights.size()); }
  // Index of the last stage with positive weight, plus one.
  int effective_horizon() const;
  void validate() const;
  static Evaluation uniform(int n);
  // Zero on stages 1..m, 1/n on stages m+1..m+n.
  static Evaluation window(int m, int n);
  // Parses "w1,w2,...".
  static Evaluation parse(const std::string& text);
};

bool operator==(const Evaluation& a, const Evaluation& b);
std::string to_string(const Evaluation& theta);

Evaluation evaluation_tail(const Evaluation& theta);

GameDocument parse_game_document(const std::string& text);
std::pair<GameSpec, InitialLaw> parse_game_spec(const std::string& text);
GameDocument load_game_document(const std::string& path);

// Canonical text form; parse_game_document reads it back to the same objects.
std::string serialize_game(const GameSpec& spec, const std::vector<InitialLaw>& initials);
std::string spec_digest(const GameSpec& spec, const InitialLaw& pi);

Rational stage_payoff_extended(const GameSpec& spec, const BeliefPoint& p, int i, int j);

// One mixed action over I per atom of a belief-atom law.
struct AuxAction {
  std::vector<std::pair<BeliefPoint, std::vector<Rational>>> rules;

  // Throws ValidationError when no rule is listed for p.
  const std::vector<Rational>& rule(const BeliefPoint& p) const;
  bool covers(const BeliefAtomLaw& z) const;
  void validate(int num_actions) const;
  static AuxAction uniform(const BeliefAtomLaw& z, int num_actions);
  static AuxAction pure(const BeliefAtomLaw& z, int num_actions, int i);
};

std::string to_string(const AuxAction& a);
Rational stage_payoff_extended(const GameSpec& spec, const BeliefPoint& p, const std::string& i,
                               const std::string& j);

}  // namespace rg
