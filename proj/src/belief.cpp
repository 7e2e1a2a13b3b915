#include "rg/belief.hpp"

#include <map>
#include <tuple>

#include "rg/errors.hpp"

namespace rg {

BeliefPoint first_order_update(const FirstOrderKernel& f, const BeliefPoint& x, int i, int c) {
  return f.apply(x, i, c);
}

std::vector<BeliefPoint> first_order_table(const InitialLaw& pi, int num_states) {
  std::vector<std::vector<Rational>> w(pi.signals1.size(),
                                       std::vector<Rational>(num_states, Rational(0)));
  for (const auto& a : pi.atoms) w[a.c][a.k] += a.mass;
  std::vector<BeliefPoint> x1;
  for (const auto& row : w) {
    x1.push_back(is_positive(sum(row)) ? normalized_point(row) : BeliefPoint::uniform(num_states));
  }
  return x1;
}

std::vector<BeliefAtomLaw> second_order_table(const InitialLaw& pi, int num_states) {
  auto x1 = first_order_table(pi, num_states);
  std::vector<Atoms<BeliefPoint>> parts(pi.signals2.size());
  for (const auto& a : pi.atoms) parts[a.d].emplace_back(x1[a.c], a.mass);
  std::vector<BeliefAtomLaw> y1;
  for (auto& part : parts) {
    y1.push_back(part.empty() ? BeliefAtomLaw{} : BeliefAtomLaw::normalized(std::move(part)));
  }
  return y1;
}

HierarchyTriple initial_hierarchy(const InitialLaw& pi, int num_states) {
  A1aResult a1a = check_a1a(pi);
  if (!a1a.pass) {
    throw PreconditionError("A1a fails at (k=" + std::to_string(a1a.k) + ", c'=" +
                            pi.signals1[a1a.c] + ", d'=" + pi.signals2[a1a.d] + ")");
  }
  HierarchyTriple t;
  t.x1 = first_order_table(pi, num_states);
  t.y1 = second_order_table(pi, num_states);
  Atoms<BeliefAtomLaw> eta;
  for (std::size_t d = 0; d < pi.signals2.size(); ++d) {
    t.d_mass.push_back(pi.mass_d(static_cast<int>(d)));
    if (is_positive(t.d_mass.back())) eta.emplace_back(t.y1[d], t.d_mass.back());
  }
  t.eta = HierarchyLaw::make(std::move(eta));
  return t;
}

HierarchyLaw phi(const InitialLaw& pi, int num_states) {
  return initial_hierarchy(pi, num_states).eta;
}

namespace {

std::string compact(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch != ' ') out += ch;
  }
  return out;
}

}  // namespace

InitialLaw canonical_game(const HierarchyLaw& eta) {
  eta.validate();
  InitialLaw pi;
  pi.name = "canonical";
  for (std::size_t zi = 0; zi < eta.atoms.size(); ++zi) {
    const auto& [z, wz] = eta.atoms[zi];
    pi.signals2.push_back(compact(to_string(z)));
    for (const auto& [p, wp] : z.atoms) {
      int c = static_cast<int>(pi.signals1.size());
      pi.signals1.push_back(compact(to_string(p)) + "|" + pi.signals2.back());
      for (int k = 0; k < p.size(); ++k) {
        Rational m = wz * wp * p.probs[k];
        if (is_positive(m)) pi.atoms.push_back(InitialAtom{k, c, static_cast<int>(zi), m});
      }
    }
  }
  pi.canonicalize();
  return pi;
}

Rational JointStageLaw::total() const {
  Rational t = 0;
  for (const auto& a : atoms) t += a.mass;
  return t;
}

JointStageLaw joint_after_stage(const GameSpec& spec, const FirstOrderKernel& f,
                                const BeliefAtomLaw& z, const AuxAction& a,
                                const std::vector<Rational>& b) {
  using Key = std::tuple<int, BeliefPoint, int, int, int, int>;
  std::map<Key, Rational> grouped;
  for (const auto& [p, wp] : z.atoms) {
    const auto& rule = a.rule(p);
    std::map<std::pair<int, int>, BeliefPoint> updated;
    for (int k = 0; k < spec.num_states(); ++k) {
      if (is_zero(p.probs[k])) continue;
      for (int i = 0; i < spec.num_actions1(); ++i) {
        if (is_zero(rule[i])) continue;
        for (int j = 0; j < spec.num_actions2(); ++j) {
          if (is_zero(b[j])) continue;
          Rational base = wp * p.probs[k] * rule[i] * b[j];
          for (const auto& atom : spec.transition(k, i, j)) {
            auto it = updated.find({i, atom.c});
            if (it == updated.end()) it = updated.emplace(std::pair{i, atom.c}, f.apply(p, i, atom.c)).first;
            grouped[Key{atom.next, it->second, i, atom.c, j, atom.d}] += base * atom.mass;
          }
        }
      }
    }
  }
  JointStageLaw q;
  for (auto& [key, m] : grouped) {
    auto& [k2, pp, i1, c2, j1, d2] = key;
    q.atoms.push_back(JointAtom{k2, pp, i1, c2, j1, d2, m});
  }
  return q;
}

Disintegration disintegrate(const JointStageLaw& q) {
  std::map<std::pair<int, int>, Atoms<BeliefPoint>> parts;
  for (const auto& a : q.atoms) parts[{a.j1, a.d2}].emplace_back(a.p, a.mass);
  Disintegration out;
  Atoms<BeliefAtomLaw> law;
  for (auto& [key, atoms] : parts) {
    Rational mass = 0;
    for (const auto& at : atoms) mass += at.second;
    if (!is_positive(mass)) continue;
    auto cond = BeliefAtomLaw::normalized(std::move(atoms));
    out.parts.push_back(Disintegration::Part{key.first, key.second, mass, cond});
    law.emplace_back(cond, mass);
  }
  out.law = HierarchyLaw::make(std::move(law));
  return out;
}

HierarchyLaw aux_transition(const GameSpec& spec, const FirstOrderKernel& f, const BeliefAtomLaw& z,
                            const AuxAction& a) {
  if (!a.covers(z)) throw ValidationError("aux action does not cover the support of z");
  HierarchyLaw first;
  for (int j = 0; j < spec.num_actions2(); ++j) {
    std::vector<Rational> b(static_cast<std::size_t>(spec.num_actions2()), Rational(0));
    b[j] = 1;
    HierarchyLaw law = disintegrate(joint_after_stage(spec, f, z, a, b)).law;
    if (j == 0) {
      first = std::move(law);
    } else if (!(law == first)) {
      throw BDependenceError("auxiliary transition depends on player 2's action (" +
                                 spec.actions2[0] + " vs " + spec.actions2[j] + ")",
                             to_string(first), to_string(law));
    }
  }
  return first;
}

std::optional<BeliefAtomLaw> updated_second_order(const GameSpec& spec, const FirstOrderKernel& f,
                                                  const BeliefAtomLaw& y, const AuxAction& a,
                                                  int j, int d2) {
  std::vector<Rational> b(static_cast<std::size_t>(spec.num_actions2()), Rational(0));
  b[j] = 1;
  for (const auto& part : disintegrate(joint_after_stage(spec, f, y, a, b)).parts) {
    if (part.j1 == j && part.d2 == d2) return part.conditional;
  }
  return std::nullopt;
}

}  // namespace rg
