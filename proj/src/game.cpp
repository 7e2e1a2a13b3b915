#include "rg/game.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rg/errors.hpp"

namespace rg {

namespace {

int find_label(const std::vector<std::string>& labels, const std::string& label,
               const char* what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  throw ValidationError(std::string("unknown ") + what + " '" + label + "'");
}

void check_alphabet(const std::vector<std::string>& labels, const char* what) {
  if (labels.empty()) throw ValidationError(std::string("empty alphabet: ") + what);
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) {
    throw ValidationError(std::string("duplicate label in ") + what);
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string cell_name(const GameSpec& spec, int k, int i, int j) {
  return "(" + spec.states[k] + "," + spec.actions1[i] + "," + spec.actions2[j] + ")";
}

}  // namespace

void GameSpec::allocate() {
  std::size_t cells = states.size() * actions1.size() * actions2.size();
  payoffs.assign(cells, Rational(0));
  transitions.assign(cells, {});
}

void GameSpec::canonicalize() {
  for (auto& row : transitions) {
    std::sort(row.begin(), row.end(), [](const TransitionAtom& a, const TransitionAtom& b) {
      return std::tie(a.next, a.c, a.d) < std::tie(b.next, b.c, b.d);
    });
    std::vector<TransitionAtom> merged;
    for (auto& atom : row) {
      if (!merged.empty() && merged.back().next == atom.next && merged.back().c == atom.c &&
          merged.back().d == atom.d) {
        merged.back().mass += atom.mass;
      } else {
        merged.push_back(atom);
      }
    }
    std::erase_if(merged, [](const TransitionAtom& a) { return is_zero(a.mass); });
    row = std::move(merged);
  }
}

void GameSpec::validate() const {
  check_alphabet(states, "states");
  check_alphabet(actions1, "actions1");
  check_alphabet(actions2, "actions2");
  check_alphabet(signals1, "signals1");
  check_alphabet(signals2, "signals2");
  std::size_t cells = states.size() * actions1.size() * actions2.size();
  if (payoffs.size() != cells || transitions.size() != cells) {
    throw ValidationError("payoff or transition table has the wrong size");
  }
  for (int k = 0; k < num_states(); ++k) {
    for (int i = 0; i < num_actions1(); ++i) {
      for (int j = 0; j < num_actions2(); ++j) {
        Rational total = 0;
        for (const auto& atom : transition(k, i, j)) {
          if (atom.next < 0 || atom.next >= num_states() || atom.c < 0 ||
              atom.c >= num_signals1() || atom.d < 0 || atom.d >= num_signals2()) {
            throw ValidationError("transition row " + cell_name(*this, k, i, j) +
                                  " has an out-of-range atom");
          }
          if (sgn(atom.mass) < 0) {
            throw ValidationError("transition row " + cell_name(*this, k, i, j) +
                                  " has a negative mass " + to_string(atom.mass));
          }
          total += atom.mass;
        }
        if (total != 1) {
          throw ValidationError("transition row " + cell_name(*this, k, i, j) + " sums to " +
                                to_string(total) + ", not 1");
        }
      }
    }
  }
}

bool GameSpec::payoffs_in_unit_interval() const {
  for (const auto& g : payoffs) {
    if (sgn(g) < 0 || g > 1) return false;
  }
  return true;
}

Rational GameSpec::min_payoff() const { return *std::min_element(payoffs.begin(), payoffs.end()); }
Rational GameSpec::max_payoff() const { return *std::max_element(payoffs.begin(), payoffs.end()); }

int GameSpec::state_index(const std::string& l) const { return find_label(states, l, "state"); }
int GameSpec::action1_index(const std::string& l) const {
  return find_label(actions1, l, "action1");
}
int GameSpec::action2_index(const std::string& l) const {
  return find_label(actions2, l, "action2");
}
int GameSpec::signal1_index(const std::string& l) const {
  return find_label(signals1, l, "signal1");
}
int GameSpec::signal2_index(const std::string& l) const {
  return find_label(signals2, l, "signal2");
}

void InitialLaw::canonicalize() {
  std::sort(atoms.begin(), atoms.end(), [](const InitialAtom& a, const InitialAtom& b) {
    return std::tie(a.k, a.c, a.d) < std::tie(b.k, b.c, b.d);
  });
}

void InitialLaw::validate(int num_states) const {
  if (atoms.empty()) throw ValidationError("initial law '" + name + "' is empty");
  Rational total = 0;
  std::set<std::tuple<int, int, int>> seen;
  for (const auto& a : atoms) {
    if (a.k < 0 || a.k >= num_states || a.c < 0 || a.c >= static_cast<int>(signals1.size()) ||
        a.d < 0 || a.d >= static_cast<int>(signals2.size())) {
      throw ValidationError("initial law '" + name + "' has an out-of-range atom");
    }
    if (sgn(a.mass) <= 0) {
      throw ValidationError("initial law '" + name + "' has a nonpositive mass " +
                            to_string(a.mass));
    }
    if (!seen.insert({a.k, a.c, a.d}).second) {
      throw ValidationError("initial law '" + name + "' has a duplicate atom (" +
                            std::to_string(a.k) + "," + signals1[a.c] + "," + signals2[a.d] +
                            ")");
    }
    total += a.mass;
  }
  if (total != 1) {
    throw ValidationError("initial law '" + name + "' sums to " + to_string(total) + ", not 1");
  }
}

Rational InitialLaw::mass_c(int c) const {
  Rational m = 0;
  for (const auto& a : atoms) {
    if (a.c == c) m += a.mass;
  }
  return m;
}

Rational InitialLaw::mass_d(int d) const {
  Rational m = 0;
  for (const auto& a : atoms) {
    if (a.d == d) m += a.mass;
  }
  return m;
}

const InitialLaw& GameDocument::initial(const std::string& name) const {
  for (const auto& pi : initials) {
    if (pi.name == name) return pi;
  }
  throw ValidationError("no initial law named '" + name + "'");
}

void BeliefPoint::validate() const {
  Rational total = 0;
  for (const auto& p : probs) {
    if (sgn(p) < 0) throw ValidationError("belief has a negative entry");
    total += p;
  }
  if (total != 1) throw ValidationError("belief sums to " + to_string(total));
}

BeliefPoint BeliefPoint::uniform(int n) {
  return BeliefPoint{std::vector<Rational>(static_cast<std::size_t>(n), Rational(1, n))};
}

BeliefPoint BeliefPoint::dirac(int n, int k) {
  BeliefPoint p{std::vector<Rational>(static_cast<std::size_t>(n), Rational(0))};
  p.probs[static_cast<std::size_t>(k)] = 1;
  return p;
}

bool operator==(const BeliefPoint& a, const BeliefPoint& b) { return a.probs == b.probs; }

bool operator<(const BeliefPoint& a, const BeliefPoint& b) {
  return std::lexicographical_compare(a.probs.begin(), a.probs.end(), b.probs.begin(),
                                      b.probs.end());
}

BeliefPoint normalized_point(const std::vector<Rational>& weights) {
  Rational total = sum(weights);
  if (sgn(total) <= 0) throw ValidationError("cannot normalize a zero vector");
  BeliefPoint p{weights};
  for (auto& v : p.probs) v /= total;
  return p;
}

BeliefAtomLaw BeliefAtomLaw::make(Atoms<BeliefPoint> atoms) {
  return BeliefAtomLaw{canonical_atoms(std::move(atoms))};
}

BeliefAtomLaw BeliefAtomLaw::normalized(Atoms<BeliefPoint> atoms) {
  Rational total = 0;
  for (const auto& a : atoms) total += a.second;
  if (sgn(total) <= 0) throw ValidationError("cannot normalize a zero measure");
  for (auto& a : atoms) a.second /= total;
  return make(std::move(atoms));
}

BeliefAtomLaw BeliefAtomLaw::dirac(const BeliefPoint& p) { return BeliefAtomLaw{{{p, 1}}}; }

void BeliefAtomLaw::validate() const {
  if (atoms.empty()) throw ValidationError("empty belief-atom law");
  Rational total = 0;
  for (std::size_t s = 0; s < atoms.size(); ++s) {
    atoms[s].first.validate();
    if (sgn(atoms[s].second) <= 0) throw ValidationError("nonpositive atom mass");
    if (s && !(atoms[s - 1].first < atoms[s].first)) {
      throw ValidationError("belief-atom law is not canonical");
    }
    if (atoms[s].first.size() != atoms[0].first.size()) {
      throw ValidationError("belief-atom law mixes dimensions");
    }
    total += atoms[s].second;
  }
  if (total != 1) throw ValidationError("belief-atom law sums to " + to_string(total));
}

BeliefPoint BeliefAtomLaw::mean() const {
  std::vector<Rational> m(static_cast<std::size_t>(dimension()), Rational(0));
  for (const auto& [p, w] : atoms) {
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += w * p.probs[k];
  }
  return BeliefPoint{m};
}

Rational BeliefAtomLaw::mass_of(const BeliefPoint& p) const {
  for (const auto& a : atoms) {
    if (a.first == p) return a.second;
  }
  return 0;
}

bool operator==(const BeliefAtomLaw& a, const BeliefAtomLaw& b) {
  return atoms_equal(a.atoms, b.atoms);
}
bool operator<(const BeliefAtomLaw& a, const BeliefAtomLaw& b) {
  return atoms_less(a.atoms, b.atoms);
}

BeliefAtomLaw mix(const std::vector<std::pair<BeliefAtomLaw, Rational>>& parts) {
  Atoms<BeliefPoint> all;
  for (const auto& [z, w] : parts) {
    for (const auto& [p, m] : z.atoms) all.emplace_back(p, w * m);
  }
  return BeliefAtomLaw::make(std::move(all));
}

HierarchyLaw HierarchyLaw::make(Atoms<BeliefAtomLaw> atoms) {
  return HierarchyLaw{canonical_atoms(std::move(atoms))};
}

HierarchyLaw HierarchyLaw::normalized(Atoms<BeliefAtomLaw> atoms) {
  Rational total = 0;
  for (const auto& a : atoms) total += a.second;
  if (sgn(total) <= 0) throw ValidationError("cannot normalize a zero measure");
  for (auto& a : atoms) a.second /= total;
  return make(std::move(atoms));
}

HierarchyLaw HierarchyLaw::dirac(const BeliefAtomLaw& z) { return HierarchyLaw{{{z, 1}}}; }

void HierarchyLaw::validate() const {
  if (atoms.empty()) throw ValidationError("empty hierarchy law");
  Rational total = 0;
  for (std::size_t s = 0; s < atoms.size(); ++s) {
    atoms[s].first.validate();
    if (sgn(atoms[s].second) <= 0) throw ValidationError("nonpositive atom mass");
    if (s && !(atoms[s - 1].first < atoms[s].first)) {
      throw ValidationError("hierarchy law is not canonical");
    }
    total += atoms[s].second;
  }
  if (total != 1) throw ValidationError("hierarchy law sums to " + to_string(total));
}

BeliefAtomLaw HierarchyLaw::barycenter() const {
  std::vector<std::pair<BeliefAtomLaw, Rational>> parts(atoms.begin(), atoms.end());
  return mix(parts);
}

bool operator==(const HierarchyLaw& a, const HierarchyLaw& b) {
  return atoms_equal(a.atoms, b.atoms);
}
bool operator<(const HierarchyLaw& a, const HierarchyLaw& b) {
  return atoms_less(a.atoms, b.atoms);
}

HierarchyLaw mix(const std::vector<std::pair<HierarchyLaw, Rational>>& parts) {
  Atoms<BeliefAtomLaw> all;
  for (const auto& [eta, w] : parts) {
    for (const auto& [z, m] : eta.atoms) all.emplace_back(z, w * m);
  }
  return HierarchyLaw::make(std::move(all));
}

std::string to_string(const BeliefPoint& p) { return "(" + join_rationals(p.probs, ",") + ")"; }

std::string to_string(const BeliefAtomLaw& z) {
  std::string out = "{";
  for (std::size_t s = 0; s < z.atoms.size(); ++s) {
    if (s) out += "; ";
    out += to_string(z.atoms[s].second) + "@" + to_string(z.atoms[s].first);
  }
  return out + "}";
}

std::string to_string(const HierarchyLaw& eta) {
  std::string out = "[";
  for (std::size_t s = 0; s < eta.atoms.size(); ++s) {
    if (s) out += "; ";
    out += to_string(eta.atoms[s].second) + "@" + to_string(eta.atoms[s].first);
  }
  return out + "]";
}

BeliefAtomLaw parse_belief_atom_law(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  Atoms<BeliefPoint> atoms;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(line_no, "expected 'mass : p_1 ... p_K'");
    try {
      Rational mass = parse_rational(trim(line.substr(0, colon)));
      BeliefPoint p;
      for (const auto& tok : split_ws(line.substr(colon + 1))) p.probs.push_back(parse_rational(tok));
      p.validate();
      if (!atoms.empty() && atoms.front().first.size() != p.size()) {
        throw ValidationError("dimension mismatch");
      }
      atoms.emplace_back(p, mass);
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  auto z = BeliefAtomLaw::make(std::move(atoms));
  z.validate();
  return z;
}

int Evaluation::effective_horizon() const {
  int last = 0;
  for (int t = 0; t < horizon(); ++t) {
    if (is_positive(weights[static_cast<std::size_t>(t)])) last = t + 1;
  }
  return last;
}

void Evaluation::validate() const {
  if (weights.empty()) throw ValidationError("evaluation has no stages");
  Rational total = 0;
  for (const auto& w : weights) {
    if (sgn(w) < 0) throw ValidationError("evaluation has a negative weight");
    total += w;
  }
  if (total != 1) throw ValidationError("evaluation sums to " + to_string(total));
}

Evaluation Evaluation::uniform(int n) {
  return Evaluation{std::vector<Rational>(static_cast<std::size_t>(n), Rational(1, n))};
}

Evaluation Evaluation::window(int m, int n) {
  Evaluation theta{std::vector<Rational>(static_cast<std::size_t>(m), Rational(0))};
  for (int t = 0; t < n; ++t) theta.weights.emplace_back(1, n);
  return theta;
}

Evaluation Evaluation::parse(const std::string& text) {
  Evaluation theta;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw ValidationError("empty weight in '" + text + "'");
    try {
      theta.weights.push_back(parse_rational(tok));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
  }
  theta.validate();
  return theta;
}

bool operator==(const Evaluation& a, const Evaluation& b) { return a.weights == b.weights; }

std::string to_string(const Evaluation& theta) {
  return "(" + join_rationals(theta.weights, ",") + ")";
}

Evaluation evaluation_tail(const Evaluation& theta) {
  Rational rest = 0;
  for (std::size_t t = 1; t < theta.weights.size(); ++t) rest += theta.weights[t];
  if (is_zero(rest)) return Evaluation{{Rational(1)}};
  Evaluation tail;
  for (std::size_t t = 1; t < theta.weights.size(); ++t) {
    tail.weights.push_back(theta.weights[t] / rest);
  }
  return tail;
}

GameDocument parse_game_document(const std::string& text) {
  GameDocument doc;
  GameSpec& spec = doc.spec;
  enum class Section { None, Game, Payoff, Transition, Initial };
  Section section = Section::None;
  std::map<std::string, std::vector<std::string>> game_keys;
  bool allocated = false;
  std::set<std::size_t> payoff_seen;
  std::set<std::tuple<std::size_t, int, int, int>> transition_seen;
  // Inline labels are collected by name, then sorted once the section ends.
  struct RawInitial {
    int line;
    int k;
    std::string c, d;
    Rational mass;
  };
  std::vector<std::vector<RawInitial>> raw_initials;
  std::set<std::string> initial_names;

  auto ensure_game = [&](int line_no) {
    if (allocated) return;
    static const char* keys[] = {"states", "actions1", "actions2", "signals1", "signals2"};
    for (const char* key : keys) {
      if (!game_keys.count(key)) {
        throw ParseError(line_no, std::string("[game] is missing '") + key + "'");
      }
    }
    spec.states = game_keys["states"];
    spec.actions1 = game_keys["actions1"];
    spec.actions2 = game_keys["actions2"];
    spec.signals1 = game_keys["signals1"];
    spec.signals2 = game_keys["signals2"];
    try {
      check_alphabet(spec.states, "states");
      check_alphabet(spec.actions1, "actions1");
      check_alphabet(spec.actions2, "actions2");
      check_alphabet(spec.signals1, "signals1");
      check_alphabet(spec.signals2, "signals2");
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
    spec.allocate();
    allocated = true;
  };

  auto lookup = [&](int line_no, auto fn, const std::string& label) {
    try {
      return (spec.*fn)(label);
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  };
  auto rational = [&](int line_no, const std::string& tok) {
    try {
      return parse_rational(tok);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "malformed section header");
      auto parts = split_ws(line.substr(1, line.size() - 2));
      if (parts.empty()) throw ParseError(line_no, "empty section header");
      const std::string& name = parts[0];
      if (name != "game" && name != "initial" && parts.size() != 1) {
        throw ParseError(line_no, "unexpected words after section name");
      }
      if (name == "game") {
        section = Section::Game;
      } else if (name == "payoff") {
        ensure_game(line_no);
        section = Section::Payoff;
      } else if (name == "transition") {
        ensure_game(line_no);
        section = Section::Transition;
      } else if (name == "initial") {
        ensure_game(line_no);
        if (parts.size() > 2) throw ParseError(line_no, "initial section takes one name");
        std::string law_name = parts.size() == 2 ? parts[1] : "pi";
        if (!initial_names.insert(law_name).second) {
          throw ParseError(line_no, "duplicate initial law '" + law_name + "'");
        }
        doc.initials.push_back(InitialLaw{law_name, {}, {}, {}});
        raw_initials.emplace_back();
        section = Section::Initial;
      } else {
        throw ParseError(line_no, "unknown section [" + name + "]");
      }
      continue;
    }
    switch (section) {
      case Section::None:
        throw ParseError(line_no, "content before any section");
      case Section::Game: {
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = labels'");
        std::string key = trim(line.substr(0, eq));
        static const std::set<std::string> known = {"states", "actions1", "actions2", "signals1",
                                                    "signals2"};
        if (!known.count(key)) throw ParseError(line_no, "unknown [game] key '" + key + "'");
        if (allocated) throw ParseError(line_no, "[game] keys after tables were started");
        game_keys[key] = split_ws(line.substr(eq + 1));
        break;
      }
      case Section::Payoff: {
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'k i j = q'");
        auto lhs = split_ws(line.substr(0, eq));
        auto rhs = split_ws(line.substr(eq + 1));
        if (lhs.size() != 3 || rhs.size() != 1) throw ParseError(line_no, "expected 'k i j = q'");
        int k = lookup(line_no, &GameSpec::state_index, lhs[0]);
        int i = lookup(line_no, &GameSpec::action1_index, lhs[1]);
        int j = lookup(line_no, &GameSpec::action2_index, lhs[2]);
        std::size_t cell = spec.cell(k, i, j);
        if (!payoff_seen.insert(cell).second) {
          throw ParseError(line_no, "duplicate payoff for " + cell_name(spec, k, i, j));
        }
        spec.payoffs[cell] = rational(line_no, rhs[0]);
        break;
      }
      case Section::Transition: {
        auto arrow = line.find("->");
        auto colon = line.find(':');
        if (arrow == std::string::npos || colon == std::string::npos || colon < arrow) {
          throw ParseError(line_no, "expected \"k i j -> k' c d : q\"");
        }
        auto lhs = split_ws(line.substr(0, arrow));
        auto mid = split_ws(line.substr(arrow + 2, colon - arrow - 2));
        auto rhs = split_ws(line.substr(colon + 1));
        if (lhs.size() != 3 || mid.size() != 3 || rhs.size() != 1) {
          throw ParseError(line_no, "expected \"k i j -> k' c d : q\"");
        }
        int k = lookup(line_no, &GameSpec::state_index, lhs[0]);
        int i = lookup(line_no, &GameSpec::action1_index, lhs[1]);
        int j = lookup(line_no, &GameSpec::action2_index, lhs[2]);
        int kn = lookup(line_no, &GameSpec::state_index, mid[0]);
        int c = lookup(line_no, &GameSpec::signal1_index, mid[1]);
        int d = lookup(line_no, &GameSpec::signal2_index, mid[2]);
        Rational q = rational(line_no, rhs[0]);
        if (sgn(q) < 0) throw ParseError(line_no, "negative transition mass " + to_string(q));
        std::size_t cell = spec.cell(k, i, j);
        if (!transition_seen.insert({cell, kn, c, d}).second) {
          throw ParseError(line_no, "duplicate transition atom");
        }
        spec.transitions[cell].push_back(TransitionAtom{kn, c, d, q});
        break;
      }
      case Section::Initial: {
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError(line_no, "expected \"k c' d' : q\"");
        auto lhs = split_ws(line.substr(0, colon));
        auto rhs = split_ws(line.substr(colon + 1));
        if (lhs.size() != 3 || rhs.size() != 1) throw ParseError(line_no, "expected \"k c' d' : q\"");
        int k = lookup(line_no, &GameSpec::state_index, lhs[0]);
        Rational q = rational(line_no, rhs[0]);
        if (sgn(q) <= 0) throw ParseError(line_no, "initial mass must be positive");
        raw_initials.back().push_back(RawInitial{line_no, k, lhs[1], lhs[2], q});
        break;
      }
    }
  }
  ensure_game(line_no);
  for (std::size_t cell = 0; cell < spec.payoffs.size(); ++cell) {
    if (!payoff_seen.count(cell)) {
      std::size_t nj = spec.actions2.size(), ni = spec.actions1.size();
      int j = static_cast<int>(cell % nj);
      int i = static_cast<int>((cell / nj) % ni);
      int k = static_cast<int>(cell / (nj * ni));
      throw ValidationError("missing payoff for " + cell_name(spec, k, i, j));
    }
  }
  spec.canonicalize();
  spec.validate();
  if (doc.initials.empty()) throw ValidationError("no [initial] section");
  for (std::size_t s = 0; s < doc.initials.size(); ++s) {
    InitialLaw& pi = doc.initials[s];
    std::set<std::string> cs, ds;
    for (const auto& r : raw_initials[s]) {
      cs.insert(r.c);
      ds.insert(r.d);
    }
    pi.signals1.assign(cs.begin(), cs.end());
    pi.signals2.assign(ds.begin(), ds.end());
    for (const auto& r : raw_initials[s]) {
      int c = static_cast<int>(std::lower_bound(pi.signals1.begin(), pi.signals1.end(), r.c) -
                               pi.signals1.begin());
      int d = static_cast<int>(std::lower_bound(pi.signals2.begin(), pi.signals2.end(), r.d) -
                               pi.signals2.begin());
      for (const auto& a : pi.atoms) {
        if (a.k == r.k && a.c == c && a.d == d) {
          throw ParseError(r.line, "duplicate initial atom");
        }
      }
      pi.atoms.push_back(InitialAtom{r.k, c, d, r.mass});
    }
    pi.canonicalize();
    pi.validate(spec.num_states());
  }
  return doc;
}

std::pair<GameSpec, InitialLaw> parse_game_spec(const std::string& text) {
  GameDocument doc = parse_game_document(text);
  return {doc.spec, doc.initials.front()};
}

GameDocument load_game_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_game_document(buffer.str());
}

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += " ";
    out += labels[i];
  }
  return out;
}

std::string serialize_initial(const GameSpec& spec, const InitialLaw& pi) {
  std::string out = "[initial " + pi.name + "]\n";
  for (const auto& a : pi.atoms) {
    out += spec.states[a.k] + " " + pi.signals1[a.c] + " " + pi.signals2[a.d] + " : " +
           to_string(a.mass) + "\n";
  }
  return out;
}

std::string serialize_spec(const GameSpec& spec) {
  std::string out = "[game]\n";
  out += "states = " + join_labels(spec.states) + "\n";
  out += "actions1 = " + join_labels(spec.actions1) + "\n";
  out += "actions2 = " + join_labels(spec.actions2) + "\n";
  out += "signals1 = " + join_labels(spec.signals1) + "\n";
  out += "signals2 = " + join_labels(spec.signals2) + "\n";
  out += "[payoff]\n";
  for (int k = 0; k < spec.num_states(); ++k) {
    for (int i = 0; i < spec.num_actions1(); ++i) {
      for (int j = 0; j < spec.num_actions2(); ++j) {
        out += spec.states[k] + " " + spec.actions1[i] + " " + spec.actions2[j] + " = " +
               to_string(spec.payoff(k, i, j)) + "\n";
      }
    }
  }
  out += "[transition]\n";
  for (int k = 0; k < spec.num_states(); ++k) {
    for (int i = 0; i < spec.num_actions1(); ++i) {
      for (int j = 0; j < spec.num_actions2(); ++j) {
        for (const auto& a : spec.transition(k, i, j)) {
          out += spec.states[k] + " " + spec.actions1[i] + " " + spec.actions2[j] + " -> " +
                 spec.states[a.next] + " " + spec.signals1[a.c] + " " + spec.signals2[a.d] +
                 " : " + to_string(a.mass) + "\n";
        }
      }
    }
  }
  return out;
}

}  // namespace

std::string serialize_game(const GameSpec& spec, const std::vector<InitialLaw>& initials) {
  GameSpec canon = spec;
  canon.canonicalize();
  std::string out = serialize_spec(canon);
  for (const auto& pi : initials) {
    InitialLaw p = pi;
    p.canonicalize();
    out += serialize_initial(canon, p);
  }
  return out;
}

std::string spec_digest(const GameSpec& spec, const InitialLaw& pi) {
  GameSpec canon = spec;
  canon.canonicalize();
  // Initial atoms are keyed by label so the digest ignores declaration order.
  std::vector<std::tuple<int, std::string, std::string, std::string>> atoms;
  for (const auto& a : pi.atoms) {
    atoms.emplace_back(a.k, pi.signals1[a.c], pi.signals2[a.d], to_string(a.mass));
  }
  std::sort(atoms.begin(), atoms.end());
  std::string text = serialize_spec(canon) + "[initial]\n";
  for (const auto& [k, c, d, m] : atoms) {
    text += canon.states[k] + " " + c + " " + d + " : " + m + "\n";
  }
  return sha256_hex(text);
}

Rational stage_payoff_extended(const GameSpec& spec, const BeliefPoint& p, int i, int j) {
  if (i < 0 || i >= spec.num_actions1()) throw ValidationError("unknown action1 index");
  if (j < 0 || j >= spec.num_actions2()) throw ValidationError("unknown action2 index");
  if (p.size() != spec.num_states()) throw ValidationError("belief dimension mismatch");
  Rational total = 0;
  for (int k = 0; k < spec.num_states(); ++k) {
    total += p.probs[static_cast<std::size_t>(k)] * spec.payoff(k, i, j);
  }
  return total;
}

Rational stage_payoff_extended(const GameSpec& spec, const BeliefPoint& p, const std::string& i,
                               const std::string& j) {
  return stage_payoff_extended(spec, p, spec.action1_index(i), spec.action2_index(j));
}

const std::vector<Rational>& AuxAction::rule(const BeliefPoint& p) const {
  for (const auto& r : rules) {
    if (r.first == p) return r.second;
  }
  throw ValidationError("no rule for belief " + to_string(p));
}

bool AuxAction::covers(const BeliefAtomLaw& z) const {
  for (const auto& [p, w] : z.atoms) {
    bool found = false;
    for (const auto& r : rules) found = found || r.first == p;
    if (!found) return false;
  }
  return true;
}

void AuxAction::validate(int num_actions) const {
  for (const auto& [p, dist] : rules) {
    if (static_cast<int>(dist.size()) != num_actions) throw ValidationError("rule has wrong size");
    Rational total = 0;
    for (const auto& w : dist) {
      if (sgn(w) < 0) throw ValidationError("rule has a negative weight");
      total += w;
    }
    if (total != 1) throw ValidationError("rule at " + to_string(p) + " sums to " + to_string(total));
  }
}

AuxAction AuxAction::uniform(const BeliefAtomLaw& z, int num_actions) {
  AuxAction a;
  for (const auto& [p, w] : z.atoms) {
    a.rules.emplace_back(p, std::vector<Rational>(static_cast<std::size_t>(num_actions),
                                                  Rational(1, num_actions)));
  }
  return a;
}

AuxAction AuxAction::pure(const BeliefAtomLaw& z, int num_actions, int i) {
  AuxAction a;
  for (const auto& [p, w] : z.atoms) {
    std::vector<Rational> dist(static_cast<std::size_t>(num_actions), Rational(0));
    dist[static_cast<std::size_t>(i)] = 1;
    a.rules.emplace_back(p, dist);
  }
  return a;
}

std::string to_string(const AuxAction& a) {
  std::string out;
  for (const auto& [p, dist] : a.rules) {
    out += to_string(p) + " -> " + join_rationals(dist, " ") + "\n";
  }
  return out;
}

}  // namespace rg
