#include "rg/behavior.hpp"

#include <algorithm>
#include <sstream>

#include "rg/errors.hpp"

namespace rg {

int HistoryInterner::root(int initial_signal) { return child(-1, -1, initial_signal); }

int HistoryInterner::child(int parent, int action, int signal) {
  auto key = std::make_tuple(parent, action, signal);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  Node node{parent, action, 1, {}};
  if (parent >= 0) {
    node.stage = nodes_[parent].stage + 1;
    node.history = nodes_[parent].history;
    node.history.push_back(action);
  }
  node.history.push_back(signal);
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(node));
  index_.emplace(key, id);
  return id;
}

const std::vector<Rational>& BehaviorStrategy::at(const History& h) const {
  auto it = table.find(h);
  if (it != table.end()) return it->second;
  if (fallback) return *fallback;
  std::string text;
  for (int v : h) text += std::to_string(v) + " ";
  throw ValidationError("strategy of player " + std::to_string(player) +
                        " is undefined at history [" + text + "]");
}

BehaviorStrategy BehaviorStrategy::uniform(int player, int num_actions, int depth) {
  BehaviorStrategy s;
  s.player = player;
  s.num_actions = num_actions;
  s.depth = depth;
  s.fallback = std::vector<Rational>(static_cast<std::size_t>(num_actions), Rational(1, num_actions));
  return s;
}

std::string history_to_string(const History& h, int player, const GameSpec& spec,
                              const InitialLaw& pi) {
  std::string out;
  for (std::size_t t = 0; t < h.size(); ++t) {
    if (t) out += " ";
    if (t == 0) {
      out += player == 1 ? pi.signals1[h[0]] : pi.signals2[h[0]];
    } else if (t % 2 == 1) {
      out += player == 1 ? spec.actions1[h[t]] : spec.actions2[h[t]];
    } else {
      out += player == 1 ? spec.signals1[h[t]] : spec.signals2[h[t]];
    }
  }
  return out;
}

std::string BehaviorStrategy::serialize(const GameSpec& spec, const InitialLaw& pi) const {
  std::ostringstream out;
  out << "player " << player << "\n";
  out << "depth " << depth << "\n";
  if (fallback) out << "default : " << join_rationals(*fallback, " ") << "\n";
  for (const auto& [h, dist] : table) {
    out << history_to_string(h, player, spec, pi) << " : " << join_rationals(dist, " ") << "\n";
  }
  return out.str();
}

BehaviorStrategy BehaviorStrategy::parse(const std::string& text, const GameSpec& spec,
                                         const InitialLaw& pi) {
  BehaviorStrategy s;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_player = false;
  auto find = [&](const std::vector<std::string>& labels, const std::string& tok) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == tok) return static_cast<int>(i);
    }
    throw ParseError(line_no, "unknown label '" + tok + "'");
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream words(line);
    std::vector<std::string> toks;
    std::string tok;
    while (words >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    if (toks[0] == "player" && toks.size() == 2) {
      s.player = std::stoi(toks[1]);
      if (s.player != 1 && s.player != 2) throw ParseError(line_no, "player must be 1 or 2");
      s.num_actions = s.player == 1 ? spec.num_actions1() : spec.num_actions2();
      have_player = true;
      continue;
    }
    if (toks[0] == "depth" && toks.size() == 2) {
      s.depth = std::stoi(toks[1]);
      continue;
    }
    if (!have_player) throw ParseError(line_no, "expected 'player N' first");
    auto colon = std::find(toks.begin(), toks.end(), ":");
    if (colon == toks.end()) throw ParseError(line_no, "expected 'history : probabilities'");
    std::vector<Rational> dist;
    for (auto it = colon + 1; it != toks.end(); ++it) {
      try {
        dist.push_back(parse_rational(*it));
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
      }
    }
    if (static_cast<int>(dist.size()) != s.num_actions) {
      throw ParseError(line_no, "wrong number of probabilities");
    }
    if (sum(dist) != 1) throw ParseError(line_no, "probabilities do not sum to 1");
    std::vector<std::string> hist(toks.begin(), colon);
    if (hist.size() == 1 && hist[0] == "default") {
      s.fallback = dist;
      continue;
    }
    History h;
    for (std::size_t t = 0; t < hist.size(); ++t) {
      if (t == 0) {
        h.push_back(find(s.player == 1 ? pi.signals1 : pi.signals2, hist[t]));
      } else if (t % 2 == 1) {
        h.push_back(find(s.player == 1 ? spec.actions1 : spec.actions2, hist[t]));
      } else {
        h.push_back(find(s.player == 1 ? spec.signals1 : spec.signals2, hist[t]));
      }
    }
    if (h.size() % 2 == 0) throw ParseError(line_no, "history must end with a signal");
    s.table[h] = dist;
  }
  if (!have_player) throw ParseError(line_no, "missing 'player N'");
  return s;
}

}  // namespace rg
