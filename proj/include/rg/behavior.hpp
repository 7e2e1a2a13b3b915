#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "rg/game.hpp"

namespace rg {

// Private history of one player: initial signal, then alternating own actions and signals.
using History = std::vector<int>;

class HistoryInterner {
 public:
  int root(int initial_signal);
  int child(int parent, int action, int signal);
  int parent(int id) const { return nodes_[id].parent; }
  int action(int id) const { return nodes_[id].action; }
  int stage(int id) const { return nodes_[id].stage; }
  const History& history(int id) const { return nodes_[id].history; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    int parent;
    int action;
    int stage;
    History history;
  };
  std::map<std::tuple<int, int, int>, int> index_;
  std::vector<Node> nodes_;
};

struct BehaviorStrategy {
  int player = 1;
  int depth = 0;
  int num_actions = 0;
  std::map<History, std::vector<Rational>> table;
  // Used for histories missing from the table, when set.
  std::optional<std::vector<Rational>> fallback;

  const std::vector<Rational>& at(const History& h) const;
  bool covers(const History& h) const { return table.count(h) || fallback.has_value(); }

  static BehaviorStrategy uniform(int player, int num_actions, int depth);

  // One "labels : p_1 ... p_n" line per history.
  std::string serialize(const GameSpec& spec, const InitialLaw& pi) const;
  static BehaviorStrategy parse(const std::string& text, const GameSpec& spec,
                                const InitialLaw& pi);
};

std::string history_to_string(const History& h, int player, const GameSpec& spec,
                              const InitialLaw& pi);

}  // namespace rg
