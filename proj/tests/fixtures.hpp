#pragma once

#include <random>

#include "support.hpp"
#include "treesep/core.hpp"
#include "treesep/tree.hpp"

namespace treesep::testing {

inline constexpr Letter a_ = 0, b_ = 1;

// Deterministic: every node labelled a. qA=0 (priority 0), r=1 (priority 1), TOP=2.
inline TreeAutomaton all_a_safety() {
  std::vector<Transition> ts{{0, a_, 0, 0}, {0, b_, 1, 1}, {1, a_, 1, 1}, {1, b_, 1, 1}, {2, a_, 2, 2}, {2, b_, 2, 2}};
  return {ab(), {"qA", "r", "TOP"}, 0, {0, 1, 0}, ts, AutomatonKind::Deterministic, 2};
}

// Nondeterministic: some node labelled b. qs=0 (priority 1), qall=1 (priority 0).
inline TreeAutomaton some_b() {
  std::vector<Transition> ts{{0, a_, 0, 1}, {0, a_, 1, 0}, {0, b_, 1, 1}, {1, a_, 1, 1}, {1, b_, 1, 1}};
  return {ab(), {"qs", "qall"}, 0, {1, 0}, ts};
}

inline RegularTree tree(std::vector<Letter> label, std::vector<std::array<std::uint32_t, 2>> succ) {
  RegularTree t;
  t.alphabet = ab();
  for (std::size_t i = 0; i < label.size(); ++i) t.node_names.push_back("n" + std::to_string(i));
  t.label = std::move(label);
  t.succ = std::move(succ);
  return t;
}

inline RegularTree all_a_tree() { return tree({a_}, {{0, 0}}); }
inline RegularTree all_b_tree() { return tree({b_}, {{0, 0}}); }
inline RegularTree b_root_tree() { return tree({b_, a_}, {{1, 1}, {1, 1}}); }
// Leftmost branch a forever, a single b as the root's right child.
inline RegularTree b_right_tree() { return tree({a_, b_, a_}, {{0, 1}, {2, 2}, {2, 2}}); }

inline RegularTree random_tree(std::mt19937_64& rng, std::size_t max_nodes = 4) {
  const std::size_t n = 1 + rng() % max_nodes;
  std::vector<Letter> label(n);
  std::vector<std::array<std::uint32_t, 2>> succ(n);
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = static_cast<Letter>(rng() % 2);
    succ[i] = {static_cast<std::uint32_t>(rng() % n), static_cast<std::uint32_t>(rng() % n)};
  }
  return tree(label, succ);
}

// Every regular tree over {a,b} with at most `n` nodes rooted at node 0.
inline std::vector<RegularTree> all_small_trees(std::size_t max_nodes) {
  std::vector<RegularTree> out;
  for (std::size_t n = 1; n <= max_nodes; ++n) {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 2 * n * n;
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t x = c;
      std::vector<Letter> label(n);
      std::vector<std::array<std::uint32_t, 2>> succ(n);
      for (std::size_t i = 0; i < n; ++i) {
        label[i] = static_cast<Letter>(x % 2);
        x /= 2;
        succ[i][0] = static_cast<std::uint32_t>(x % n);
        x /= n;
        succ[i][1] = static_cast<std::uint32_t>(x % n);
        x /= n;
      }
      out.push_back(tree(label, succ));
    }
  }
  return out;
}

// Nondeterministic automaton: <= max_states states, priorities in {0,..,max_p},
// 0..2 transitions per (q, a).
inline TreeAutomaton random_nondet(std::mt19937_64& rng, std::size_t max_states = 4, Priority max_p = 2) {
  const std::size_t n = 1 + rng() % max_states;
  std::vector<std::string> names;
  std::vector<Priority> pr;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("q" + std::to_string(i));
    pr.push_back(static_cast<Priority>(rng() % (max_p + 1)));
  }
  std::vector<Transition> ts;
  for (State q = 0; q < n; ++q)
    for (Letter x = 0; x < 2; ++x) {
      const std::size_t k = rng() % 3;
      for (std::size_t j = 0; j < k; ++j)
        ts.push_back({q, x, static_cast<State>(rng() % n), static_cast<State>(rng() % n)});
    }
  return {ab(), names, 0, pr, ts};
}

// Game automaton with <= max_states non-top states; conjunctive or
// disjunctive per (q, a) at random.
inline TreeAutomaton random_game_automaton(std::mt19937_64& rng, std::size_t max_states = 3, Priority max_p = 2,
                                           bool deterministic = false) {
  const std::size_t n = 1 + rng() % max_states;
  std::vector<std::string> names;
  std::vector<Priority> pr;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("q" + std::to_string(i));
    pr.push_back(static_cast<Priority>(rng() % (max_p + 1)));
  }
  names.push_back("TOP");
  pr.push_back(0);
  const State top = static_cast<State>(n);
  std::vector<Transition> ts;
  bool any_disj = false;
  for (State q = 0; q < n; ++q)
    for (Letter x = 0; x < 2; ++x) {
      const State l = static_cast<State>(rng() % n), r = static_cast<State>(rng() % n);
      if (!deterministic && rng() % 2 == 0) {
        ts.push_back({q, x, l, top});
        ts.push_back({q, x, top, r});
        any_disj = true;
      } else {
        ts.push_back({q, x, l, r});
      }
    }
  for (Letter x = 0; x < 2; ++x) ts.push_back({top, x, top, top});
  return {ab(), names, 0, pr, ts, any_disj ? AutomatonKind::Game : AutomatonKind::Deterministic, top};
}

// Nondeterministic: the root is labelled b. qr=0 (priority 1), qall=1 (priority 0).
inline TreeAutomaton root_b() {
  std::vector<Transition> ts{{0, b_, 1, 1}, {1, a_, 1, 1}, {1, b_, 1, 1}};
  return {ab(), {"qr", "qall"}, 0, {1, 0}, ts};
}

// Trimmed random automata with nonempty languages.
inline std::pair<TreeAutomaton, TreeAutomaton> random_trimmed_pair(std::mt19937_64& rng, std::size_t max_states = 4) {
  for (;;) {
    auto a = trim(random_nondet(rng, max_states)), b = trim(random_nondet(rng, max_states));
    if (!a.empty && !b.empty) return {std::move(a.automaton), std::move(b.automaton)};
  }
}

}  // namespace treesep::testing
