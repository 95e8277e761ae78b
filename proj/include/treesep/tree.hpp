#pragma once

#include <map>
#include <optional>
#include <vector>

#include "treesep/core.hpp"
#include "treesep/game.hpp"

namespace treesep {

// Acceptance game on the finite graph of t: positions (node, state).
[[nodiscard]] bool regular_tree_member(const TreeAutomaton& a, const RegularTree& t);

// q is productive iff Automaton wins the nonemptiness game from q.
[[nodiscard]] std::vector<char> productive_states(const TreeAutomaton& a);

struct TrimResult {
  TreeAutomaton automaton;
  bool empty = false;          // the initial state is unproductive
  std::vector<State> origin;   // state of the input for each kept state
};

// Drops unproductive states and every transition touching them, to a
// fixpoint. A game automaton keeps its top state; if a transition had to go,
// the result is reported as nondeterministic (same language, no game shape).
[[nodiscard]] TrimResult trim(const TreeAutomaton& a);

// Same transitions, fewest priorities: minimize_priorities on the branch
// graph (q to each target), so every branch of every run keeps its verdict.
[[nodiscard]] TreeAutomaton minimize_priorities(const TreeAutomaton& a);

// Regular tree with at most |Q| nodes accepted by a. Throws on L(a) = ∅.
[[nodiscard]] RegularTree emptiness_witness(const TreeAutomaton& a);

struct DisjointResult {
  bool disjoint = false;
  std::optional<RegularTree> witness;  // in L(A) ∩ L(B) when not disjoint
  std::size_t game_vertices = 0;
  std::size_t condition_states = 0;
};

// Disjointness game: Automaton plays a letter and a transition of each
// automaton, Pathfinder a direction; Automaton needs both branches accepting.
[[nodiscard]] DisjointResult decide_disjoint(const TreeAutomaton& a, const TreeAutomaton& b);

// Deterministic automaton over priority pairs (i, j) with i < ka, j < kb
// (letter i * kb + j) accepting iff both components satisfy max-parity.
[[nodiscard]] const WordAutomaton& pair_condition(std::size_t ka, std::size_t kb);

// Positional Pathfinder strategy keyed by transition indices (into
// A.transitions(), B.transitions()) over the same letter.
struct Pathfinder {
  std::map<std::pair<std::uint32_t, std::uint32_t>, Dir> table;
};

// Bounded search over positional tables; each candidate is certified by the
// one-player residual game. Throws when more than `guard` table entries are free.
[[nodiscard]] Pathfinder extract_pathfinder(const TreeAutomaton& a, const TreeAutomaton& b,
                                            std::size_t guard = 16);
// Does the table win the disjointness game (every conform play rejecting on a side)?
[[nodiscard]] bool certify_pathfinder(const TreeAutomaton& a, const TreeAutomaton& b, const Pathfinder& p);

}  // namespace treesep
