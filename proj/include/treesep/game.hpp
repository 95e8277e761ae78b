#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "treesep/omega.hpp"

namespace treesep {

using Vertex = std::uint32_t;
using Position = std::uint32_t;
// One decision of a round, encoded by the arena.
using Choice = std::uint64_t;

inline constexpr Vertex no_vertex = std::numeric_limits<Vertex>::max();

// Parity game with max-parity winning condition for Even (player 0).
struct ParityGame {
  std::vector<Priority> priority;
  std::vector<std::uint8_t> owner;  // 0 = Even, 1 = Odd
  std::vector<std::vector<Vertex>> succ;
  std::vector<std::string> name;
  Vertex initial = 0;

  [[nodiscard]] std::size_t size() const { return priority.size(); }
  Vertex add_vertex(Priority p, std::uint8_t own, std::string nm = {});
};

[[nodiscard]] std::vector<Diagnostic> validate(const ParityGame& g);

struct ParitySolution {
  std::vector<std::uint8_t> winner;  // per vertex
  // Successor chosen by the owner of v; winning whenever winner[v] == owner[v].
  std::vector<Vertex> strategy;
};

// Zielonka's recursive algorithm. Deterministic: attractors are built in
// vertex-index order, so equal inputs give equal strategies.
[[nodiscard]] ParitySolution solve_parity(const ParityGame& g);
// Enumerates every positional strategy of Even; guard: at most 12 vertices.
[[nodiscard]] std::vector<std::uint8_t> brute_force_solve_parity(const ParityGame& g);

// Does the strategy of `player` keep every play from its region inside it?
[[nodiscard]] bool is_trap_closed(const ParityGame& g, const ParitySolution& s, std::uint8_t player);

void write_pgsolver(std::ostream& os, const ParityGame& g);
[[nodiscard]] ParityGame read_pgsolver(std::istream& is);

// Round-based arena. Every round consists of num_decisions() choices made in
// order; choices(v, prefix) lists the legal next choices given the earlier
// ones (the restriction O_v, kept intensional).
class Arena {
 public:
  virtual ~Arena() = default;
  [[nodiscard]] virtual Position initial_position() const = 0;
  [[nodiscard]] virtual std::size_t num_decisions() const = 0;
  [[nodiscard]] virtual int player(std::size_t k) const = 0;
  virtual void choices(Position v, std::span<const Choice> prefix, std::vector<Choice>& out) const = 0;
  [[nodiscard]] virtual Position update(Position v, std::span<const Choice> outcome) const = 0;
  [[nodiscard]] virtual std::string describe_choice(std::size_t k, Choice c) const;
};

// Deterministic automaton over round outcomes, possibly explored lazily.
class Condition {
 public:
  virtual ~Condition() = default;
  virtual State initial() = 0;
  virtual Priority priority(State w) = 0;
  virtual State step(State w, Position v, std::span<const Choice> outcome) = 0;
  // Optional quotient of the choices at a decision: when it returns true,
  // `out` is a subset of the legal choices such that every legal choice has
  // an equivalent one in it (same position update and same condition step
  // for every completion of the round). Sound for either player.
  virtual bool canonical_choices(State /*w*/, Position /*v*/, std::span<const Choice> /*prefix*/,
                                 std::vector<Choice>& /*out*/) {
    return false;
  }
};

// A WordAutomaton as a condition; outcomes are mapped to letters by `letter`.
class WordCondition final : public Condition {
 public:
  WordCondition(const WordAutomaton& w, std::function<Letter(Position, std::span<const Choice>)> letter);
  State initial() override { return w_.initial(); }
  Priority priority(State q) override { return w_.priority(q); }
  State step(State q, Position v, std::span<const Choice> outcome) override;

 private:
  const WordAutomaton& w_;
  std::function<Letter(Position, std::span<const Choice>)> letter_;
};

// Graph-game image of an arena: vertices are (position, proper or full prefix).
struct GraphGame {
  std::vector<Position> position;
  std::vector<std::vector<Choice>> prefix;
  std::vector<int> owner;  // arena player; full-outcome vertices have one successor
  std::vector<std::vector<Vertex>> succ;
  // -1 for epsilon edges, otherwise an index into outcomes.
  std::vector<std::vector<std::int64_t>> label;
  std::vector<std::vector<Choice>> outcomes;
  Vertex initial = 0;

  [[nodiscard]] std::size_t size() const { return position.size(); }
  [[nodiscard]] bool round_start(Vertex v) const { return prefix[v].empty(); }
};

[[nodiscard]] GraphGame arena_to_graph_game(const Arena& a, std::size_t max_vertices = 1u << 20);

// Parity game whose Even player is the arena player `owner`, winning iff the
// play's outcome sequence is accepted by w. Dead ends lose for their owner.
[[nodiscard]] ParityGame product_with_condition(const GraphGame& g, const WordAutomaton& w,
                                                const std::function<Letter(std::span<const Choice>)>& letter,
                                                int owner);

// Product of an arena with a condition, explored from the initial vertex
// without building the graph game. Vertex 0 is the initial vertex.
struct ProductGame {
  ParityGame game;
  std::vector<Position> position;
  std::vector<State> cond;
  std::vector<std::uint32_t> prefix_begin;  // flat storage, size()+1 entries
  std::vector<Choice> prefix_data;
  std::vector<std::vector<Choice>> edge_choice;  // parallel to game.succ
  std::size_t num_decisions = 0;
  int owner = 0;
  Vertex sink_even = no_vertex, sink_odd = no_vertex;
  std::size_t condition_states = 0;

  [[nodiscard]] std::span<const Choice> prefix(Vertex v) const {
    return {prefix_data.data() + prefix_begin[v], prefix_data.data() + prefix_begin[v + 1]};
  }
  [[nodiscard]] bool is_sink(Vertex v) const { return v == sink_even || v == sink_odd; }
};

[[nodiscard]] ProductGame build_product(const Arena& a, Condition& w, int owner,
                                        std::size_t max_vertices = 1u << 24);

// Finite-memory strategy: memory elements are condition states.
struct StrategyMachine {
  int owner = 0;
  std::vector<State> memory;  // condition state of each memory element
  std::uint32_t initial_memory = 0;
  Position initial_position = 0;
  using Key = std::tuple<Position, std::uint32_t, std::vector<Choice>>;
  std::map<Key, Choice> decisions;                            // (v, m, prefix) -> choice
  std::map<Key, std::pair<Position, std::uint32_t>> updates;  // (v, m, outcome) -> (v', m')

  [[nodiscard]] std::size_t size() const { return memory.size(); }
  [[nodiscard]] std::optional<Choice> decide(Position v, std::uint32_t m, std::span<const Choice> prefix) const;
  [[nodiscard]] std::optional<std::pair<Position, std::uint32_t>> next(Position v, std::uint32_t m,
                                                                      std::span<const Choice> outcome) const;
};

// Strategy of `player` (0 = the product's Even player, i.e. the condition
// owner; 1 = the opponent). Throws if the initial vertex is not won by player.
[[nodiscard]] StrategyMachine extract_strategy_machine(const ProductGame& p, const ParitySolution& s,
                                                       std::uint8_t player);

// Structural closure: every reachable decision is legal and every update
// leads to a known memory element.
[[nodiscard]] bool is_closed(const StrategyMachine& m, const Arena& a);

}  // namespace treesep
