#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "treesep/core.hpp"
#include "treesep/game.hpp"
#include "treesep/omega.hpp"

namespace treesep {

enum class VariantKind : std::uint8_t { WordDetC, TreeDetC, TreeDetCUniversal, TreeDet, TreeGame, TreeGameC };

[[nodiscard]] std::string_view variant_name(VariantKind k);
[[nodiscard]] bool uses_priorities(VariantKind k);
// Separators of these kinds are game automata; the rest are deterministic.
[[nodiscard]] bool is_game_variant(VariantKind k);

struct Variant {
  VariantKind kind = VariantKind::TreeDet;
  std::vector<Priority> c;  // sorted, distinct, nonempty for the C kinds
};

// Throws unless c is present exactly when the kind needs it.
void check_variant(const Variant& v);

inline constexpr int separator_player = 0;
inline constexpr int input_player = 1;

enum class Mode : std::uint8_t { Or = 0, And = 1 };

// One decision of a round. Choices encode: C as an index into Variant::c,
// A as a letter, M as a Mode, F as a bit mask over by_letter(a) of the
// selector's automaton (bit set = R), D as a Dir.
enum class Slot : std::uint8_t { C, A, M, F, D };

[[nodiscard]] std::vector<Slot> round_slots(VariantKind k);

// Decoded round outcome; absent slots hold -1 (f holds 0).
struct Round {
  int c = -1;
  Letter a = 0;
  int m = -1;
  std::uint64_t f = 0;
  int d = -1;
};

// Positionless arena of a separability game. Separator is player 0.
class SeparabilityArena final : public Arena {
 public:
  // Tree kinds: A and B share an alphabet.
  SeparabilityArena(const Variant& v, const TreeAutomaton& a, const TreeAutomaton& b);
  // WordDetC.
  SeparabilityArena(const Variant& v, const WordAutomaton& a, const WordAutomaton& b);

  Position initial_position() const override { return 0; }
  std::size_t num_decisions() const override { return slots_.size(); }
  int player(std::size_t k) const override;
  void choices(Position v, std::span<const Choice> prefix, std::vector<Choice>& out) const override;
  Position update(Position, std::span<const Choice>) const override { return 0; }
  std::string describe_choice(std::size_t k, Choice c) const override;

  [[nodiscard]] const Variant& variant() const { return v_; }
  [[nodiscard]] const std::vector<Slot>& slots() const { return slots_; }
  [[nodiscard]] std::size_t slot_index(Slot s) const;  // num_decisions() if absent
  [[nodiscard]] Round decode(std::span<const Choice> outcome) const;
  // Automaton whose transitions the selector ranges over (nullptr if none).
  [[nodiscard]] const TreeAutomaton* selector_domain(std::span<const Choice> prefix) const;
  [[nodiscard]] const TreeAutomaton* tree_a() const { return ta_; }
  [[nodiscard]] const TreeAutomaton* tree_b() const { return tb_; }
  [[nodiscard]] const WordAutomaton* word_a() const { return wa_; }
  [[nodiscard]] const WordAutomaton* word_b() const { return wb_; }
  [[nodiscard]] std::size_t num_letters() const { return letters_; }

 private:
  Variant v_;
  std::vector<Slot> slots_;
  const TreeAutomaton* ta_ = nullptr;
  const TreeAutomaton* tb_ = nullptr;
  const WordAutomaton* wa_ = nullptr;
  const WordAutomaton* wb_ = nullptr;
  std::size_t letters_ = 0;
};

// Does the outcome respect the guard of `side` (0 = A, 1 = B) for transition t?
// Unguarded when the round has no selector over that side's automaton.
[[nodiscard]] bool guard_holds(const SeparabilityArena& arena, const Round& r, int side, std::uint32_t t);

// Nondeterministic Buchi automaton over interned round outcomes recognising
// Input's winning plays. For TreeDet and TreeGame: Win_A and Win_B, a single
// conjunction block. For the C kinds: (A accepts and c rejects) or (B accepts
// and c accepts), two blocks joined by a fresh initial state.
class InputNba final : public NpaSource {
 public:
  explicit InputNba(const SeparabilityArena& arena);
  ~InputNba() override;

  [[nodiscard]] std::size_t num_states() const override;
  [[nodiscard]] State initial() const override;
  [[nodiscard]] Priority priority(State q) const override;
  void successors(State q, Letter l, std::vector<State>& out) const override;

  Letter intern(std::span<const Choice> outcome);
  [[nodiscard]] const std::vector<Choice>& outcome(Letter l) const;
  // State of side 0 (A) or 1 (B) tracked by q, if any.
  [[nodiscard]] std::optional<State> side_state(State q, int side) const;
  // States per block, in order.
  [[nodiscard]] std::vector<std::size_t> block_sizes() const;
  // For det and game: a side with only even priorities is left out of the
  // blocks and tracked by subsets (-1 if none).
  [[nodiscard]] int subset_side() const;
  [[nodiscard]] State subset_initial() const;
  void subset_successors(State q, Letter l, std::vector<State>& out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Deterministic condition: Safra determinization of InputNba, explored on
// demand, paired with the subset of the subset side when there is one (an
// empty subset is a rejecting sink). Owned by Input. Selectors are quotiented
// by their restriction to transitions leaving live states.
class WinCondition final : public Condition {
 public:
  explicit WinCondition(const SeparabilityArena& arena);
  State initial() override;
  Priority priority(State w) override;
  State step(State w, Position v, std::span<const Choice> outcome) override;
  bool canonical_choices(State w, Position v, std::span<const Choice> prefix, std::vector<Choice>& out) override;

  [[nodiscard]] std::size_t explored_states() const;
  [[nodiscard]] std::size_t nba_states() const { return nba_.num_states(); }
  [[nodiscard]] const InputNba& nba() const { return nba_; }
  // Deterministic run over a lasso of outcomes; true iff Input wins it.
  [[nodiscard]] bool accepts(const std::vector<std::vector<Choice>>& prefix,
                             const std::vector<std::vector<Choice>>& loop);

 private:
  const SeparabilityArena& arena_;
  InputNba nba_;
  SafraDeterminizer safra_;
  std::size_t f_slot_;
  // Subset mode: states are (Safra state, subset id), plus the sink.
  std::vector<std::pair<State, std::uint32_t>> pairs_;
  std::map<std::pair<State, std::uint32_t>, State> pair_ids_;
  std::vector<std::vector<State>> subsets_;
  std::map<std::vector<State>, std::uint32_t> subset_ids_;
  State sink_ = no_state;

  State intern_pair(State safra, std::vector<State> subset);
};

struct SeparabilityStats {
  std::size_t game_vertices = 0;
  std::size_t condition_states = 0;  // explored states of the determinized condition
  std::size_t condition_priorities = 0;
  std::size_t nba_states = 0;
  std::size_t memory = 0;  // winner's strategy machine
  // States of the automaton determinized for the separator's acceptance
  // (the condition for the C kinds, D for TreeGame, the path automaton for TreeDet).
  std::size_t determinized_states = 0;
  double solve_seconds = 0;
};

struct SeparabilityResult {
  bool separable = false;
  bool shortcut = false;  // decided without a game (empty languages or overlap)
  std::optional<TreeAutomaton> separator;
  std::optional<WordAutomaton> word_separator;
  std::optional<StrategyMachine> strategy;  // the winner's
  SeparabilityStats stats;
  std::optional<bool> verified;  // set when verification was requested
  std::optional<RegularTree> overlap;  // in L(A) ∩ L(B), when the overlap check refuted
};

struct SeparabilityOptions {
  bool verify = false;
  bool synthesize = true;
  // Refute overlapping languages by one disjointness game before the arena.
  bool overlap_check = true;
  std::size_t max_vertices = 1u << 22;  // about 2 GB of game
};

// Inputs are trimmed first; empty languages (and, with overlap_check,
// intersecting ones) are settled without a separability game.
[[nodiscard]] SeparabilityResult decide_separability(const Variant& v, const TreeAutomaton& a,
                                                     const TreeAutomaton& b, const SeparabilityOptions& opt = {});
[[nodiscard]] SeparabilityResult decide_separability(const Variant& v, const WordAutomaton& a,
                                                     const WordAutomaton& b, const SeparabilityOptions& opt = {});

[[nodiscard]] bool decide_universally_rejecting(const TreeAutomaton& a, const TreeAutomaton& b,
                                                const std::vector<Priority>& c);

// Separator from a winning Separator machine of the arena's game.
[[nodiscard]] TreeAutomaton synthesize_separator(const SeparabilityArena& arena, const StrategyMachine& m,
                                                 std::size_t* determinized_states = nullptr);
[[nodiscard]] WordAutomaton synthesize_word_separator(const SeparabilityArena& arena, const StrategyMachine& m);

// Word automaton over Sigma x {L,R} (letter 2a + d) accepting the paths that
// carry an accepting transition sequence of a.
[[nodiscard]] WordAutomaton path_language(const TreeAutomaton& a);
[[nodiscard]] Alphabet path_alphabet(const Alphabet& sigma);
// Deterministic automaton for the path closure of L(a); a must be trimmed.
[[nodiscard]] TreeAutomaton path_automaton(const TreeAutomaton& a);

// Game-automaton shape whose branch acceptance is a deterministic complete
// parity automaton over Sigma x {L,R}. base priorities are ignored.
struct GeneralisedGameAutomaton {
  TreeAutomaton base;
  WordAutomaton condition;
};

[[nodiscard]] std::vector<Diagnostic> validate(const GeneralisedGameAutomaton& g);
// Acceptance game on (node, state, condition state).
[[nodiscard]] bool generalised_member(const GeneralisedGameAutomaton& g, const RegularTree& t);
// Product (Q \ {TOP}) x Q_D + TOP, reachable part. Pairs whose condition
// state is a rejecting sink collapse into a single rejecting state.
[[nodiscard]] TreeAutomaton generalised_to_game(const GeneralisedGameAutomaton& g);

}  // namespace treesep
