#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace treesep {

using State = std::uint32_t;
using Letter = std::uint32_t;
using Priority = std::uint32_t;

inline constexpr State no_state = std::numeric_limits<State>::max();

enum class Dir : std::uint8_t { L = 0, R = 1 };

[[nodiscard]] inline char dir_char(Dir d) { return d == Dir::L ? 'L' : 'R'; }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured size limit was hit; the input itself may be fine.
class LimitError : public Error {
 public:
  using Error::Error;
};

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> letters);

  [[nodiscard]] std::size_t size() const { return letters_.size(); }
  [[nodiscard]] const std::string& name(Letter a) const { return letters_.at(a); }
  [[nodiscard]] const std::vector<std::string>& letters() const { return letters_; }
  [[nodiscard]] std::optional<Letter> find(std::string_view name) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> letters_;
};

struct Transition {
  State q = 0;
  Letter a = 0;
  State left = 0;
  State right = 0;

  [[nodiscard]] State target(Dir d) const { return d == Dir::L ? left : right; }
  auto operator<=>(const Transition&) const = default;
};

enum class AutomatonKind : std::uint8_t { Nondeterministic, Deterministic, Game };

[[nodiscard]] std::string_view kind_name(AutomatonKind k);

// Nondeterministic parity tree automaton with max-parity acceptance.
// Game and deterministic automata are the same type with kind set and a
// materialized top state (all-accepting, even priority, self-loops).
// Transitions are kept sorted and deduplicated; construction never throws on
// invariant violations so that validate() can report them.
class TreeAutomaton {
 public:
  TreeAutomaton() = default;
  TreeAutomaton(Alphabet alphabet, std::vector<std::string> state_names, State initial,
                std::vector<Priority> priority, std::vector<Transition> transitions,
                AutomatonKind kind = AutomatonKind::Nondeterministic, State top = no_state);

  [[nodiscard]] const Alphabet& alphabet() const { return alphabet_; }
  [[nodiscard]] std::size_t num_states() const { return names_.size(); }
  [[nodiscard]] State initial() const { return initial_; }
  [[nodiscard]] Priority priority(State q) const { return priority_.at(q); }
  [[nodiscard]] const std::vector<Priority>& priorities() const { return priority_; }
  [[nodiscard]] const std::vector<Transition>& transitions() const { return transitions_; }
  [[nodiscard]] AutomatonKind kind() const { return kind_; }
  [[nodiscard]] State top() const { return top_; }
  [[nodiscard]] bool has_top() const { return top_ != no_state; }
  [[nodiscard]] const std::string& state_name(State q) const { return names_.at(q); }
  [[nodiscard]] const std::vector<std::string>& state_names() const { return names_; }
  [[nodiscard]] std::optional<State> find_state(std::string_view name) const;

  // Delta(q, a); empty for out-of-range arguments.
  [[nodiscard]] std::span<const Transition> from(State q, Letter a) const;
  // Indices into transitions() of every transition reading a, in canonical order.
  [[nodiscard]] std::span<const std::uint32_t> by_letter(Letter a) const;
  // Position of transition index t inside by_letter(transitions()[t].a).
  [[nodiscard]] std::uint32_t letter_rank(std::uint32_t t) const { return letter_rank_.at(t); }

  // Priorities of the non-top states, sorted and distinct.
  [[nodiscard]] std::vector<Priority> priority_set() const;
  [[nodiscard]] bool is_game_like() const { return kind_ != AutomatonKind::Nondeterministic; }

  bool operator==(const TreeAutomaton& o) const;

 private:
  Alphabet alphabet_;
  std::vector<std::string> names_;
  State initial_ = 0;
  std::vector<Priority> priority_;
  std::vector<Transition> transitions_;
  AutomatonKind kind_ = AutomatonKind::Nondeterministic;
  State top_ = no_state;

  std::vector<std::uint32_t> qa_begin_;  // size |Q|*|Sigma|+1
  std::vector<std::uint32_t> letter_index_;
  std::vector<std::uint32_t> letter_begin_;  // size |Sigma|+1
  std::vector<std::uint32_t> letter_rank_;
};

// Finite graph representing an infinite regular tree.
struct RegularTree {
  Alphabet alphabet;
  std::vector<std::string> node_names;
  std::uint32_t root = 0;
  std::vector<Letter> label;
  std::vector<std::array<std::uint32_t, 2>> succ;

  [[nodiscard]] std::size_t size() const { return label.size(); }
  [[nodiscard]] std::uint32_t child(std::uint32_t n, Dir d) const {
    return succ.at(n)[static_cast<int>(d)];
  }
  bool operator==(const RegularTree&) const = default;
};

// Word over Sigma x {L,R}; loop empty means a finite path.
struct PathWord {
  std::vector<std::pair<Letter, Dir>> prefix;
  std::vector<std::pair<Letter, Dir>> loop;
  bool operator==(const PathWord&) const = default;
};

struct Diagnostic {
  std::string invariant;
  std::string detail;
};

[[nodiscard]] std::vector<Diagnostic> validate(const TreeAutomaton& aut);
[[nodiscard]] std::vector<Diagnostic> validate(const RegularTree& t);

[[nodiscard]] bool is_conjunctive(const TreeAutomaton& g, State q, Letter a);

[[nodiscard]] TreeAutomaton complement_game(const TreeAutomaton& g);
[[nodiscard]] TreeAutomaton normalize_priorities(const TreeAutomaton& a);
// Order- and parity-preserving renaming of used priorities onto a dense range.
[[nodiscard]] TreeAutomaton compress_priorities(const TreeAutomaton& a);
[[nodiscard]] std::vector<Priority> compress_map(std::vector<Priority> used);

[[nodiscard]] PathWord unfold_path(const RegularTree& t, std::span<const Dir> directions);

// Copy of a with its letters permuted to follow `target` (same letter set).
[[nodiscard]] TreeAutomaton align_alphabet(const TreeAutomaton& a, const Alphabet& target);
[[nodiscard]] RegularTree align_alphabet(const RegularTree& t, const Alphabet& target);

// Adds a top state (even priority, self-loops) if missing and sets the kind.
[[nodiscard]] TreeAutomaton with_top(const TreeAutomaton& a, AutomatonKind kind);

// The universal game automaton: one state, priority 0, self-loops.
[[nodiscard]] TreeAutomaton universal_automaton(const Alphabet& sigma, Priority p = 0);
// Deterministic automaton rejecting every tree: one state of odd priority p.
[[nodiscard]] TreeAutomaton rejecting_automaton(const Alphabet& sigma, Priority p = 1);

}  // namespace treesep
