#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "treesep/core.hpp"

namespace treesep {

struct WordTransition {
  State q = 0;
  Letter a = 0;
  State to = 0;
  auto operator<=>(const WordTransition&) const = default;
};

// Parity automaton over infinite words (max-parity). Buchi automata are the
// fragment with priorities in {1,2}.
class WordAutomaton {
 public:
  WordAutomaton() = default;
  WordAutomaton(Alphabet alphabet, std::vector<std::string> state_names, State initial,
                std::vector<Priority> priority, std::vector<WordTransition> transitions,
                bool deterministic);

  [[nodiscard]] const Alphabet& alphabet() const { return alphabet_; }
  [[nodiscard]] std::size_t num_states() const { return names_.size(); }
  [[nodiscard]] State initial() const { return initial_; }
  [[nodiscard]] Priority priority(State q) const { return priority_.at(q); }
  [[nodiscard]] const std::vector<Priority>& priorities() const { return priority_; }
  [[nodiscard]] const std::vector<WordTransition>& transitions() const { return transitions_; }
  [[nodiscard]] bool deterministic() const { return deterministic_; }
  [[nodiscard]] const std::string& state_name(State q) const { return names_.at(q); }
  [[nodiscard]] const std::vector<std::string>& state_names() const { return names_; }
  [[nodiscard]] std::optional<State> find_state(std::string_view name) const;

  [[nodiscard]] std::span<const State> successors(State q, Letter a) const;
  [[nodiscard]] bool is_complete() const;
  [[nodiscard]] bool is_buchi() const;
  [[nodiscard]] std::vector<Priority> priority_set() const;
  // Unique successor of a deterministic complete automaton.
  [[nodiscard]] State step(State q, Letter a) const { return successors(q, a)[0]; }

  bool operator==(const WordAutomaton& o) const;

 private:
  Alphabet alphabet_;
  std::vector<std::string> names_;
  State initial_ = 0;
  std::vector<Priority> priority_;
  std::vector<WordTransition> transitions_;
  bool deterministic_ = false;
  std::vector<std::uint32_t> begin_;
  std::vector<State> targets_;
};

[[nodiscard]] std::vector<Diagnostic> validate(const WordAutomaton& w);

struct Lasso {
  std::vector<Letter> prefix;
  std::vector<Letter> loop;
};

// A nondeterministic parity automaton given by its successor function, so
// that automata over large structured alphabets are never materialized.
class NpaSource {
 public:
  virtual ~NpaSource() = default;
  [[nodiscard]] virtual std::size_t num_states() const = 0;
  [[nodiscard]] virtual State initial() const = 0;
  [[nodiscard]] virtual Priority priority(State q) const = 0;
  virtual void successors(State q, Letter a, std::vector<State>& out) const = 0;
};

class WordSource final : public NpaSource {
 public:
  explicit WordSource(const WordAutomaton& w) : w_(w) {}
  [[nodiscard]] std::size_t num_states() const override { return w_.num_states(); }
  [[nodiscard]] State initial() const override { return w_.initial(); }
  [[nodiscard]] Priority priority(State q) const override { return w_.priority(q); }
  void successors(State q, Letter a, std::vector<State>& out) const override;

 private:
  const WordAutomaton& w_;
};

// Buchi automaton with states P u P x C_even (C = priorities of the input).
// After the jump to (p,c) a run dies on any priority above c; (p,c) with
// priority exactly c is accepting.
class NbaOfNpa final : public NpaSource {
 public:
  explicit NbaOfNpa(const NpaSource& npa);
  [[nodiscard]] std::size_t num_states() const override;
  [[nodiscard]] State initial() const override { return npa_.initial(); }
  [[nodiscard]] Priority priority(State q) const override;
  void successors(State q, Letter a, std::vector<State>& out) const override;
  // State of the input automaton tracked by q.
  [[nodiscard]] State origin(State q) const;
  [[nodiscard]] const std::vector<Priority>& guesses() const { return evens_; }
  [[nodiscard]] std::size_t input_priorities() const { return k_; }

 private:
  const NpaSource& npa_;
  std::size_t n_;
  std::size_t k_;
  std::vector<Priority> evens_;
  mutable std::vector<State> buf_;
};

// Piterman's compact Safra trees, explored lazily. Nodes are named by age;
// the state also records the priority of the step that produced it.
class SafraDeterminizer {
 public:
  explicit SafraDeterminizer(const NpaSource& nba);
  ~SafraDeterminizer();
  SafraDeterminizer(const SafraDeterminizer&) = delete;
  SafraDeterminizer& operator=(const SafraDeterminizer&) = delete;

  [[nodiscard]] State initial() const { return 0; }
  State step(State s, Letter a);
  [[nodiscard]] Priority priority(State s) const;
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] bool is_sink(State s) const;
  // States of the underlying automaton occurring in the tree of s.
  [[nodiscard]] std::vector<State> support(State s) const;
  [[nodiscard]] std::size_t nba_states() const { return nba_.num_states(); }
  // Explores every state reachable over letters [0, letters) and returns the
  // complete deterministic automaton.
  WordAutomaton materialize(const Alphabet& alphabet);

 private:
  struct Impl;
  const NpaSource& nba_;
  std::unique_ptr<Impl> impl_;
};

[[nodiscard]] WordAutomaton npa_to_nba(const WordAutomaton& a);
[[nodiscard]] WordAutomaton nba_to_dpa(const WordAutomaton& a);
[[nodiscard]] WordAutomaton npa_to_dpa(const WordAutomaton& a);
[[nodiscard]] WordAutomaton dpa_complement(const WordAutomaton& a);
// Buchi automaton for L(A) n L(B), A and B deterministic complete.
[[nodiscard]] WordAutomaton conjunction_nba(const WordAutomaton& a, const WordAutomaton& b);
[[nodiscard]] WordAutomaton conjunction_dpa(const WordAutomaton& a, const WordAutomaton& b);
// Buchi automaton for L(A) u L(B), both Buchi over the same alphabet.
[[nodiscard]] WordAutomaton nba_union(const WordAutomaton& a, const WordAutomaton& b);
// Relabels priorities onto a dense range without changing the language.
[[nodiscard]] WordAutomaton compress_priorities(const WordAutomaton& a);
// Same transitions, fewest priorities: every cycle keeps the parity of its
// maximum, so every run keeps its verdict.
[[nodiscard]] WordAutomaton minimize_priorities(const WordAutomaton& a);
// Restriction to the states reachable from the initial state.
[[nodiscard]] WordAutomaton reachable_part(const WordAutomaton& a);

[[nodiscard]] bool lasso_member(const WordAutomaton& a, const Lasso& w);

// A lasso accepted by both automata (same alphabet), or nullopt when
// L(x) ∩ L(y) = ∅. Searches the product for a cycle whose maximal x- and
// y-priorities are both even.
[[nodiscard]] std::optional<Lasso> intersection_lasso(const WordAutomaton& x, const WordAutomaton& y);

// Size bounds for the determinization chain.
[[nodiscard]] double nba_size_bound(std::size_t n, std::size_t k);
[[nodiscard]] double dpa_state_bound(std::size_t nba_states);
[[nodiscard]] std::size_t dpa_priority_bound(std::size_t nba_states);

}  // namespace treesep
