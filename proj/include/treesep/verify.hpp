#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treesep/core.hpp"
#include "treesep/omega.hpp"
#include "treesep/separability.hpp"

namespace treesep {

struct VerifyReport {
  bool shape_ok = false;
  bool priorities_ok = false;
  bool contained = false;  // L(A) ⊆ L(S)
  bool disjoint = false;   // L(S) ∩ L(B) = ∅
  bool pass = false;
  std::vector<std::string> problems;
  std::optional<RegularTree> containment_witness;   // in L(A) \ L(S)
  std::optional<RegularTree> disjointness_witness;  // in L(S) ∩ L(B)
};

// Containment is checked as disjointness of A and the dual of S, so S must be
// a game automaton (deterministic counts). Language checks are skipped when
// the shape check fails.
[[nodiscard]] VerifyReport verify_separator(const TreeAutomaton& a, const TreeAutomaton& b, const TreeAutomaton& s,
                                            const Variant& v);

enum class Failure : std::uint8_t { NotContained, NotDisjoint };

struct Counterexample {
  RegularTree tree;
  Failure failure = Failure::NotContained;
  bool recertified = false;  // membership re-checked on the regular tree
};

// A tree refuting the separation property of s; nullopt when s separates.
[[nodiscard]] std::optional<Counterexample> counterexample(const TreeAutomaton& a, const TreeAutomaton& b,
                                                           const TreeAutomaton& s);

struct CrossCheck {
  bool game_separable = false;     // TreeDet game verdict
  bool closure_separable = false;  // path closure of A misses L(B)
  [[nodiscard]] bool agree() const { return game_separable == closure_separable; }
};

[[nodiscard]] CrossCheck cross_check_det(const TreeAutomaton& a, const TreeAutomaton& b);

// Every single-priority flip (p xor 1 on a non-top state) and every
// single-target flip (a non-top target moved to the next non-top state).
[[nodiscard]] std::vector<TreeAutomaton> separator_mutants(const TreeAutomaton& s);

struct WordVerifyReport {
  bool shape_ok = false;
  bool priorities_ok = false;
  bool contained = false;
  bool disjoint = false;
  bool pass = false;
  std::optional<Lasso> containment_witness;
  std::optional<Lasso> disjointness_witness;
};

[[nodiscard]] WordVerifyReport verify_word_separator(const WordAutomaton& a, const WordAutomaton& b,
                                                     const WordAutomaton& s, const Variant& v);

}  // namespace treesep
