#include "treesep/verify.hpp"

#include <algorithm>

#include "treesep/tree.hpp"

namespace treesep {

namespace {

bool priorities_within(const std::vector<Priority>& used, const Variant& v) {
  if (!uses_priorities(v.kind)) return true;
  return std::all_of(used.begin(), used.end(),
                     [&](Priority p) { return std::binary_search(v.c.begin(), v.c.end(), p); });
}

}  // namespace

VerifyReport verify_separator(const TreeAutomaton& a, const TreeAutomaton& b0, const TreeAutomaton& s0,
                              const Variant& v) {
  VerifyReport r;
  const TreeAutomaton b = align_alphabet(b0, a.alphabet());
  const TreeAutomaton s = align_alphabet(s0, a.alphabet());
  for (const auto& d : validate(s)) r.problems.push_back(d.invariant + ": " + d.detail);
  const bool kind_ok = is_game_variant(v.kind) ? s.is_game_like() : s.kind() == AutomatonKind::Deterministic;
  if (!kind_ok) r.problems.push_back(std::string("shape: separator is ") + std::string(kind_name(s.kind())));
  r.shape_ok = r.problems.empty();
  r.priorities_ok = priorities_within(s.priority_set(), v);
  if (!r.priorities_ok) r.problems.push_back("priorities: separator uses a priority outside C");
  if (!r.shape_ok) return r;

  auto miss = decide_disjoint(a, complement_game(s));
  r.contained = miss.disjoint;
  r.containment_witness = std::move(miss.witness);
  if (!r.contained) r.problems.push_back("containment: a tree of A is rejected");
  auto hit = decide_disjoint(s, b);
  r.disjoint = hit.disjoint;
  r.disjointness_witness = std::move(hit.witness);
  if (!r.disjoint) r.problems.push_back("disjointness: a tree of B is accepted");
  r.pass = r.shape_ok && r.priorities_ok && r.contained && r.disjoint;
  return r;
}

std::optional<Counterexample> counterexample(const TreeAutomaton& a, const TreeAutomaton& b0, const TreeAutomaton& s0) {
  const TreeAutomaton b = align_alphabet(b0, a.alphabet());
  const TreeAutomaton s = align_alphabet(s0, a.alphabet());
  if (!s.is_game_like()) throw Error("counterexample: separator must be a game automaton");
  if (auto miss = decide_disjoint(a, complement_game(s)); !miss.disjoint) {
    Counterexample c{*miss.witness, Failure::NotContained, false};
    c.recertified = regular_tree_member(a, c.tree) && !regular_tree_member(s, c.tree);
    return c;
  }
  if (auto hit = decide_disjoint(s, b); !hit.disjoint) {
    Counterexample c{*hit.witness, Failure::NotDisjoint, false};
    c.recertified = regular_tree_member(s, c.tree) && regular_tree_member(b, c.tree);
    return c;
  }
  return std::nullopt;
}

CrossCheck cross_check_det(const TreeAutomaton& a, const TreeAutomaton& b0) {
  const TreeAutomaton b = align_alphabet(b0, a.alphabet());
  CrossCheck c;
  SeparabilityOptions opt;
  opt.synthesize = false;
  c.game_separable = decide_separability({VariantKind::TreeDet, {}}, a, b, opt).separable;
  const auto ta = trim(a);
  c.closure_separable = ta.empty || decide_disjoint(path_automaton(ta.automaton), b).disjoint;
  return c;
}

std::vector<TreeAutomaton> separator_mutants(const TreeAutomaton& s) {
  std::vector<TreeAutomaton> out;
  std::vector<State> live;
  for (State q = 0; q < s.num_states(); ++q)
    if (q != s.top()) live.push_back(q);
  for (State q : live) {
    auto pr = s.priorities();
    pr[q] ^= 1u;
    out.emplace_back(s.alphabet(), s.state_names(), s.initial(), std::move(pr), s.transitions(), s.kind(), s.top());
  }
  if (live.size() < 2) return out;
  auto next = [&](State q) {
    auto it = std::find(live.begin(), live.end(), q);
    return ++it == live.end() ? live.front() : *it;
  };
  for (std::size_t k = 0; k < s.transitions().size(); ++k) {
    const auto& t = s.transitions()[k];
    if (t.q == s.top()) continue;
    for (Dir d : {Dir::L, Dir::R}) {
      if (t.target(d) == s.top()) continue;
      auto ts = s.transitions();
      (d == Dir::L ? ts[k].left : ts[k].right) = next(t.target(d));
      out.emplace_back(s.alphabet(), s.state_names(), s.initial(), s.priorities(), std::move(ts), s.kind(), s.top());
    }
  }
  return out;
}

WordVerifyReport verify_word_separator(const WordAutomaton& a, const WordAutomaton& b, const WordAutomaton& s,
                                       const Variant& v) {
  WordVerifyReport r;
  r.shape_ok = validate(s).empty() && s.deterministic() && s.is_complete() && s.alphabet() == a.alphabet() &&
               b.alphabet() == a.alphabet();
  r.priorities_ok = priorities_within(s.priority_set(), v);
  if (!r.shape_ok) return r;
  r.containment_witness = intersection_lasso(a, dpa_complement(s));
  r.contained = !r.containment_witness;
  r.disjointness_witness = intersection_lasso(s, b);
  r.disjoint = !r.disjointness_witness;
  r.pass = r.priorities_ok && r.contained && r.disjoint;
  return r;
}

}  // namespace treesep
