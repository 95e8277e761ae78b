#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "treesep/separability.hpp"
#include "treesep/tree.hpp"
#include "treesep/verify.hpp"

using namespace treesep;
using namespace treesep::testing;

namespace {

const Variant det{VariantKind::TreeDet, {}};
const Variant game{VariantKind::TreeGame, {}};
Variant det_c(std::vector<Priority> c) { return {VariantKind::TreeDetC, std::move(c)}; }
Variant game_c(std::vector<Priority> c) { return {VariantKind::TreeGameC, std::move(c)}; }
Variant universal_c(std::vector<Priority> c) { return {VariantKind::TreeDetCUniversal, std::move(c)}; }

SeparabilityResult run(const Variant& v, const TreeAutomaton& a, const TreeAutomaton& b, bool verify = true) {
  SeparabilityOptions o;
  o.verify = verify;
  return decide_separability(v, a, b, o);
}

bool separable(const Variant& v, const TreeAutomaton& a, const TreeAutomaton& b) {
  SeparabilityOptions o;
  o.synthesize = false;
  return decide_separability(v, a, b, o).separable;
}

// Does a cycle with even maximal priority hang off the start node? Nodes
// are (round index, state); succ and pr are over node ids.
bool even_cycle_reachable(const std::vector<std::vector<std::size_t>>& succ, const std::vector<Priority>& pr,
                          std::size_t start) {
  const std::size_t n = succ.size();
  std::vector<char> reach(n, 0);
  std::vector<std::size_t> st{start};
  reach[start] = 1;
  while (!st.empty()) {
    auto v = st.back();
    st.pop_back();
    for (auto w : succ[v])
      if (!reach[w]) reach[w] = 1, st.push_back(w);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!reach[v] || pr[v] % 2 != 0) continue;
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> todo;
    for (auto w : succ[v])
      if (pr[w] <= pr[v] && !seen[w]) seen[w] = 1, todo.push_back(w);
    while (!todo.empty()) {
      auto x = todo.back();
      todo.pop_back();
      if (x == v) return true;
      for (auto w : succ[x])
        if (pr[w] <= pr[v] && !seen[w]) seen[w] = 1, todo.push_back(w);
    }
  }
  return false;
}

// Direct evaluation of a lasso play of rounds: Win_X holds iff some run of X
// following the play (letters, directions, selector guards) is accepting.
struct PlayOracle {
  const SeparabilityArena& arena;
  const std::vector<Slot> slots = arena.slots();

  int get(const std::vector<Choice>& o, Slot s) const {
    auto it = std::find(slots.begin(), slots.end(), s);
    return it == slots.end() ? -1 : static_cast<int>(o[static_cast<std::size_t>(it - slots.begin())]);
  }

  bool allowed(const std::vector<Choice>& o, int side, const TreeAutomaton& x, std::uint32_t t) const {
    if (get(o, Slot::F) < 0) return true;
    const int selected = get(o, Slot::M) == static_cast<int>(Mode::Or) ? 0 : 1;
    if (side != selected) return true;
    auto ids = x.by_letter(x.transitions()[t].a);
    const auto rank = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), t) - ids.begin());
    return static_cast<int>((o[static_cast<std::size_t>(std::find(slots.begin(), slots.end(), Slot::F) - slots.begin())] >> rank) & 1) ==
           get(o, Slot::D);
  }

  bool win_tree(int side, const std::vector<std::vector<Choice>>& rounds, std::size_t loop_start) const {
    const TreeAutomaton& x = side == 0 ? *arena.tree_a() : *arena.tree_b();
    const std::size_t nq = x.num_states(), n = rounds.size() * nq;
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<Priority> pr(n);
    for (std::size_t i = 0; i < rounds.size(); ++i) {
      const std::size_t next = i + 1 < rounds.size() ? i + 1 : loop_start;
      const auto& o = rounds[i];
      for (State q = 0; q < nq; ++q) {
        pr[i * nq + q] = x.priority(q);
        for (const auto& t : x.from(q, static_cast<Letter>(get(o, Slot::A)))) {
          const auto id = static_cast<std::uint32_t>(&t - x.transitions().data());
          if (allowed(o, side, x, id))
            succ[i * nq + q].push_back(next * nq + t.target(static_cast<Dir>(get(o, Slot::D))));
        }
      }
    }
    return even_cycle_reachable(succ, pr, x.initial());
  }

  bool win_word(int side, const std::vector<std::vector<Choice>>& rounds, std::size_t loop_start) const {
    const WordAutomaton& x = side == 0 ? *arena.word_a() : *arena.word_b();
    const std::size_t nq = x.num_states(), n = rounds.size() * nq;
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<Priority> pr(n);
    for (std::size_t i = 0; i < rounds.size(); ++i) {
      const std::size_t next = i + 1 < rounds.size() ? i + 1 : loop_start;
      for (State q = 0; q < nq; ++q) {
        pr[i * nq + q] = x.priority(q);
        for (State r : x.successors(q, static_cast<Letter>(get(rounds[i], Slot::A)))) succ[i * nq + q].push_back(next * nq + r);
      }
    }
    return even_cycle_reachable(succ, pr, x.initial());
  }

  bool input_wins(const std::vector<std::vector<Choice>>& prefix, const std::vector<std::vector<Choice>>& loop) const {
    auto rounds = prefix;
    rounds.insert(rounds.end(), loop.begin(), loop.end());
    const bool word = arena.word_a() != nullptr;
    const bool wa = word ? win_word(0, rounds, prefix.size()) : win_tree(0, rounds, prefix.size());
    const bool wb = word ? win_word(1, rounds, prefix.size()) : win_tree(1, rounds, prefix.size());
    if (!uses_priorities(arena.variant().kind)) return wa && wb;
    Priority cmax = 0;
    for (const auto& o : loop) cmax = std::max(cmax, arena.variant().c[static_cast<std::size_t>(get(o, Slot::C))]);
    return cmax % 2 == 1 ? wa : wb;
  }
};

std::vector<Choice> random_round(std::mt19937_64& rng, const SeparabilityArena& arena) {
  std::vector<Choice> o, buf;
  for (std::size_t k = 0; k < arena.num_decisions(); ++k) {
    buf.clear();
    arena.choices(0, o, buf);
    o.push_back(buf[rng() % buf.size()]);
  }
  return o;
}

void check_condition_against_oracle(std::mt19937_64& rng, const SeparabilityArena& arena, int plays) {
  WinCondition cond(arena);
  PlayOracle oracle{arena};
  for (int i = 0; i < plays; ++i) {
    std::vector<std::vector<Choice>> prefix, loop;
    const std::size_t lu = rng() % 3, lv = 1 + rng() % 3;
    for (std::size_t k = 0; k < lu; ++k) prefix.push_back(random_round(rng, arena));
    for (std::size_t k = 0; k < lv; ++k) loop.push_back(random_round(rng, arena));
    REQUIRE(cond.accepts(prefix, loop) == oracle.input_wins(prefix, loop));
  }
}

// All deterministic automata with states {s0, s1} (or just s0) plus TOP,
// priorities in c.
std::vector<TreeAutomaton> small_deterministic(const std::vector<Priority>& c) {
  std::vector<TreeAutomaton> out;
  for (std::size_t n = 1; n <= 2; ++n) {
    std::size_t tables = 1;
    for (std::size_t i = 0; i < 2 * n; ++i) tables *= n * n;
    std::size_t prs = 1;
    for (std::size_t i = 0; i < n; ++i) prs *= c.size();
    for (std::size_t t = 0; t < tables; ++t)
      for (std::size_t p = 0; p < prs; ++p) {
        std::vector<Transition> ts;
        std::size_t x = t;
        for (State q = 0; q < n; ++q)
          for (Letter a = 0; a < 2; ++a) {
            const auto l = static_cast<State>(x % n), r = static_cast<State>(x / n % n);
            x /= n * n;
            ts.push_back({q, a, l, r});
          }
        const auto top = static_cast<State>(n);
        for (Letter a = 0; a < 2; ++a) ts.push_back({top, a, top, top});
        std::vector<Priority> pr;
        std::vector<std::string> names;
        std::size_t y = p;
        for (std::size_t q = 0; q < n; ++q, y /= c.size()) {
          pr.push_back(c[y % c.size()]);
          names.push_back("s" + std::to_string(q));
        }
        pr.push_back(0);
        names.push_back("TOP");
        out.emplace_back(ab(), names, 0, pr, ts, AutomatonKind::Deterministic, top);
      }
  }
  return out;
}

// One-state game automata: each letter conjunctive or disjunctive.
std::vector<TreeAutomaton> small_games(const std::vector<Priority>& c) {
  std::vector<TreeAutomaton> out;
  for (auto p : c)
    for (int shape = 0; shape < 4; ++shape) {
      std::vector<Transition> ts;
      for (Letter a = 0; a < 2; ++a) {
        if ((shape >> a) & 1) {
          ts.push_back({0, a, 0, 1});
          ts.push_back({0, a, 1, 0});
        } else {
          ts.push_back({0, a, 0, 0});
        }
        ts.push_back({1, a, 1, 1});
      }
      out.emplace_back(ab(), std::vector<std::string>{"s0", "TOP"}, 0, std::vector<Priority>{p, 0}, ts,
                       shape ? AutomatonKind::Game : AutomatonKind::Deterministic, 1);
    }
  return out;
}

bool some_separates(const std::vector<TreeAutomaton>& candidates, const TreeAutomaton& a, const TreeAutomaton& b,
                    const Variant& v) {
  return std::any_of(candidates.begin(), candidates.end(),
                     [&](const TreeAutomaton& s) { return verify_separator(a, b, s, v).pass; });
}

}  // namespace

TEST_CASE("variants and round layout") {
  CHECK_THROWS_AS(check_variant({VariantKind::TreeDetC, {}}), Error);
  CHECK_THROWS_AS(check_variant({VariantKind::TreeDet, {0, 1}}), Error);
  CHECK_NOTHROW(check_variant(det_c({0, 1})));
  CHECK(round_slots(VariantKind::TreeDetC) == std::vector<Slot>{Slot::C, Slot::A, Slot::F, Slot::D});
  CHECK(round_slots(VariantKind::TreeGame) == std::vector<Slot>{Slot::A, Slot::M, Slot::F, Slot::D});
  CHECK(round_slots(VariantKind::WordDetC) == std::vector<Slot>{Slot::C, Slot::A});
  CHECK(round_slots(VariantKind::TreeDetCUniversal) == std::vector<Slot>{Slot::C, Slot::A, Slot::D});

  auto a = all_a_safety(), b = some_b();
  SeparabilityArena arena(game_c({0, 1}), a, b);
  CHECK(arena.player(0) == separator_player);
  CHECK(arena.player(1) == input_player);
  CHECK(arena.player(4) == input_player);
  std::vector<Choice> out;
  // Mode or: the selector ranges over A's transitions reading the letter.
  const std::vector<Choice> or_prefix{0, a_, static_cast<Choice>(Mode::Or)};
  arena.choices(0, or_prefix, out);
  CHECK(out.size() == std::size_t{1} << a.by_letter(a_).size());
  out.clear();
  const std::vector<Choice> and_prefix{0, a_, static_cast<Choice>(Mode::And)};
  arena.choices(0, and_prefix, out);
  CHECK(out.size() == std::size_t{1} << b.by_letter(a_).size());
  CHECK(arena.selector_domain(or_prefix) == arena.tree_a());
  CHECK(arena.selector_domain(and_prefix) == arena.tree_b());
  CHECK_THROWS_AS(SeparabilityArena(det, a, TreeAutomaton(Alphabet({"x", "y"}), {"q"}, 0, {0}, {})), Error);
}

TEST_CASE("winning condition agrees with direct play evaluation") {
  std::mt19937_64 rng(base_seed() + 40);
  const std::vector<Variant> variants{det, game, det_c({0, 1}), game_c({1, 2}), universal_c({0, 1, 2})};
  auto a = all_a_safety(), b = some_b();
  for (const auto& v : variants) {
    SeparabilityArena arena(v, a, b);
    check_condition_against_oracle(rng, arena, 150);
    SeparabilityArena swapped(v, b, a);
    check_condition_against_oracle(rng, swapped, 150);
  }
  for (int i = 0; i < 12; ++i) {
    auto [x, y] = random_trimmed_pair(rng, 3);
    SeparabilityArena arena(variants[static_cast<std::size_t>(i) % variants.size()], x, y);
    check_condition_against_oracle(rng, arena, 60);
  }
  // A side with only even priorities goes through the subset track.
  for (int i = 0; i < 16; ++i) {
    auto x = trim(random_nondet(rng, 3, 0)), y = trim(random_nondet(rng, 3));
    if (x.empty || y.empty) continue;
    const auto& v = i % 2 ? det : game;
    SeparabilityArena arena(v, x.automaton, y.automaton);
    CHECK(InputNba(arena).subset_side() == 0);
    check_condition_against_oracle(rng, arena, 60);
    SeparabilityArena swapped(v, y.automaton, x.automaton);
    CHECK(InputNba(swapped).subset_side() >= 0);
    check_condition_against_oracle(rng, swapped, 60);
  }
  auto wa = word(ab(), {0, 1}, {{0, a_, 0}, {0, b_, 1}, {1, a_, 1}, {1, b_, 1}}, true);
  auto wb = word(ab(), {1, 2}, {{0, a_, 0}, {0, b_, 1}, {1, a_, 1}, {1, b_, 1}, {0, a_, 1}}, false);
  SeparabilityArena warena({VariantKind::WordDetC, {0, 1, 2}}, wa, wb);
  check_condition_against_oracle(rng, warena, 200);
}

TEST_CASE("input automaton size") {
  auto a = all_a_safety(), b = some_b();
  auto evens = [](const TreeAutomaton& x) {
    std::set<Priority> e;
    for (auto p : x.priorities())
      if (p % 2 == 0) e.insert(p);
    return e.size();
  };
  // Without priorities: one block over Q_A x Q_B, each pair either before
  // the guess or in one of three phases per pair of even guesses.
  SeparabilityArena d(det, a, b);
  InputNba nd(d);
  const std::size_t pairs = a.num_states() * b.num_states();
  CHECK(nd.num_states() == pairs * (1 + 3 * evens(a) * evens(b)));
  CHECK(nd.block_sizes() == std::vector<std::size_t>{nd.num_states()});
  // With priorities: a fresh initial state, then A against the odd members
  // of C and B against the even ones. Linear in |Q| for a fixed C.
  SeparabilityArena c(det_c({0, 1, 2}), a, b);
  InputNba nc(c);
  const std::vector<std::size_t> blocks{a.num_states() * (1 + 3 * evens(a) * 1),
                                        b.num_states() * (1 + 3 * evens(b) * 2)};
  CHECK(nc.block_sizes() == blocks);
  CHECK(nc.num_states() == 1 + blocks[0] + blocks[1]);
  CHECK(nd.subset_side() == -1);
  CHECK(nc.subset_side() == -1);
  // A safety side is left to the subset track: one flagless block over the other side.
  auto all_b = TreeAutomaton(ab(), {"qB"}, 0, {0}, {{0, b_, 0, 0}});
  SeparabilityArena s(det, all_b, b);
  InputNba ns(s);
  CHECK(ns.subset_side() == 0);
  CHECK(ns.num_states() == b.num_states() * (1 + evens(b)));
  SeparabilityArena s2(game, b, all_b);
  CHECK(InputNba(s2).subset_side() == 1);
}

TEST_CASE("separability on the hand corpus") {
  auto all_a = all_a_safety(), sb = some_b();

  SUBCASE("safety vs reachability") {
    for (const auto& v : {det, game, det_c({0, 1}), game_c({0, 1})}) {
      auto r = run(v, all_a, sb);
      CHECK(r.separable);
      REQUIRE(r.separator);
      CHECK(r.verified == true);
      CHECK(r.separator->num_states() <= r.stats.determinized_states + 1);
    }
    // Only priority 0: the separator would accept everything.
    CHECK_FALSE(separable(det_c({0}), all_a, sb));
    CHECK_FALSE(separable(det_c({1}), all_a, sb));
  }

  SUBCASE("reachability vs safety discriminates det from game") {
    auto r = run(det, sb, all_a);
    CHECK_FALSE(r.separable);
    CHECK_FALSE(r.separator);
    // Oracle: the path closure of "some b" contains the all-a tree.
    CHECK(regular_tree_member(path_automaton(trim(sb).automaton), all_a_tree()));
    CHECK_FALSE(decide_disjoint(path_automaton(trim(sb).automaton), all_a).disjoint);
    auto g = run(game, sb, all_a);
    CHECK(g.separable);
    REQUIRE(g.separator);
    CHECK(g.verified == true);
    // The dual of the all-a automaton separates as well.
    CHECK(verify_separator(sb, all_a, complement_game(all_a), game).pass);
  }

  SUBCASE("equal languages are never separable") {
    for (const auto& v : {det, game, det_c({0, 1, 2}), game_c({0, 1, 2}), universal_c({0, 1})}) {
      CHECK_FALSE(separable(v, sb, sb));
      CHECK_FALSE(separable(v, all_a, all_a));
    }
    SeparabilityOptions o;
    o.overlap_check = false;
    CHECK_FALSE(decide_separability(game, sb, sb, o).separable);
    CHECK_FALSE(decide_separability(det_c({0, 1}), all_a, all_a, o).separable);
  }

  SUBCASE("empty languages") {
    TreeAutomaton none(ab(), {"q"}, 0, {0}, {});
    auto r = run(det_c({0, 1}), sb, none);
    CHECK(r.separable);
    CHECK(r.shortcut);
    REQUIRE(r.separator);
    CHECK(*r.separator == universal_automaton(ab(), 0));
    CHECK_FALSE(separable(det_c({1}), sb, none));
    auto e = run(game_c({2, 3}), none, sb);
    CHECK(e.separable);
    REQUIRE(e.separator);
    CHECK(e.separator->priority_set() == std::vector<Priority>{3});
    CHECK(e.verified == true);
    CHECK_FALSE(separable(det_c({2}), none, sb));
    CHECK(separable(det_c({2}), none, none));
  }

  SUBCASE("universally rejecting") {
    // Every branch of a tree with root b starts with b, which sends the
    // safety automaton to its rejecting sink.
    CHECK(decide_universally_rejecting(all_a, root_b(), {0, 1}));
    // The leftmost branch of b_right_tree reads only a, exactly like a
    // branch of the all-a tree, so any deterministic S containing the all-a
    // tree accepts that branch.
    CHECK(regular_tree_member(sb, b_right_tree()));
    const std::vector<Dir> left(5, Dir::L);
    CHECK(unfold_path(b_right_tree(), left) == unfold_path(all_a_tree(), left));
    CHECK_FALSE(decide_universally_rejecting(all_a, sb, {0, 1}));
    CHECK_FALSE(decide_universally_rejecting(sb, sb, {0, 1, 2}));
  }
}

TEST_CASE("synthesized separators carry their variant's shape") {
  std::mt19937_64 rng(base_seed() + 41);
  int separable_runs = 0;
  for (int i = 0; i < 25; ++i) {
    auto [a, b] = random_trimmed_pair(rng, 3);
    for (const auto& v : {det, game, det_c({0, 1}), game_c({0, 1}), universal_c({0, 1})}) {
      auto r = run(v, a, b);
      CHECK(r.separable == r.separator.has_value());
      if (!r.separable) continue;
      ++separable_runs;
      CHECK(r.verified == true);
      const auto& s = *r.separator;
      CHECK(validate(s).empty());
      if (is_game_variant(v.kind))
        CHECK(s.is_game_like());
      else
        CHECK(s.kind() == AutomatonKind::Deterministic);
      if (uses_priorities(v.kind))
        for (auto p : s.priority_set()) CHECK(std::binary_search(v.c.begin(), v.c.end(), p));
      CHECK(s.num_states() <= r.stats.determinized_states + 1);
    }
  }
  CHECK(separable_runs > 10);
}

TEST_CASE("strength chains and monotonicity") {
  std::mt19937_64 rng(base_seed() + 42);
  for (int i = 0; i < 25; ++i) {
    auto [a, b] = random_trimmed_pair(rng, 3);
    const bool g = separable(game, a, b), d = separable(det, a, b);
    for (const auto& c : std::vector<std::vector<Priority>>{{0}, {1}, {0, 1}, {1, 2}}) {
      const bool u = decide_universally_rejecting(a, b, c), dc = separable(det_c(c), a, b),
                 gc = separable(game_c(c), a, b);
      CHECK((!u || dc));
      CHECK((!dc || gc));
      CHECK((!gc || g));
      CHECK((!dc || d));
    }
    for (const auto& [c, cc] : std::vector<std::pair<std::vector<Priority>, std::vector<Priority>>>{
             {{0}, {0, 1}}, {{1}, {0, 1}}, {{1}, {1, 2}}}) {
      CHECK((!separable(det_c(c), a, b) || separable(det_c(cc), a, b)));
      CHECK((!separable(game_c(c), a, b) || separable(game_c(cc), a, b)));
    }
    if (d) CHECK(separable(det_c(path_automaton(a).priority_set()), a, b));
  }
}

TEST_CASE("small separators found by enumeration are found by the games") {
  std::mt19937_64 rng(base_seed() + 43);
  const std::vector<Priority> c{0, 1};
  const auto dets = small_deterministic(c);
  const auto games = small_games(c);
  int positive = 0;
  for (int i = 0; i < 12; ++i) {
    auto [a, b] = random_trimmed_pair(rng, 3);
    if (some_separates(dets, a, b, det_c(c))) {
      ++positive;
      CHECK(separable(det_c(c), a, b));
      CHECK(separable(det, a, b));
    }
    if (some_separates(games, a, b, game_c(c))) CHECK(separable(game_c(c), a, b));
  }
  auto all_a = all_a_safety(), sb = some_b();
  CHECK(some_separates(dets, all_a, sb, det_c(c)));
  CHECK(separable(game_c(c), sb, all_a));
  CHECK(positive > 0);
}

TEST_CASE("path automaton") {
  auto sb = some_b();
  auto p = path_automaton(sb);
  CHECK(p.kind() == AutomatonKind::Deterministic);
  CHECK(validate(p).empty());
  CHECK(regular_tree_member(p, all_a_tree()));

  std::mt19937_64 rng(base_seed() + 44);
  auto trees = all_small_trees(2);
  for (int i = 0; i < 30; ++i) {
    auto a = trim(random_nondet(rng, 3));
    if (a.empty) continue;
    auto pa = path_automaton(a.automaton);
    CHECK(decide_disjoint(a.automaton, complement_game(pa)).disjoint);
    for (const auto& t : trees)
      if (regular_tree_member(a.automaton, t)) CHECK(regular_tree_member(pa, t));
  }
  for (int i = 0; i < 30; ++i) {
    auto d = random_game_automaton(rng, 3, 2, true);
    auto t = trim(d);
    if (t.empty) continue;
    auto pd = path_automaton(t.automaton);
    // Deterministic languages are path-closed.
    CHECK(decide_disjoint(pd, complement_game(d)).disjoint);
    CHECK(decide_disjoint(d, complement_game(pd)).disjoint);
  }
}

TEST_CASE("cross_check_det") {
  auto all_a = all_a_safety(), sb = some_b();
  auto c = cross_check_det(sb, all_a);
  CHECK_FALSE(c.game_separable);
  CHECK_FALSE(c.closure_separable);
  std::mt19937_64 rng(base_seed() + 45);
  for (int i = 0; i < 20; ++i) {
    auto d = random_game_automaton(rng, 3, 2, true);
    if (trim(d).empty || trim(complement_game(d)).empty) continue;
    auto x = cross_check_det(d, complement_game(d));
    CHECK(x.game_separable);
    CHECK(x.agree());
  }
  for (int i = 0; i < 30; ++i) {
    auto [a, b] = random_trimmed_pair(rng);
    CHECK(cross_check_det(a, b).agree());
  }
}

TEST_CASE("generalised game automata") {
  std::mt19937_64 rng(base_seed() + 46);
  auto trees = all_small_trees(2);
  const Alphabet paths = path_alphabet(ab());
  CHECK(paths.size() == 4);
  CHECK(paths.name(2 * b_ + 1) == "b.R");

  // Universal condition: every run accepting, so only the shape matters.
  std::vector<WordTransition> loop;
  for (Letter l = 0; l < 4; ++l) loop.push_back({0, l, 0});
  auto all = word(paths, {0}, loop, true);
  for (int i = 0; i < 20; ++i) {
    auto base = random_game_automaton(rng);
    GeneralisedGameAutomaton g{base, all};
    CHECK(validate(g).empty());
    auto h = generalised_to_game(g);
    for (const auto& t : trees) {
      std::vector<Priority> zero(base.num_states(), 0);
      TreeAutomaton shape(base.alphabet(), base.state_names(), base.initial(), zero, base.transitions(), base.kind(),
                          base.top());
      CHECK(generalised_member(g, t) == regular_tree_member(shape, t));
      CHECK(regular_tree_member(h, t) == regular_tree_member(shape, t));
    }
  }

  for (int i = 0; i < 40; ++i) {
    auto base = random_game_automaton(rng);
    auto cond = npa_to_dpa(random_npa(rng, 3, 2, 4));
    cond = WordAutomaton(paths, cond.state_names(), cond.initial(), cond.priorities(), cond.transitions(), true);
    GeneralisedGameAutomaton g{base, cond};
    REQUIRE(validate(g).empty());
    auto h = generalised_to_game(g);
    CHECK(validate(h).empty());
    CHECK(h.num_states() <= (base.num_states() - 1) * cond.num_states() + 1);
    for (const auto& t : trees) REQUIRE(generalised_member(g, t) == regular_tree_member(h, t));
  }
}

TEST_CASE("word separability") {
  // A: only a^omega (safety); B: some b.
  auto only_a = word(ab(), {0, 1}, {{0, a_, 0}, {0, b_, 1}, {1, a_, 1}, {1, b_, 1}}, true);
  auto some_b_word = word(ab(), {1, 2}, {{0, a_, 0}, {0, b_, 1}, {1, a_, 1}, {1, b_, 1}}, true);
  const Variant v01{VariantKind::WordDetC, {0, 1}};
  SeparabilityOptions o;
  o.verify = true;
  auto r = decide_separability(v01, only_a, some_b_word, o);
  CHECK(r.separable);
  REQUIRE(r.word_separator);
  CHECK(r.verified == true);
  CHECK_FALSE(decide_separability({VariantKind::WordDetC, {0}}, only_a, some_b_word).separable);
  CHECK_FALSE(decide_separability({VariantKind::WordDetC, {1}}, only_a, some_b_word).separable);
  CHECK_FALSE(decide_separability(v01, some_b_word, some_b_word).separable);

  // Infinitely many a vs finitely many a needs both parities above 0:
  // {1,2} separates, {0,1} does not (a weak condition cannot).
  auto inf_a = word(ab(), {2, 1}, {{0, a_, 0}, {0, b_, 1}, {1, a_, 0}, {1, b_, 1}}, true);
  auto fin_a = word(ab(), {1, 0}, {{0, a_, 0}, {0, b_, 1}, {1, a_, 0}, {1, b_, 1}}, true);
  auto s = decide_separability({VariantKind::WordDetC, {1, 2}}, inf_a, fin_a, o);
  CHECK(s.separable);
  CHECK(s.verified == true);
  CHECK_FALSE(decide_separability(v01, inf_a, fin_a).separable);

  std::mt19937_64 rng(base_seed() + 47);
  for (int i = 0; i < 20; ++i) {
    auto x = random_npa(rng, 3, 2, 2), y = random_npa(rng, 3, 2, 2);
    x = WordAutomaton(ab(), x.state_names(), x.initial(), x.priorities(), x.transitions(), false);
    y = WordAutomaton(ab(), y.state_names(), y.initial(), y.priorities(), y.transitions(), false);
    auto w = decide_separability({VariantKind::WordDetC, {0, 1, 2}}, x, y, o);
    if (intersection_lasso(x, y)) CHECK_FALSE(w.separable);
    if (w.separable) CHECK(w.verified == true);
  }
}
