#include "treesep/core.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace treesep {

Alphabet::Alphabet(std::vector<std::string> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw Error("alphabet must be nonempty");
  std::unordered_set<std::string> seen;
  for (const auto& l : letters_)
    if (!seen.insert(l).second) throw Error("duplicate letter '" + l + "'");
}

std::optional<Letter> Alphabet::find(std::string_view name) const {
  for (std::size_t i = 0; i < letters_.size(); ++i)
    if (letters_[i] == name) return static_cast<Letter>(i);
  return std::nullopt;
}

std::string_view kind_name(AutomatonKind k) {
  switch (k) {
    case AutomatonKind::Nondeterministic: return "nondet";
    case AutomatonKind::Deterministic: return "det";
    case AutomatonKind::Game: return "game";
  }
  return "?";
}

TreeAutomaton::TreeAutomaton(Alphabet alphabet, std::vector<std::string> state_names, State initial,
                             std::vector<Priority> priority, std::vector<Transition> transitions,
                             AutomatonKind kind, State top)
    : alphabet_(std::move(alphabet)),
      names_(std::move(state_names)),
      initial_(initial),
      priority_(std::move(priority)),
      transitions_(std::move(transitions)),
      kind_(kind),
      top_(top) {
  std::sort(transitions_.begin(), transitions_.end());
  transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());

  const std::size_t n = names_.size();
  const std::size_t s = alphabet_.size();
  // Valid transitions sort before nothing in particular; index only in-range ones.
  qa_begin_.assign(n * s + 1, 0);
  std::vector<std::uint32_t> count(n * s, 0);
  for (const auto& t : transitions_)
    if (t.q < n && t.a < s) ++count[t.q * s + t.a];
  // Sorted order groups (q, a); out-of-range q sort to the end.
  std::uint32_t pos = 0;
  for (std::size_t i = 0; i < n * s; ++i) {
    qa_begin_[i] = pos;
    pos += count[i];
  }
  qa_begin_[n * s] = pos;
  // Transitions with q in range but letter out of range would break contiguity.
  // They are left outside the index; validate() reports them.
  std::vector<std::uint32_t> fill(qa_begin_.begin(), qa_begin_.end() - 1);
  std::vector<Transition> ordered;
  ordered.reserve(transitions_.size());
  std::vector<Transition> rest;
  for (const auto& t : transitions_) {
    if (t.q < n && t.a < s)
      ordered.push_back(t);
    else
      rest.push_back(t);
  }
  ordered.insert(ordered.end(), rest.begin(), rest.end());
  transitions_ = std::move(ordered);

  letter_begin_.assign(s + 1, 0);
  std::vector<std::uint32_t> lc(s, 0);
  for (std::uint32_t i = 0; i < pos; ++i) ++lc[transitions_[i].a];
  for (std::size_t a = 0; a < s; ++a) letter_begin_[a + 1] = letter_begin_[a] + lc[a];
  letter_index_.assign(pos, 0);
  letter_rank_.assign(transitions_.size(), 0);
  std::vector<std::uint32_t> cur(letter_begin_.begin(), letter_begin_.end() - 1);
  for (std::uint32_t i = 0; i < pos; ++i) {
    const Letter a = transitions_[i].a;
    letter_rank_[i] = cur[a] - letter_begin_[a];
    letter_index_[cur[a]++] = i;
  }
}

std::optional<State> TreeAutomaton::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<State>(i);
  return std::nullopt;
}

std::span<const Transition> TreeAutomaton::from(State q, Letter a) const {
  if (q >= names_.size() || a >= alphabet_.size()) return {};
  const std::size_t i = q * alphabet_.size() + a;
  return {transitions_.data() + qa_begin_[i], transitions_.data() + qa_begin_[i + 1]};
}

std::span<const std::uint32_t> TreeAutomaton::by_letter(Letter a) const {
  if (a >= alphabet_.size()) return {};
  return {letter_index_.data() + letter_begin_[a], letter_index_.data() + letter_begin_[a + 1]};
}

std::vector<Priority> TreeAutomaton::priority_set() const {
  std::set<Priority> s;
  for (State q = 0; q < priority_.size(); ++q)
    if (q != top_) s.insert(priority_[q]);
  return {s.begin(), s.end()};
}

bool TreeAutomaton::operator==(const TreeAutomaton& o) const {
  return alphabet_ == o.alphabet_ && names_ == o.names_ && initial_ == o.initial_ &&
         priority_ == o.priority_ && transitions_ == o.transitions_ && kind_ == o.kind_ &&
         top_ == o.top_;
}

namespace {

std::string show(const TreeAutomaton& a, const Transition& t) {
  auto st = [&](State q) {
    return q < a.num_states() ? a.state_name(q) : "#" + std::to_string(q);
  };
  const std::string letter =
      t.a < a.alphabet().size() ? a.alphabet().name(t.a) : "#" + std::to_string(t.a);
  return st(t.q) + " " + letter + " -> " + st(t.left) + " " + st(t.right);
}

}  // namespace

std::vector<Diagnostic> validate(const TreeAutomaton& a) {
  std::vector<Diagnostic> out;
  const std::size_t n = a.num_states();
  if (a.alphabet().size() == 0) out.push_back({"alphabet", "alphabet is empty"});
  if (n == 0) out.push_back({"states", "no states"});
  if (a.initial() >= n) out.push_back({"initial", "initial state is not a declared state"});
  if (a.priorities().size() != n)
    out.push_back({"priority", "priority map does not match the state set"});
  for (const auto& t : a.transitions()) {
    if (t.q >= n || t.left >= n || t.right >= n)
      out.push_back({"transition-endpoint", "transition " + show(a, t) + " uses an undeclared state"});
    if (t.a >= a.alphabet().size())
      out.push_back({"transition-letter", "transition " + show(a, t) + " uses an undeclared letter"});
  }
  if (!out.empty() || a.kind() == AutomatonKind::Nondeterministic) return out;

  const State top = a.top();
  if (top >= n) {
    out.push_back({"top", "game automaton has no top state"});
    return out;
  }
  if (top == a.initial()) out.push_back({"top", "top state is the initial state"});
  if (a.priority(top) % 2 != 0) out.push_back({"top", "top state has odd priority"});
  for (Letter x = 0; x < a.alphabet().size(); ++x) {
    auto ts = a.from(top, x);
    if (ts.size() != 1 || ts[0].left != top || ts[0].right != top)
      out.push_back({"top", "top must have exactly the self-loop on letter " + a.alphabet().name(x)});
  }
  for (State q = 0; q < n; ++q) {
    if (q == top) continue;
    for (Letter x = 0; x < a.alphabet().size(); ++x) {
      auto ts = a.from(q, x);
      const std::string where = a.state_name(q) + "/" + a.alphabet().name(x);
      if (ts.size() == 1) {
        if (ts[0].left == top || ts[0].right == top)
          out.push_back({"shape", "conjunctive transition " + show(a, ts[0]) + " targets top"});
      } else if (ts.size() == 2 && a.kind() == AutomatonKind::Game) {
        // Sorted order puts (q,a,top,qR) after (q,a,qL,top) only when qL < top; check both.
        const Transition* l = nullptr;
        const Transition* r = nullptr;
        for (const auto& t : ts) {
          if (t.right == top && t.left != top) l = &t;
          if (t.left == top && t.right != top) r = &t;
        }
        if (l == nullptr || r == nullptr)
          out.push_back({"shape", "transitions at " + where + " are not a disjunctive pair"});
      } else if (ts.empty()) {
        out.push_back({"shape", "no transition at " + where});
      } else {
        out.push_back({"shape", std::to_string(ts.size()) + " transitions at " + where});
      }
      if (a.kind() == AutomatonKind::Deterministic && ts.size() == 2)
        out.push_back({"deterministic", "disjunctive transitions at " + where});
    }
  }
  return out;
}

std::vector<Diagnostic> validate(const RegularTree& t) {
  std::vector<Diagnostic> out;
  const std::size_t n = t.label.size();
  if (n == 0) out.push_back({"nodes", "tree has no nodes"});
  if (t.succ.size() != n) out.push_back({"succ", "successor map does not match the node set"});
  if (t.root >= n) out.push_back({"root", "root is not a node"});
  for (std::size_t i = 0; i < n; ++i) {
    if (t.label[i] >= t.alphabet.size())
      out.push_back({"label", "node " + std::to_string(i) + " has an undeclared letter"});
    if (i < t.succ.size())
      for (auto c : t.succ[i])
        if (c >= n) out.push_back({"succ", "node " + std::to_string(i) + " has an undeclared child"});
  }
  return out;
}

bool is_conjunctive(const TreeAutomaton& g, State q, Letter a) {
  return g.from(q, a).size() == 1;
}

TreeAutomaton complement_game(const TreeAutomaton& g) {
  if (!g.is_game_like()) throw Error("complement_game: input is not a game automaton");
  if (auto d = validate(g); !d.empty())
    throw Error("complement_game: invalid game automaton: " + d.front().detail);
  const State top = g.top();
  std::vector<Transition> ts;
  bool any_disjunctive = false;
  for (State q = 0; q < g.num_states(); ++q) {
    for (Letter a = 0; a < g.alphabet().size(); ++a) {
      auto cur = g.from(q, a);
      if (q == top) {
        ts.push_back(cur[0]);
      } else if (cur.size() == 1) {
        ts.push_back({q, a, cur[0].left, top});
        ts.push_back({q, a, top, cur[0].right});
        any_disjunctive = true;
      } else {
        State l = no_state, r = no_state;
        for (const auto& t : cur) {
          if (t.right == top) l = t.left;
          if (t.left == top) r = t.right;
        }
        ts.push_back({q, a, l, r});
      }
    }
  }
  std::vector<Priority> pr = g.priorities();
  for (State q = 0; q < pr.size(); ++q)
    if (q != top) pr[q] += 1;
  const AutomatonKind kind = any_disjunctive ? AutomatonKind::Game : AutomatonKind::Deterministic;
  return {g.alphabet(), g.state_names(), g.initial(), std::move(pr), std::move(ts), kind, top};
}

TreeAutomaton normalize_priorities(const TreeAutomaton& a) {
  if (a.num_states() == 0) return a;
  Priority lo = std::numeric_limits<Priority>::max();
  for (auto p : a.priorities()) lo = std::min(lo, p);
  const Priority shift = 2 * (lo / 2);
  std::vector<Priority> pr = a.priorities();
  for (auto& p : pr) p -= shift;
  return {a.alphabet(), a.state_names(), a.initial(), std::move(pr), a.transitions(), a.kind(), a.top()};
}

std::vector<Priority> compress_map(std::vector<Priority> used) {
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  if (used.empty()) return {};
  std::vector<Priority> map(used.back() + 1, 0);
  Priority cur = used.front() % 2;
  map[used.front()] = cur;
  for (std::size_t i = 1; i < used.size(); ++i) {
    if (used[i] % 2 != used[i - 1] % 2) ++cur;
    map[used[i]] = cur;
  }
  return map;
}

TreeAutomaton compress_priorities(const TreeAutomaton& a) {
  std::vector<Priority> used;
  for (State q = 0; q < a.num_states(); ++q)
    if (q != a.top()) used.push_back(a.priority(q));
  auto map = compress_map(used);
  std::vector<Priority> pr = a.priorities();
  for (State q = 0; q < pr.size(); ++q) pr[q] = q == a.top() ? 0 : map[pr[q]];
  return {a.alphabet(), a.state_names(), a.initial(), std::move(pr), a.transitions(), a.kind(), a.top()};
}

PathWord unfold_path(const RegularTree& t, std::span<const Dir> directions) {
  PathWord w;
  std::uint32_t n = t.root;
  for (Dir d : directions) {
    w.prefix.emplace_back(t.label.at(n), d);
    n = t.child(n, d);
  }
  return w;
}

namespace {

std::vector<Letter> letter_permutation(const Alphabet& from, const Alphabet& to) {
  if (from.size() != to.size()) throw Error("alphabet mismatch");
  std::vector<Letter> perm(from.size());
  for (Letter a = 0; a < from.size(); ++a) {
    auto b = to.find(from.name(a));
    if (!b) throw Error("alphabet mismatch: letter '" + from.name(a) + "'");
    perm[a] = *b;
  }
  return perm;
}

}  // namespace

TreeAutomaton align_alphabet(const TreeAutomaton& a, const Alphabet& target) {
  if (a.alphabet() == target) return a;
  auto perm = letter_permutation(a.alphabet(), target);
  std::vector<Transition> ts = a.transitions();
  for (auto& t : ts) t.a = perm.at(t.a);
  return {target, a.state_names(), a.initial(), a.priorities(), std::move(ts), a.kind(), a.top()};
}

RegularTree align_alphabet(const RegularTree& t, const Alphabet& target) {
  if (t.alphabet == target) return t;
  auto perm = letter_permutation(t.alphabet, target);
  RegularTree r = t;
  r.alphabet = target;
  for (auto& l : r.label) l = perm.at(l);
  return r;
}

TreeAutomaton with_top(const TreeAutomaton& a, AutomatonKind kind) {
  if (a.has_top()) {
    return {a.alphabet(), a.state_names(), a.initial(), a.priorities(), a.transitions(), kind, a.top()};
  }
  auto names = a.state_names();
  auto pr = a.priorities();
  auto ts = a.transitions();
  State top = static_cast<State>(names.size());
  std::string name = "TOP";
  while (a.find_state(name)) name += "_";
  names.push_back(name);
  pr.push_back(0);
  for (Letter x = 0; x < a.alphabet().size(); ++x) ts.push_back({top, x, top, top});
  return {a.alphabet(), std::move(names), a.initial(), std::move(pr), std::move(ts), kind, top};
}

TreeAutomaton universal_automaton(const Alphabet& sigma, Priority p) {
  std::vector<Transition> ts;
  for (Letter x = 0; x < sigma.size(); ++x) {
    ts.push_back({0, x, 0, 0});
    ts.push_back({1, x, 1, 1});
  }
  return {sigma, {"u", "TOP"}, 0, {p, 0}, std::move(ts), AutomatonKind::Deterministic, 1};
}

TreeAutomaton rejecting_automaton(const Alphabet& sigma, Priority p) {
  return universal_automaton(sigma, p);
}

}  // namespace treesep
