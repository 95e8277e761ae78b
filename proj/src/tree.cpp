#include "treesep/tree.hpp"

#include <algorithm>
#include <mutex>
#include <set>

namespace treesep {

namespace {

Priority min_priority(const TreeAutomaton& a) {
  Priority lo = std::numeric_limits<Priority>::max();
  for (auto p : a.priorities()) lo = std::min(lo, p);
  return lo == std::numeric_limits<Priority>::max() ? 0 : lo;
}

std::uint32_t transition_index(const TreeAutomaton& a, const Transition& t) {
  return static_cast<std::uint32_t>(&t - a.transitions().data());
}

}  // namespace

TreeAutomaton minimize_priorities(const TreeAutomaton& a) {
  std::vector<std::string> letters;
  for (std::size_t i = 0; i < 2 * a.alphabet().size(); ++i) letters.push_back("l" + std::to_string(i));
  std::vector<WordTransition> ts;
  for (const auto& t : a.transitions()) {
    ts.push_back({t.q, 2 * t.a, t.left});
    ts.push_back({t.q, 2 * t.a + 1, t.right});
  }
  const WordAutomaton graph(Alphabet(letters), a.state_names(), a.initial(), a.priorities(), std::move(ts), false);
  auto pr = minimize_priorities(graph).priorities();
  // TOP is a self-loop SCC of its own; keep its conventional priority.
  if (a.has_top()) pr[a.top()] = a.priority(a.top());
  return {a.alphabet(), a.state_names(), a.initial(), std::move(pr), a.transitions(), a.kind(), a.top()};
}

bool regular_tree_member(const TreeAutomaton& a, const RegularTree& t0) {
  if (!validate(t0).empty()) throw Error("regular_tree_member: malformed tree");
  const RegularTree t = align_alphabet(t0, a.alphabet());
  const std::size_t nq = a.num_states();
  const Priority p0 = min_priority(a);
  ParityGame g;
  std::vector<Vertex> id(t.size() * nq, no_vertex);
  std::vector<std::pair<std::uint32_t, State>> key;
  auto get = [&](std::uint32_t node, State q) {
    Vertex& v = id[node * nq + q];
    if (v == no_vertex) {
      v = g.add_vertex(a.priority(q), 0);
      key.emplace_back(node, q);
    }
    return v;
  };
  Vertex sink = no_vertex;
  get(t.root, a.initial());
  for (Vertex i = 0; i < g.size(); ++i) {
    if (i == sink || i >= key.size() || key[i].first == no_state) continue;
    const auto [node, q] = key[i];
    auto ts = a.from(q, t.label[node]);
    if (ts.empty()) {
      if (sink == no_vertex) {
        sink = g.add_vertex(1, 0);
        key.emplace_back(no_state, no_state);
        g.succ[sink].push_back(sink);
      }
      g.succ[i].push_back(sink);
      continue;
    }
    for (const auto& tr : ts) {
      const Vertex c = g.add_vertex(p0, 1);
      key.emplace_back(no_state, no_state);
      g.succ[i].push_back(c);
      const Vertex l = get(t.child(node, Dir::L), tr.left);
      const Vertex r = get(t.child(node, Dir::R), tr.right);
      g.succ[c] = {l, r};
    }
  }
  return solve_parity(g).winner[0] == 0;
}

namespace {

// Nonemptiness game: vertex q < n for each state, n + i for transition i,
// and a losing sink last.
struct NonemptinessGame {
  ParityGame game;
  Vertex sink;
};

NonemptinessGame nonemptiness_game(const TreeAutomaton& a) {
  const std::size_t n = a.num_states();
  const Priority p0 = min_priority(a);
  NonemptinessGame ng;
  auto& g = ng.game;
  for (State q = 0; q < n; ++q) g.add_vertex(a.priority(q), 0, a.state_name(q));
  const auto& ts = a.transitions();
  for (std::size_t i = 0; i < ts.size(); ++i) g.add_vertex(p0, 1);
  ng.sink = g.add_vertex(1, 0, "sink");
  g.succ[ng.sink] = {ng.sink};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto& t = ts[i];
    if (t.q >= n || t.left >= n || t.right >= n || t.a >= a.alphabet().size()) continue;
    g.succ[t.q].push_back(static_cast<Vertex>(n + i));
    g.succ[n + i] = {t.left, t.right};
  }
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (g.succ[n + i].empty()) g.succ[n + i] = {ng.sink};
  for (State q = 0; q < n; ++q)
    if (g.succ[q].empty()) g.succ[q] = {ng.sink};
  g.initial = a.initial();
  return ng;
}

}  // namespace

std::vector<char> productive_states(const TreeAutomaton& a) {
  if (a.num_states() == 0) return {};
  auto ng = nonemptiness_game(a);
  auto s = solve_parity(ng.game);
  std::vector<char> out(a.num_states());
  for (State q = 0; q < a.num_states(); ++q) out[q] = s.winner[q] == 0;
  return out;
}

TrimResult trim(const TreeAutomaton& a) {
  TrimResult r;
  TreeAutomaton cur = a;
  std::vector<State> origin(a.num_states());
  for (State q = 0; q < origin.size(); ++q) origin[q] = q;
  while (true) {
    auto prod = productive_states(cur);
    const bool empty = !prod[cur.initial()];
    if (empty) {
      TreeAutomaton e(cur.alphabet(), {cur.state_name(cur.initial())}, 0, {cur.priority(cur.initial())}, {});
      r.automaton = std::move(e);
      r.empty = true;
      r.origin = {origin[cur.initial()]};
      return r;
    }
    std::vector<State> id(cur.num_states(), no_state);
    std::vector<std::string> names;
    std::vector<Priority> pr;
    std::vector<State> org;
    for (State q = 0; q < cur.num_states(); ++q) {
      if (!prod[q]) continue;
      id[q] = static_cast<State>(names.size());
      names.push_back(cur.state_name(q));
      pr.push_back(cur.priority(q));
      org.push_back(origin[q]);
    }
    std::vector<Transition> ts;
    for (const auto& t : cur.transitions())
      if (prod[t.q] && prod[t.left] && prod[t.right]) ts.push_back({id[t.q], t.a, id[t.left], id[t.right]});
    if (names.size() == cur.num_states() && ts.size() == cur.transitions().size()) break;
    const State top = cur.has_top() ? id[cur.top()] : no_state;
    TreeAutomaton next(cur.alphabet(), names, id[cur.initial()], pr, ts, cur.kind(), top);
    if (next.kind() != AutomatonKind::Nondeterministic && !validate(next).empty())
      next = TreeAutomaton(cur.alphabet(), names, id[cur.initial()], pr, ts);
    cur = std::move(next);
    origin = std::move(org);
  }
  r.automaton = std::move(cur);
  r.origin = std::move(origin);
  return r;
}

RegularTree emptiness_witness(const TreeAutomaton& a) {
  auto ng = nonemptiness_game(a);
  auto s = solve_parity(ng.game);
  if (s.winner[a.initial()] != 0) throw Error("emptiness_witness: the language is empty");
  const std::size_t n = a.num_states();
  RegularTree t;
  t.alphabet = a.alphabet();
  std::vector<std::uint32_t> node(n, no_state);
  std::vector<State> order{a.initial()};
  node[a.initial()] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const State q = order[i];
    const auto& tr = a.transitions()[s.strategy[q] - n];
    t.label.push_back(tr.a);
    t.node_names.push_back(a.state_name(q));
    std::array<std::uint32_t, 2> kids{};
    for (int d = 0; d < 2; ++d) {
      const State c = tr.target(static_cast<Dir>(d));
      if (node[c] == no_state) {
        node[c] = static_cast<std::uint32_t>(order.size());
        order.push_back(c);
      }
      kids[d] = node[c];
    }
    t.succ.push_back(kids);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Disjointness

const WordAutomaton& pair_condition(std::size_t ka, std::size_t kb) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, WordAutomaton> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({ka, kb});
  if (it != cache.end()) return it->second;
  std::vector<std::string> letters;
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j) letters.push_back(std::to_string(i) + "," + std::to_string(j));
  const Alphabet sigma(letters);
  auto component = [&](std::size_t k, bool first) {
    std::vector<std::string> names;
    std::vector<Priority> pr;
    std::vector<WordTransition> ts;
    for (std::size_t s = 0; s < k; ++s) {
      names.push_back("p" + std::to_string(s));
      pr.push_back(static_cast<Priority>(s));
      for (std::size_t i = 0; i < ka; ++i)
        for (std::size_t j = 0; j < kb; ++j)
          ts.push_back({static_cast<State>(s), static_cast<Letter>(i * kb + j),
                        static_cast<State>(first ? i : j)});
    }
    return WordAutomaton(sigma, names, 0, pr, ts, true);
  };
  auto w = conjunction_dpa(component(ka, true), component(kb, false));
  return cache.emplace(std::make_pair(ka, kb), std::move(w)).first->second;
}

namespace {

class DisjointArena final : public Arena {
 public:
  DisjointArena(const TreeAutomaton& a, const TreeAutomaton& b) : a_(a), b_(b) {}
  Position initial_position() const override { return pos(a_.initial(), b_.initial()); }
  std::size_t num_decisions() const override { return 4; }
  int player(std::size_t k) const override { return k == 3 ? 1 : 0; }
  void choices(Position v, std::span<const Choice> prefix, std::vector<Choice>& out) const override {
    const State qa = v / b_.num_states(), qb = v % b_.num_states();
    switch (prefix.size()) {
      case 0:
        for (Letter x = 0; x < a_.alphabet().size(); ++x) out.push_back(x);
        break;
      case 1:
        for (const auto& t : a_.from(qa, static_cast<Letter>(prefix[0]))) out.push_back(transition_index(a_, t));
        break;
      case 2:
        for (const auto& t : b_.from(qb, static_cast<Letter>(prefix[0]))) out.push_back(transition_index(b_, t));
        break;
      default:
        out.push_back(0);
        out.push_back(1);
    }
  }
  Position update(Position, std::span<const Choice> o) const override {
    const Dir d = static_cast<Dir>(o[3]);
    return pos(a_.transitions()[o[1]].target(d), b_.transitions()[o[2]].target(d));
  }
  [[nodiscard]] Position pos(State qa, State qb) const { return static_cast<Position>(qa * b_.num_states() + qb); }

 private:
  const TreeAutomaton& a_;
  const TreeAutomaton& b_;
};

struct DisjointSetup {
  TreeAutomaton b;  // aligned to A's alphabet
  std::vector<Priority> map_a, map_b;
  std::size_t ka = 0, kb = 0;
};

DisjointSetup setup(const TreeAutomaton& a, const TreeAutomaton& b) {
  DisjointSetup s;
  s.b = align_alphabet(b, a.alphabet());
  s.map_a = compress_map(a.priorities());
  s.map_b = compress_map(s.b.priorities());
  s.ka = s.map_a.empty() ? 1 : *std::max_element(s.map_a.begin(), s.map_a.end()) + 1;
  s.kb = s.map_b.empty() ? 1 : *std::max_element(s.map_b.begin(), s.map_b.end()) + 1;
  return s;
}

ProductGame disjointness_product(const TreeAutomaton& a, const DisjointSetup& s, const DisjointArena& arena) {
  const auto& w = pair_condition(s.ka, s.kb);
  const std::size_t nb = s.b.num_states();
  WordCondition cond(w, [&](Position v, std::span<const Choice>) {
    return static_cast<Letter>(s.map_a[a.priority(v / nb)] * s.kb + s.map_b[s.b.priority(v % nb)]);
  });
  return build_product(arena, cond, 0);
}

}  // namespace

DisjointResult decide_disjoint(const TreeAutomaton& a, const TreeAutomaton& b) {
  if (a.num_states() == 0 || b.num_states() == 0) return {true, std::nullopt, 0, 0};
  auto s = setup(a, b);
  DisjointArena arena(a, s.b);
  auto p = disjointness_product(a, s, arena);
  auto sol = solve_parity(p.game);
  DisjointResult r;
  r.game_vertices = p.game.size();
  r.condition_states = p.condition_states;
  r.disjoint = sol.winner[0] != 0;
  if (r.disjoint) return r;

  auto m = extract_strategy_machine(p, sol, 0);
  RegularTree t;
  t.alphabet = a.alphabet();
  std::map<std::pair<Position, std::uint32_t>, std::uint32_t> node;
  std::vector<std::pair<Position, std::uint32_t>> order{{m.initial_position, m.initial_memory}};
  node[order[0]] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto [v, mem] = order[i];
    std::vector<Choice> o;
    for (int k = 0; k < 3; ++k) {
      auto c = m.decide(v, mem, o);
      if (!c) throw Error("decide_disjoint: incomplete witness strategy");
      o.push_back(*c);
    }
    t.label.push_back(static_cast<Letter>(o[0]));
    t.node_names.push_back("n" + std::to_string(i));
    std::array<std::uint32_t, 2> kids{};
    for (Choice d : {0, 1}) {
      o.push_back(d);
      auto nx = m.next(v, mem, o);
      o.pop_back();
      if (!nx) throw Error("decide_disjoint: incomplete witness strategy");
      auto [it, fresh] = node.emplace(*nx, static_cast<std::uint32_t>(order.size()));
      if (fresh) order.push_back(*nx);
      kids[d] = it->second;
    }
    t.succ.push_back(kids);
  }
  r.witness = std::move(t);
  return r;
}

// ---------------------------------------------------------------------------
// Pathfinders

namespace {

using PairKey = std::pair<std::uint32_t, std::uint32_t>;

// Pathfinder wins with table t iff Automaton loses once every direction
// vertex keeps only the tabled edge.
bool table_wins(const ProductGame& p, const std::map<PairKey, Dir>& t) {
  ParityGame g = p.game;
  for (Vertex x = 0; x < g.size(); ++x) {
    if (p.is_sink(x) || p.prefix(x).size() != 3) continue;
    auto pf = p.prefix(x);
    auto it = t.find({static_cast<std::uint32_t>(pf[1]), static_cast<std::uint32_t>(pf[2])});
    if (it == t.end()) return false;
    const Choice want = static_cast<Choice>(it->second);
    std::vector<Vertex> keep;
    for (std::size_t j = 0; j < g.succ[x].size(); ++j)
      if (p.edge_choice[x][j] == want) keep.push_back(g.succ[x][j]);
    g.succ[x] = std::move(keep);
  }
  return solve_parity(g).winner[0] == 1;
}

std::optional<Dir> forced_direction(const TreeAutomaton& a, const Transition& t) {
  if (!a.is_game_like() || !a.has_top()) return std::nullopt;
  const State top = a.top();
  if (t.q == top) return std::nullopt;
  if (t.right == top && t.left != top) return Dir::L;
  if (t.left == top && t.right != top) return Dir::R;
  return std::nullopt;
}

}  // namespace

bool certify_pathfinder(const TreeAutomaton& a, const TreeAutomaton& b, const Pathfinder& pf) {
  auto s = setup(a, b);
  DisjointArena arena(a, s.b);
  auto p = disjointness_product(a, s, arena);
  return table_wins(p, pf.table);
}

Pathfinder extract_pathfinder(const TreeAutomaton& a, const TreeAutomaton& b, std::size_t guard) {
  auto s = setup(a, b);
  DisjointArena arena(a, s.b);
  auto p = disjointness_product(a, s, arena);
  auto sol = solve_parity(p.game);
  if (sol.winner[0] == 0) throw Error("extract_pathfinder: the languages are not disjoint");

  std::map<PairKey, Dir> fixed;
  std::vector<PairKey> free;
  std::map<PairKey, Dir> hint;
  for (Vertex x = 0; x < p.game.size(); ++x) {
    if (p.is_sink(x) || p.prefix(x).size() != 3) continue;
    auto pf = p.prefix(x);
    const PairKey k{static_cast<std::uint32_t>(pf[1]), static_cast<std::uint32_t>(pf[2])};
    if (fixed.count(k) || hint.count(k)) continue;
    if (auto d = forced_direction(a, a.transitions()[k.first])) {
      fixed[k] = *d;
      continue;
    }
    free.push_back(k);
    Dir d = Dir::L;
    for (std::size_t j = 0; j < p.game.succ[x].size(); ++j)
      if (p.game.succ[x][j] == sol.strategy[x]) d = static_cast<Dir>(p.edge_choice[x][j]);
    hint[k] = d;
  }
  if (free.size() > guard) throw LimitError("pathfinder search infeasible");
  Pathfinder out;
  out.table = fixed;
  for (const auto& [k, d] : hint) out.table[k] = d;
  if (table_wins(p, out.table)) return out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << free.size()); ++bits) {
    for (std::size_t i = 0; i < free.size(); ++i) out.table[free[i]] = static_cast<Dir>((bits >> i) & 1);
    if (table_wins(p, out.table)) return out;
  }
  throw Error("pathfinder search infeasible: no positional table certified");
}

}  // namespace treesep
