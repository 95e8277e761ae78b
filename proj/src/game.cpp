#include "treesep/game.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace treesep {

Vertex ParityGame::add_vertex(Priority p, std::uint8_t own, std::string nm) {
  priority.push_back(p);
  owner.push_back(own);
  succ.emplace_back();
  name.push_back(std::move(nm));
  return static_cast<Vertex>(priority.size() - 1);
}

std::vector<Diagnostic> validate(const ParityGame& g) {
  std::vector<Diagnostic> out;
  const std::size_t n = g.size();
  if (g.owner.size() != n || g.succ.size() != n) out.push_back({"shape", "per-vertex tables differ in size"});
  if (n == 0 || g.initial >= n) out.push_back({"initial", "initial vertex out of range"});
  for (std::size_t v = 0; v < std::min(n, g.succ.size()); ++v) {
    if (g.succ[v].empty()) out.push_back({"dead-end", "vertex " + std::to_string(v) + " has no successor"});
    for (Vertex t : g.succ[v])
      if (t >= n) out.push_back({"edge", "vertex " + std::to_string(v) + " has an edge out of range"});
    if (v < g.owner.size() && g.owner[v] > 1) out.push_back({"owner", "vertex " + std::to_string(v)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zielonka

namespace {

class Zielonka {
 public:
  explicit Zielonka(const ParityGame& g) : g_(g), n_(g.size()) {
    auto map = compress_map(g.priority);
    pr_.resize(n_);
    for (std::size_t v = 0; v < n_; ++v) pr_[v] = map[g.priority[v]];
    pred_.resize(n_);
    for (Vertex v = 0; v < n_; ++v)
      for (Vertex t : g.succ[v]) pred_[t].push_back(v);
    level_.assign(n_, 0);
    stamp_.assign(n_, 0);
    cnt_stamp_.assign(n_, 0);
    cnt_.assign(n_, 0);
    sol_.winner.assign(n_, 0);
    sol_.strategy.resize(n_);
    for (Vertex v = 0; v < n_; ++v) sol_.strategy[v] = g.succ[v].front();
  }

  ParitySolution run() {
    std::vector<Vertex> all(n_);
    for (Vertex v = 0; v < n_; ++v) all[v] = v;
    solve(all, 0);
    return std::move(sol_);
  }

 private:
  const ParityGame& g_;
  std::size_t n_;
  std::vector<Priority> pr_;
  std::vector<std::vector<Vertex>> pred_;
  std::vector<std::uint32_t> level_;  // v is in the depth-d subgame iff level_[v] >= d
  std::vector<std::uint32_t> stamp_, cnt_stamp_, cnt_;
  std::uint32_t epoch_ = 0;
  ParitySolution sol_;

  // Attractor for player i to `target` inside the depth-d subgame. Marks the
  // result with a fresh epoch and writes attractor strategies for i.
  std::vector<Vertex> attractor(const std::vector<Vertex>& target, std::uint8_t i, std::uint32_t d) {
    const std::uint32_t e = ++epoch_;
    std::vector<Vertex> out(target);
    for (Vertex v : target) stamp_[v] = e;
    for (std::size_t h = 0; h < out.size(); ++h) {
      const Vertex u = out[h];
      for (Vertex x : pred_[u]) {
        if (level_[x] < d || stamp_[x] == e) continue;
        if (g_.owner[x] == i) {
          stamp_[x] = e;
          sol_.strategy[x] = u;
          out.push_back(x);
        } else {
          if (cnt_stamp_[x] != e) {
            cnt_stamp_[x] = e;
            cnt_[x] = 0;
            for (Vertex t : g_.succ[x]) cnt_[x] += level_[t] >= d ? 1 : 0;
          }
          if (--cnt_[x] == 0) {
            stamp_[x] = e;
            out.push_back(x);
          }
        }
      }
    }
    return out;
  }

  // Solves the subgame V (all with level_ >= d).
  void solve(const std::vector<Vertex>& V, std::uint32_t d) {
    if (V.empty()) return;
    Priority p = 0;
    for (Vertex v : V) p = std::max(p, pr_[v]);
    const std::uint8_t i = p % 2;
    std::vector<Vertex> top;
    for (Vertex v : V)
      if (pr_[v] == p) top.push_back(v);
    auto A = attractor(top, i, d);
    const std::uint32_t ea = epoch_;
    std::vector<Vertex> rest;
    for (Vertex v : V)
      if (stamp_[v] != ea) rest.push_back(v);
    for (Vertex v : rest) level_[v] = d + 1;
    solve(rest, d + 1);
    for (Vertex v : rest) level_[v] = d;

    std::vector<Vertex> lost;  // W'_{1-i}
    for (Vertex v : rest)
      if (sol_.winner[v] != i) lost.push_back(v);
    if (lost.empty()) {
      for (Vertex v : V) sol_.winner[v] = i;
      for (Vertex v : top) {
        if (g_.owner[v] != i) continue;
        for (Vertex t : g_.succ[v])
          if (level_[t] >= d) {
            sol_.strategy[v] = t;
            break;
          }
      }
      return;
    }
    auto B = attractor(lost, static_cast<std::uint8_t>(1 - i), d);
    const std::uint32_t eb = epoch_;
    for (Vertex v : B) sol_.winner[v] = 1 - i;
    std::vector<Vertex> rest2;
    for (Vertex v : V)
      if (stamp_[v] != eb) rest2.push_back(v);
    for (Vertex v : rest2) level_[v] = d + 1;
    solve(rest2, d + 1);
    for (Vertex v : rest2) level_[v] = d;
  }
};

}  // namespace

ParitySolution solve_parity(const ParityGame& g) {
  if (!validate(g).empty()) throw Error("solve_parity: malformed game");
  return Zielonka(g).run();
}

namespace {

using Mask = std::uint32_t;

// Vertices of `h` (successor masks) lying on a cycle whose maximal priority
// is odd, i.e. cycles Even cannot afford.
Mask odd_cycle_vertices(const std::vector<Mask>& h, const std::vector<Priority>& pr) {
  const std::size_t n = h.size();
  Mask bad = 0;
  for (std::size_t u = 0; u < n; ++u) {
    if (pr[u] % 2 == 0) continue;
    Mask allowed = 0;
    for (std::size_t x = 0; x < n; ++x)
      if (pr[x] <= pr[u]) allowed |= Mask{1} << x;
    Mask seen = h[u] & allowed, frontier = seen;
    while (frontier != 0) {
      Mask next = 0;
      for (std::size_t x = 0; x < n; ++x)
        if (frontier >> x & 1) next |= h[x] & allowed;
      frontier = next & ~seen;
      seen |= next;
    }
    if (seen >> u & 1) bad |= Mask{1} << u;
  }
  return bad;
}

}  // namespace

std::vector<std::uint8_t> brute_force_solve_parity(const ParityGame& g) {
  const std::size_t n = g.size();
  if (n > 12) throw Error("brute_force_solve_parity: more than 12 vertices");
  if (!validate(g).empty()) throw Error("brute_force_solve_parity: malformed game");
  std::vector<std::size_t> even;
  for (std::size_t v = 0; v < n; ++v)
    if (g.owner[v] == 0) even.push_back(v);
  std::vector<std::size_t> pick(even.size(), 0);
  Mask won = 0;
  std::vector<Mask> h(n);
  while (true) {
    for (std::size_t v = 0; v < n; ++v) {
      h[v] = 0;
      if (g.owner[v] != 0)
        for (Vertex t : g.succ[v]) h[v] |= Mask{1} << t;
    }
    for (std::size_t j = 0; j < even.size(); ++j) h[even[j]] = Mask{1} << g.succ[even[j]][pick[j]];
    const Mask bad = odd_cycle_vertices(h, g.priority);
    for (std::size_t v = 0; v < n; ++v) {
      Mask seen = Mask{1} << v, frontier = seen;
      while (frontier != 0) {
        Mask next = 0;
        for (std::size_t x = 0; x < n; ++x)
          if (frontier >> x & 1) next |= h[x];
        frontier = next & ~seen;
        seen |= next;
      }
      if ((seen & bad) == 0) won |= Mask{1} << v;
    }
    std::size_t j = 0;
    while (j < even.size() && ++pick[j] == g.succ[even[j]].size()) pick[j++] = 0;
    if (j == even.size()) break;
  }
  std::vector<std::uint8_t> winner(n);
  for (std::size_t v = 0; v < n; ++v) winner[v] = (won >> v & 1) ? 0 : 1;
  return winner;
}

bool is_trap_closed(const ParityGame& g, const ParitySolution& s, std::uint8_t player) {
  for (Vertex v = 0; v < g.size(); ++v) {
    if (s.winner[v] != player) continue;
    if (g.owner[v] == player) {
      if (s.winner[s.strategy[v]] != player) return false;
    } else {
      for (Vertex t : g.succ[v])
        if (s.winner[t] != player) return false;
    }
  }
  return true;
}

void write_pgsolver(std::ostream& os, const ParityGame& g) {
  os << "parity " << (g.size() == 0 ? 0 : g.size() - 1) << ";\n";
  os << "start " << g.initial << ";\n";
  for (Vertex v = 0; v < g.size(); ++v) {
    os << v << ' ' << g.priority[v] << ' ' << static_cast<int>(g.owner[v]) << ' ';
    for (std::size_t j = 0; j < g.succ[v].size(); ++j) os << (j ? "," : "") << g.succ[v][j];
    if (v < g.name.size() && !g.name[v].empty()) os << " \"" << g.name[v] << '"';
    os << ";\n";
  }
}

ParityGame read_pgsolver(std::istream& is) {
  ParityGame g;
  std::string line;
  std::size_t lineno = 0;
  bool start_seen = false;
  struct Row {
    Priority p;
    std::uint8_t o;
    std::vector<Vertex> s;
    std::string name;
  };
  std::map<Vertex, Row> rows;
  while (std::getline(is, line)) {
    ++lineno;
    auto semi = line.rfind(';');
    std::string body = semi == std::string::npos ? line : line.substr(0, semi);
    std::istringstream ls(body);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "parity") continue;
    if (first == "start") {
      if (!(ls >> g.initial)) throw Error("pgsolver line " + std::to_string(lineno) + ": bad start");
      start_seen = true;
      continue;
    }
    Row r;
    Vertex id;
    std::string succs;
    int owner = 0;
    try {
      id = static_cast<Vertex>(std::stoul(first));
    } catch (const std::exception&) {
      throw Error("pgsolver line " + std::to_string(lineno) + ": expected a vertex id");
    }
    if (!(ls >> r.p >> owner >> succs) || (owner != 0 && owner != 1))
      throw Error("pgsolver line " + std::to_string(lineno) + ": expected priority, owner and successors");
    r.o = static_cast<std::uint8_t>(owner);
    std::istringstream ss(succs);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) r.s.push_back(static_cast<Vertex>(std::stoul(tok)));
    std::string rest;
    std::getline(ls, rest);
    auto q1 = rest.find('"'), q2 = rest.rfind('"');
    if (q1 != std::string::npos && q2 > q1) r.name = rest.substr(q1 + 1, q2 - q1 - 1);
    if (!rows.emplace(id, std::move(r)).second)
      throw Error("pgsolver line " + std::to_string(lineno) + ": duplicate vertex");
  }
  if (rows.empty()) throw Error("pgsolver: no vertices");
  const Vertex n = rows.rbegin()->first + 1;
  if (rows.size() != n) throw Error("pgsolver: vertex ids are not contiguous");
  for (auto& [id, r] : rows) {
    g.add_vertex(r.p, r.o, r.name);
    g.succ.back() = r.s;
  }
  if (!start_seen) g.initial = 0;
  auto diags = validate(g);
  if (!diags.empty()) throw Error("pgsolver: " + diags.front().invariant + ": " + diags.front().detail);
  return g;
}

// ---------------------------------------------------------------------------
// Arenas and products

std::string Arena::describe_choice(std::size_t, Choice c) const { return std::to_string(c); }

WordCondition::WordCondition(const WordAutomaton& w, std::function<Letter(Position, std::span<const Choice>)> letter)
    : w_(w), letter_(std::move(letter)) {
  if (!w.deterministic() || !w.is_complete()) throw Error("condition automaton must be deterministic and complete");
}

State WordCondition::step(State q, Position v, std::span<const Choice> outcome) {
  return w_.step(q, letter_(v, outcome));
}

GraphGame arena_to_graph_game(const Arena& a, std::size_t max_vertices) {
  GraphGame g;
  const std::size_t n = a.num_decisions();
  std::map<std::pair<Position, std::vector<Choice>>, Vertex> ids;
  std::map<std::vector<Choice>, std::int64_t> outcome_ids;
  auto get = [&](Position v, std::vector<Choice> prefix) {
    auto [it, fresh] = ids.emplace(std::make_pair(v, prefix), static_cast<Vertex>(g.size()));
    if (fresh) {
      if (g.size() >= max_vertices) throw LimitError("graph game exceeds vertex limit");
      g.position.push_back(v);
      g.owner.push_back(prefix.size() < n ? a.player(prefix.size()) : a.player(0));
      g.prefix.push_back(std::move(prefix));
      g.succ.emplace_back();
      g.label.emplace_back();
    }
    return it->second;
  };
  get(a.initial_position(), {});
  std::vector<Choice> buf;
  for (Vertex x = 0; x < g.size(); ++x) {
    const Position v = g.position[x];
    const std::vector<Choice> prefix = g.prefix[x];
    if (prefix.size() == n) {
      auto [it, fresh] = outcome_ids.emplace(prefix, static_cast<std::int64_t>(g.outcomes.size()));
      if (fresh) g.outcomes.push_back(prefix);
      const Vertex t = get(a.update(v, prefix), {});
      g.succ[x].push_back(t);
      g.label[x].push_back(it->second);
      continue;
    }
    buf.clear();
    a.choices(v, prefix, buf);
    for (Choice c : buf) {
      auto ext = prefix;
      ext.push_back(c);
      const Vertex t = get(v, std::move(ext));
      g.succ[x].push_back(t);
      g.label[x].push_back(-1);
    }
  }
  return g;
}

ParityGame product_with_condition(const GraphGame& g, const WordAutomaton& w,
                                  const std::function<Letter(std::span<const Choice>)>& letter, int owner) {
  if (!w.deterministic() || !w.is_complete() || !validate(w).empty())
    throw Error("product_with_condition: condition must be deterministic and complete");
  const auto ps = w.priority_set();
  const Priority p0 = ps.front();
  ParityGame pg;
  std::map<std::pair<Vertex, State>, Vertex> ids;
  std::vector<std::pair<Vertex, State>> keys;
  auto get = [&](Vertex x, State q) {
    auto [it, fresh] = ids.emplace(std::make_pair(x, q), static_cast<Vertex>(keys.size()));
    if (fresh) {
      keys.emplace_back(x, q);
      pg.add_vertex(g.round_start(x) ? w.priority(q) : p0, g.owner[x] == owner ? 0 : 1,
                    std::to_string(x) + "/" + w.state_name(q));
    }
    return it->second;
  };
  Vertex sink[2] = {no_vertex, no_vertex};
  auto sink_for = [&](std::uint8_t loser) {
    if (sink[loser] == no_vertex) {
      sink[loser] = pg.add_vertex(loser == 0 ? 1 : 0, 0, loser == 0 ? "lose-even" : "lose-odd");
      keys.emplace_back(no_vertex, no_state);
      pg.succ[sink[loser]].push_back(sink[loser]);
    }
    return sink[loser];
  };
  get(g.initial, w.initial());
  for (Vertex i = 0; i < keys.size(); ++i) {
    auto [x, q] = keys[i];
    if (x == no_vertex) continue;
    if (g.succ[x].empty()) {
      const Vertex s = sink_for(pg.owner[i]);
      pg.succ[i].push_back(s);
      continue;
    }
    for (std::size_t j = 0; j < g.succ[x].size(); ++j) {
      const auto l = g.label[x][j];
      const State q2 = l < 0 ? q : w.step(q, letter(g.outcomes[static_cast<std::size_t>(l)]));
      const Vertex t = get(g.succ[x][j], q2);
      pg.succ[i].push_back(t);
    }
  }
  return pg;
}

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<std::uint64_t>& v) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto x : v) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

ProductGame build_product(const Arena& a, Condition& w, int owner, std::size_t max_vertices) {
  ProductGame p;
  const std::size_t n = a.num_decisions();
  p.num_decisions = n;
  p.owner = owner;
  p.prefix_begin.push_back(0);
  std::unordered_map<std::vector<std::uint64_t>, Vertex, VecHash> ids;
  std::vector<std::uint64_t> key;
  std::vector<char> round_start;
  auto add = [&](Position v, State q, std::span<const Choice> prefix, std::uint8_t own) {
    const Vertex id = p.game.add_vertex(0, own);
    if (p.game.size() > max_vertices) throw LimitError("product game exceeds vertex limit");
    p.position.push_back(v);
    p.cond.push_back(q);
    p.prefix_data.insert(p.prefix_data.end(), prefix.begin(), prefix.end());
    p.prefix_begin.push_back(static_cast<std::uint32_t>(p.prefix_data.size()));
    p.edge_choice.emplace_back();
    round_start.push_back(prefix.empty() ? 1 : 0);
    return id;
  };
  auto get = [&](Position v, State q, std::span<const Choice> prefix) {
    key.assign({v, q});
    key.insert(key.end(), prefix.begin(), prefix.end());
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const std::uint8_t own = a.player(prefix.size()) == owner ? 0 : 1;
    const Vertex id = add(v, q, prefix, own);
    ids.emplace(key, id);
    return id;
  };
  auto sink = [&](std::uint8_t loser) {
    Vertex& s = loser == 0 ? p.sink_odd : p.sink_even;
    if (s == no_vertex) {
      s = add(0, no_state, {}, 0);
      round_start.back() = 0;
      p.game.succ[s].push_back(s);
      p.edge_choice[s].push_back(0);
    }
    return s;
  };

  get(a.initial_position(), w.initial(), {});
  std::vector<Choice> prefix, buf;
  for (Vertex x = 0; x < p.game.size(); ++x) {
    if (p.is_sink(x)) continue;
    const Position v = p.position[x];
    const State q = p.cond[x];
    auto pf = p.prefix(x);
    prefix.assign(pf.begin(), pf.end());
    const std::size_t k = prefix.size();
    buf.clear();
    if (!w.canonical_choices(q, v, prefix, buf)) {
      buf.clear();
      a.choices(v, prefix, buf);
    }
    if (buf.empty()) {
      const Vertex s = sink(p.game.owner[x]);
      p.game.succ[x].push_back(s);
      p.edge_choice[x].push_back(0);
      continue;
    }
    for (Choice c : buf) {
      prefix.push_back(c);
      Vertex t;
      if (k + 1 < n) {
        t = get(v, q, prefix);
      } else {
        const Position v2 = a.update(v, prefix);
        const State q2 = w.step(q, v, prefix);
        t = get(v2, q2, {});
      }
      prefix.pop_back();
      p.game.succ[x].push_back(t);
      p.edge_choice[x].push_back(c);
    }
  }
  std::unordered_map<State, Priority> seen;
  Priority p0 = std::numeric_limits<Priority>::max();
  for (Vertex x = 0; x < p.game.size(); ++x) {
    if (p.is_sink(x)) continue;
    auto [it, fresh] = seen.emplace(p.cond[x], 0);
    if (fresh) it->second = w.priority(p.cond[x]);
    p0 = std::min(p0, it->second);
  }
  p.condition_states = seen.size();
  for (Vertex x = 0; x < p.game.size(); ++x) {
    if (x == p.sink_even)
      p.game.priority[x] = 0;
    else if (x == p.sink_odd)
      p.game.priority[x] = 1;
    else
      p.game.priority[x] = round_start[x] ? seen[p.cond[x]] : p0;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Strategy machines

std::optional<Choice> StrategyMachine::decide(Position v, std::uint32_t m, std::span<const Choice> prefix) const {
  auto it = decisions.find({v, m, std::vector<Choice>(prefix.begin(), prefix.end())});
  if (it == decisions.end()) return std::nullopt;
  return it->second;
}

std::optional<std::pair<Position, std::uint32_t>> StrategyMachine::next(Position v, std::uint32_t m,
                                                                       std::span<const Choice> outcome) const {
  auto it = updates.find({v, m, std::vector<Choice>(outcome.begin(), outcome.end())});
  if (it == updates.end()) return std::nullopt;
  return it->second;
}

StrategyMachine extract_strategy_machine(const ProductGame& p, const ParitySolution& s, std::uint8_t player) {
  const auto& g = p.game;
  if (s.winner.at(0) != player) throw Error("extract_strategy_machine: the player does not win the game");
  StrategyMachine m;
  m.owner = player == 0 ? p.owner : 1 - p.owner;
  m.initial_position = p.position[0];
  std::unordered_map<State, std::uint32_t> mem;
  auto mem_of = [&](State q) {
    auto [it, fresh] = mem.emplace(q, static_cast<std::uint32_t>(m.memory.size()));
    if (fresh) m.memory.push_back(q);
    return it->second;
  };
  m.initial_memory = mem_of(p.cond[0]);
  std::vector<char> seen(g.size(), 0);
  std::vector<Vertex> work{0};
  seen[0] = 1;
  std::vector<Choice> prefix;
  while (!work.empty()) {
    const Vertex x = work.back();
    work.pop_back();
    if (p.is_sink(x)) continue;
    auto pf = p.prefix(x);
    prefix.assign(pf.begin(), pf.end());
    const std::uint32_t ml = mem_of(p.cond[x]);
    const bool mine = g.owner[x] == player;
    for (std::size_t j = 0; j < g.succ[x].size(); ++j) {
      const Vertex t = g.succ[x][j];
      if (mine) {
        if (t != s.strategy[x]) continue;
        // First edge realizing the strategy: lowest choice index.
        if (std::find(g.succ[x].begin(), g.succ[x].begin() + j, t) != g.succ[x].begin() + j) continue;
        m.decisions[{p.position[x], ml, prefix}] = p.edge_choice[x][j];
      }
      if (!p.is_sink(t) && prefix.size() + 1 == p.num_decisions) {
        auto outcome = prefix;
        outcome.push_back(p.edge_choice[x][j]);
        m.updates[{p.position[x], ml, std::move(outcome)}] = {p.position[t], mem_of(p.cond[t])};
      }
      if (!seen[t]) {
        seen[t] = 1;
        work.push_back(t);
      }
    }
  }
  return m;
}

bool is_closed(const StrategyMachine& m, const Arena& a) {
  std::vector<Choice> buf;
  for (const auto& [key, c] : m.decisions) {
    const auto& [v, mem, prefix] = key;
    if (mem >= m.size() || a.player(prefix.size()) != m.owner) return false;
    buf.clear();
    a.choices(v, prefix, buf);
    if (std::find(buf.begin(), buf.end(), c) == buf.end()) return false;
  }
  for (const auto& [key, target] : m.updates) {
    const auto& [v, mem, outcome] = key;
    if (mem >= m.size() || target.second >= m.size()) return false;
    if (a.update(v, outcome) != target.first) return false;
  }
  return true;
}

}  // namespace treesep
