#include "treesep/omega.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <set>
#include <unordered_map>

namespace treesep {

WordAutomaton::WordAutomaton(Alphabet alphabet, std::vector<std::string> state_names, State initial,
                             std::vector<Priority> priority, std::vector<WordTransition> transitions,
                             bool deterministic)
    : alphabet_(std::move(alphabet)),
      names_(std::move(state_names)),
      initial_(initial),
      priority_(std::move(priority)),
      transitions_(std::move(transitions)),
      deterministic_(deterministic) {
  std::sort(transitions_.begin(), transitions_.end());
  transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());
  const std::size_t n = names_.size(), s = alphabet_.size();
  begin_.assign(n * s + 1, 0);
  for (const auto& t : transitions_)
    if (t.q < n && t.a < s) ++begin_[t.q * s + t.a + 1];
  for (std::size_t i = 0; i < n * s; ++i) begin_[i + 1] += begin_[i];
  targets_.assign(begin_[n * s], 0);
  std::vector<std::uint32_t> cur(begin_.begin(), begin_.end() - 1);
  for (const auto& t : transitions_)
    if (t.q < n && t.a < s) targets_[cur[t.q * s + t.a]++] = t.to;
}

std::optional<State> WordAutomaton::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<State>(i);
  return std::nullopt;
}

std::span<const State> WordAutomaton::successors(State q, Letter a) const {
  if (q >= names_.size() || a >= alphabet_.size()) return {};
  const std::size_t i = q * alphabet_.size() + a;
  return {targets_.data() + begin_[i], targets_.data() + begin_[i + 1]};
}

bool WordAutomaton::is_complete() const {
  for (State q = 0; q < names_.size(); ++q)
    for (Letter a = 0; a < alphabet_.size(); ++a)
      if (successors(q, a).empty()) return false;
  return true;
}

bool WordAutomaton::is_buchi() const {
  return std::all_of(priority_.begin(), priority_.end(), [](Priority p) { return p == 1 || p == 2; });
}

std::vector<Priority> WordAutomaton::priority_set() const {
  std::set<Priority> s(priority_.begin(), priority_.end());
  return {s.begin(), s.end()};
}

bool WordAutomaton::operator==(const WordAutomaton& o) const {
  return alphabet_ == o.alphabet_ && names_ == o.names_ && initial_ == o.initial_ &&
         priority_ == o.priority_ && transitions_ == o.transitions_ &&
         deterministic_ == o.deterministic_;
}

std::vector<Diagnostic> validate(const WordAutomaton& w) {
  std::vector<Diagnostic> out;
  const std::size_t n = w.num_states();
  if (n == 0) out.push_back({"states", "no states"});
  if (w.initial() >= n) out.push_back({"initial", "initial state is not a declared state"});
  if (w.priorities().size() != n) out.push_back({"priority", "priority map does not match the state set"});
  for (const auto& t : w.transitions()) {
    if (t.q >= n || t.to >= n) out.push_back({"transition-endpoint", "transition uses an undeclared state"});
    if (t.a >= w.alphabet().size()) out.push_back({"transition-letter", "transition uses an undeclared letter"});
  }
  if (w.deterministic() && out.empty()) {
    for (State q = 0; q < n; ++q)
      for (Letter a = 0; a < w.alphabet().size(); ++a)
        if (w.successors(q, a).size() > 1)
          out.push_back({"deterministic", "state " + w.state_name(q) + " has several successors on " +
                                              w.alphabet().name(a)});
  }
  return out;
}

void WordSource::successors(State q, Letter a, std::vector<State>& out) const {
  auto s = w_.successors(q, a);
  out.insert(out.end(), s.begin(), s.end());
}

// ---------------------------------------------------------------------------
// NPA -> NBA

NbaOfNpa::NbaOfNpa(const NpaSource& npa) : npa_(npa), n_(npa.num_states()) {
  std::set<Priority> all;
  for (State q = 0; q < n_; ++q) all.insert(npa.priority(q));
  k_ = all.size();
  for (auto p : all)
    if (p % 2 == 0) evens_.push_back(p);
}

std::size_t NbaOfNpa::num_states() const { return n_ + n_ * evens_.size(); }

Priority NbaOfNpa::priority(State q) const {
  if (q < n_) return 1;
  const std::size_t j = (q - n_) % evens_.size();
  return npa_.priority(origin(q)) == evens_[j] ? 2 : 1;
}

State NbaOfNpa::origin(State q) const {
  if (q < n_) return q;
  return static_cast<State>((q - n_) / evens_.size());
}

void NbaOfNpa::successors(State q, Letter a, std::vector<State>& out) const {
  const std::size_t e = evens_.size();
  buf_.clear();
  npa_.successors(origin(q), a, buf_);
  if (q < n_) {
    for (State p : buf_) {
      out.push_back(p);
      for (std::size_t j = 0; j < e; ++j)
        if (npa_.priority(p) <= evens_[j]) out.push_back(static_cast<State>(n_ + p * e + j));
    }
  } else {
    const std::size_t j = (q - n_) % e;
    for (State p : buf_)
      if (npa_.priority(p) <= evens_[j]) out.push_back(static_cast<State>(n_ + p * e + j));
  }
}

// ---------------------------------------------------------------------------
// Safra trees

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint64_t>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : v) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

struct SafraDeterminizer::Impl {
  std::size_t n = 0;  // NBA states
  std::size_t words = 0;
  std::vector<std::uint64_t> accepting;
  // Per state: node count, parents, labels (node-major), priority.
  struct Tree {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint64_t> label;
    Priority prio = 1;
    bool sink = false;
  };
  std::vector<Tree> states;
  std::unordered_map<std::vector<std::uint64_t>, State, KeyHash> index;
  std::unordered_map<std::uint64_t, State> memo;
  std::vector<State> buf;

  std::vector<std::uint64_t> key(const Tree& t) const {
    std::vector<std::uint64_t> k;
    k.reserve(2 + t.parent.size() + t.label.size());
    k.push_back(t.sink ? ~0ULL : t.prio);
    k.push_back(t.parent.size());
    for (auto p : t.parent) k.push_back(p);
    k.insert(k.end(), t.label.begin(), t.label.end());
    return k;
  }

  State intern(Tree t) {
    auto k = key(t);
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    const State id = static_cast<State>(states.size());
    states.push_back(std::move(t));
    index.emplace(std::move(k), id);
    return id;
  }
};

SafraDeterminizer::SafraDeterminizer(const NpaSource& nba) : nba_(nba), impl_(std::make_unique<Impl>()) {
  auto& im = *impl_;
  im.n = nba.num_states();
  im.words = (im.n + 63) / 64;
  im.accepting.assign(im.words, 0);
  for (State q = 0; q < im.n; ++q) {
    const Priority p = nba.priority(q);
    if (p != 1 && p != 2) throw Error("nba_to_dpa: input is not a Buchi automaton");
    if (p == 2) im.accepting[q / 64] |= 1ULL << (q % 64);
  }
  Impl::Tree init;
  init.parent.push_back(0);
  init.label.assign(im.words, 0);
  init.label[nba.initial() / 64] |= 1ULL << (nba.initial() % 64);
  init.prio = 1;
  im.intern(std::move(init));
}

SafraDeterminizer::~SafraDeterminizer() = default;

std::size_t SafraDeterminizer::size() const { return impl_->states.size(); }

Priority SafraDeterminizer::priority(State s) const { return impl_->states.at(s).prio; }

bool SafraDeterminizer::is_sink(State s) const { return impl_->states.at(s).sink; }

std::vector<State> SafraDeterminizer::support(State s) const {
  const auto& t = impl_->states.at(s);
  std::vector<State> out;
  if (t.sink) return out;
  for (std::size_t w = 0; w < impl_->words; ++w)
    for (std::uint64_t bits = t.label[w]; bits != 0; bits &= bits - 1)
      out.push_back(static_cast<State>(w * 64 + __builtin_ctzll(bits)));
  return out;
}

State SafraDeterminizer::step(State s, Letter a) {
  auto& im = *impl_;
  const std::uint64_t mk = (static_cast<std::uint64_t>(s) << 32) | a;
  if (auto it = im.memo.find(mk); it != im.memo.end()) return it->second;

  const std::size_t W = im.words;
  const Impl::Tree& cur = im.states[s];
  State result;
  if (cur.sink) {
    result = s;
  } else {
    const std::size_t k = cur.parent.size();
    // Successor sets for every NBA state in the root label.
    std::vector<std::vector<std::uint64_t>> post(im.n);
    for (std::size_t w = 0; w < W; ++w) {
      for (std::uint64_t bits = cur.label[w]; bits != 0; bits &= bits - 1) {
        const State q = static_cast<State>(w * 64 + __builtin_ctzll(bits));
        im.buf.clear();
        nba_.successors(q, a, im.buf);
        auto& row = post[q];
        row.assign(W, 0);
        for (State r : im.buf) row[r / 64] |= 1ULL << (r % 64);
      }
    }
    std::vector<std::uint32_t> parent(cur.parent);
    std::vector<std::uint64_t> label(k * W, 0);
    for (std::size_t v = 0; v < k; ++v) {
      for (std::size_t w = 0; w < W; ++w) {
        for (std::uint64_t bits = cur.label[v * W + w]; bits != 0; bits &= bits - 1) {
          const State q = static_cast<State>(w * 64 + __builtin_ctzll(bits));
          for (std::size_t x = 0; x < W; ++x) label[v * W + x] |= post[q][x];
        }
      }
    }
    // Spawn youngest children holding the accepting states.
    for (std::size_t v = 0; v < k; ++v) {
      bool any = false;
      for (std::size_t w = 0; w < W; ++w) any |= (label[v * W + w] & im.accepting[w]) != 0;
      if (!any) continue;
      parent.push_back(static_cast<std::uint32_t>(v));
      for (std::size_t w = 0; w < W; ++w) label.push_back(label[v * W + w] & im.accepting[w]);
    }
    const std::size_t m = parent.size();
    // Horizontal merge: a state stays only in its oldest sibling.
    std::vector<std::uint64_t> acc(m * W, 0);
    for (std::size_t v = 1; v < m; ++v) {
      const std::size_t p = parent[v];
      for (std::size_t w = 0; w < W; ++w) {
        std::uint64_t x = label[v * W + w] & label[p * W + w] & ~acc[p * W + w];
        label[v * W + w] = x;
        acc[p * W + w] |= x;
      }
    }
    std::vector<char> alive(m, 1);
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::size_t e = none, f = none;
    for (std::size_t v = 0; v < m; ++v) {
      bool empty = true;
      for (std::size_t w = 0; w < W; ++w) empty &= label[v * W + w] == 0;
      if (empty) {
        alive[v] = 0;
        if (v < k) e = std::min(e, v);
      }
    }
    if (!alive[0]) {
      Impl::Tree sink;
      sink.sink = true;
      sink.prio = 1;
      result = im.intern(std::move(sink));
    } else {
      // Vertical merge: a node equal to the union of its children absorbs them.
      std::vector<std::uint64_t> cu(m * W, 0);
      std::vector<char> has_child(m, 0);
      for (std::size_t v = 1; v < m; ++v) {
        if (!alive[v]) continue;
        has_child[parent[v]] = 1;
        for (std::size_t w = 0; w < W; ++w) cu[parent[v] * W + w] |= label[v * W + w];
      }
      std::vector<char> absorbed(m, 0);
      for (std::size_t v = 0; v < m; ++v) {
        if (v > 0 && absorbed[parent[v]]) absorbed[v] = 1;
        if (!alive[v] || absorbed[v]) {
          if (absorbed[v]) alive[v] = 0;
          continue;
        }
        if (!has_child[v]) continue;
        bool eq = true;
        for (std::size_t w = 0; w < W; ++w) eq &= cu[v * W + w] == label[v * W + w];
        if (eq) {
          f = std::min(f, v);
          // Children inherit absorbed status through the parent check above.
          for (std::size_t u = v + 1; u < m; ++u)
            if (parent[u] == v || absorbed[parent[u]]) absorbed[u] = 1;
        }
      }
      for (std::size_t v = 1; v < m; ++v)
        if (absorbed[v]) alive[v] = 0;
      Impl::Tree next;
      std::vector<std::uint32_t> rename(m, 0);
      std::uint32_t c = 0;
      for (std::size_t v = 0; v < m; ++v) {
        if (!alive[v]) continue;
        rename[v] = c++;
        next.parent.push_back(v == 0 ? 0 : rename[parent[v]]);
        next.label.insert(next.label.end(), label.begin() + v * W, label.begin() + (v + 1) * W);
      }
      // Min-parity 2f (good) / 2e-1 (bad) / 2n-1 (neutral), reflected to
      // max-parity by p -> 2n - p. An erased name outweighs a good event on
      // the same name.
      const Priority n2 = static_cast<Priority>(2 * im.n);
      next.prio = 1;
      if (f != none) next.prio = std::max(next.prio, n2 - 2 * static_cast<Priority>(f));
      if (e != none) next.prio = std::max(next.prio, n2 + 1 - 2 * static_cast<Priority>(e));
      result = im.intern(std::move(next));
    }
  }
  im.memo.emplace(mk, result);
  return result;
}

WordAutomaton SafraDeterminizer::materialize(const Alphabet& alphabet) {
  std::vector<WordTransition> ts;
  std::vector<char> seen(1, 1);
  std::deque<State> work{initial()};
  while (!work.empty()) {
    const State s = work.front();
    work.pop_front();
    for (Letter a = 0; a < alphabet.size(); ++a) {
      const State t = step(s, a);
      ts.push_back({s, a, t});
      if (t >= seen.size()) seen.resize(t + 1, 0);
      if (!seen[t]) {
        seen[t] = 1;
        work.push_back(t);
      }
    }
  }
  const std::size_t n = size();
  std::vector<std::string> names(n);
  std::vector<Priority> pr(n);
  for (State s = 0; s < n; ++s) {
    names[s] = "d" + std::to_string(s);
    pr[s] = priority(s);
  }
  return {alphabet, std::move(names), initial(), std::move(pr), std::move(ts), true};
}

// ---------------------------------------------------------------------------
// Operations on explicit automata

double nba_size_bound(std::size_t n, std::size_t k) { return static_cast<double>(n) * (k + 1); }

double dpa_state_bound(std::size_t m) {
  double b = 2.0;
  for (std::size_t i = 0; i < m; ++i) b *= static_cast<double>(m);
  for (std::size_t i = 2; i <= m; ++i) b *= static_cast<double>(i);
  return b;
}

std::size_t dpa_priority_bound(std::size_t m) { return 2 * m; }

namespace {

WordAutomaton explore(const NpaSource& src, const Alphabet& sigma,
                      const std::function<std::string(State)>& name) {
  std::vector<State> id(src.num_states(), no_state);
  std::vector<State> order;
  std::vector<WordTransition> ts;
  id[src.initial()] = 0;
  order.push_back(src.initial());
  std::vector<State> buf;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const State q = order[i];
    for (Letter a = 0; a < sigma.size(); ++a) {
      buf.clear();
      src.successors(q, a, buf);
      for (State r : buf) {
        if (id[r] == no_state) {
          id[r] = static_cast<State>(order.size());
          order.push_back(r);
        }
        ts.push_back({static_cast<State>(i), a, id[r]});
      }
    }
  }
  std::vector<std::string> names;
  std::vector<Priority> pr;
  for (State q : order) {
    names.push_back(name(q));
    pr.push_back(src.priority(q));
  }
  return {sigma, std::move(names), 0, std::move(pr), std::move(ts), false};
}

}  // namespace

WordAutomaton npa_to_nba(const WordAutomaton& a) {
  WordSource src(a);
  NbaOfNpa nba(src);
  const std::size_t n = a.num_states();
  auto out = explore(nba, a.alphabet(), [&](State q) {
    if (q < n) return a.state_name(q);
    const auto j = (q - n) % nba.guesses().size();
    return a.state_name(nba.origin(q)) + "@" + std::to_string(nba.guesses()[j]);
  });
  if (out.num_states() > nba_size_bound(n, a.priority_set().size()))
    throw Error("npa_to_nba: size bound violated");
  return out;
}

namespace {

// A structurally deterministic Buchi automaton is already a parity automaton;
// it only needs a rejecting sink.
std::optional<WordAutomaton> complete_if_deterministic(const WordAutomaton& a) {
  bool needs_sink = false;
  for (State q = 0; q < a.num_states(); ++q)
    for (Letter l = 0; l < a.alphabet().size(); ++l) {
      const auto n = a.successors(q, l).size();
      if (n > 1) return std::nullopt;
      needs_sink |= n == 0;
    }
  auto r = reachable_part(a);
  auto names = r.state_names();
  auto pr = r.priorities();
  auto ts = r.transitions();
  const State sink = static_cast<State>(names.size());
  bool used = false;
  for (State q = 0; q < sink; ++q)
    for (Letter l = 0; l < a.alphabet().size(); ++l)
      if (r.successors(q, l).empty()) {
        ts.push_back({q, l, sink});
        used = true;
      }
  if (needs_sink && used) {
    names.push_back("sink");
    pr.push_back(1);
    for (Letter l = 0; l < a.alphabet().size(); ++l) ts.push_back({sink, l, sink});
  }
  return WordAutomaton(a.alphabet(), std::move(names), 0, std::move(pr), std::move(ts), true);
}

}  // namespace

WordAutomaton nba_to_dpa(const WordAutomaton& a) {
  if (!a.is_buchi()) throw Error("nba_to_dpa: input is not a Buchi automaton");
  if (auto d = complete_if_deterministic(a)) return *d;
  WordSource src(a);
  SafraDeterminizer det(src);
  auto out = det.materialize(a.alphabet());
  const std::size_t n = a.num_states();
  if (static_cast<double>(out.num_states()) > dpa_state_bound(n) ||
      out.priority_set().size() > dpa_priority_bound(n))
    throw Error("nba_to_dpa: size bound violated");
  return out;
}

WordAutomaton npa_to_dpa(const WordAutomaton& a) {
  if (a.is_buchi()) return nba_to_dpa(a);
  return nba_to_dpa(npa_to_nba(a));
}

WordAutomaton dpa_complement(const WordAutomaton& a) {
  if (!a.deterministic() || !validate(a).empty()) throw Error("dpa_complement: input is not deterministic");
  if (!a.is_complete()) throw Error("dpa_complement: input is not complete");
  auto pr = a.priorities();
  for (auto& p : pr) ++p;
  return {a.alphabet(), a.state_names(), a.initial(), std::move(pr), a.transitions(), true};
}

namespace {

void require_dpa(const WordAutomaton& a, const char* op) {
  if (!a.deterministic() || !a.is_complete())
    throw Error(std::string(op) + ": operands must be deterministic and complete");
}

std::vector<Priority> evens_of(const WordAutomaton& a) {
  std::vector<Priority> out;
  for (auto p : a.priority_set())
    if (p % 2 == 0) out.push_back(p);
  return out;
}

}  // namespace

WordAutomaton conjunction_nba(const WordAutomaton& a, const WordAutomaton& b) {
  require_dpa(a, "conjunction");
  require_dpa(b, "conjunction");
  if (!(a.alphabet() == b.alphabet())) throw Error("conjunction: alphabet mismatch");
  const auto ea = evens_of(a), eb = evens_of(b);
  // State tuple (x, y, guess, flag); guess == -1 in the first phase.
  struct Key {
    State x, y;
    std::int32_t ga, gb;
    std::uint8_t flag;
    bool operator==(const Key&) const = default;
  };
  std::vector<Key> keys;
  std::unordered_map<std::uint64_t, State> ids;
  auto encode = [&](const Key& k) {
    std::uint64_t h = k.x;
    h = h * (b.num_states() + 1) + k.y;
    h = h * (ea.size() + 1) + static_cast<std::uint64_t>(k.ga + 1);
    h = h * (eb.size() + 1) + static_cast<std::uint64_t>(k.gb + 1);
    return h * 3 + k.flag;
  };
  auto get = [&](const Key& k) {
    auto [it, fresh] = ids.emplace(encode(k), static_cast<State>(keys.size()));
    if (fresh) keys.push_back(k);
    return it->second;
  };
  auto advance = [&](std::uint8_t flag, Priority pa, Priority pb, Priority ga, Priority gb) {
    std::uint8_t f = flag == 2 ? 0 : flag;
    if (f == 0 && pa == ga) f = 1;
    if (f == 1 && pb == gb) f = 2;
    return f;
  };
  get({a.initial(), b.initial(), -1, -1, 0});
  std::vector<WordTransition> ts;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (Letter l = 0; l < a.alphabet().size(); ++l) {
      const Key k = keys[i];
      const State x = a.step(k.x, l), y = b.step(k.y, l);
      const Priority pa = a.priority(x), pb = b.priority(y);
      if (k.ga < 0) {
        ts.push_back({static_cast<State>(i), l, get({x, y, -1, -1, 0})});
        for (std::size_t ia = 0; ia < ea.size(); ++ia)
          for (std::size_t ib = 0; ib < eb.size(); ++ib)
            if (pa <= ea[ia] && pb <= eb[ib])
              ts.push_back({static_cast<State>(i), l,
                            get({x, y, static_cast<std::int32_t>(ia), static_cast<std::int32_t>(ib),
                                 advance(0, pa, pb, ea[ia], eb[ib])})});
      } else {
        const Priority ga = ea[k.ga], gb = eb[k.gb];
        if (pa > ga || pb > gb) continue;
        ts.push_back({static_cast<State>(i), l, get({x, y, k.ga, k.gb, advance(k.flag, pa, pb, ga, gb)})});
      }
    }
  }
  std::vector<std::string> names;
  std::vector<Priority> pr;
  for (const auto& k : keys) {
    std::string nm = a.state_name(k.x) + "," + b.state_name(k.y);
    if (k.ga >= 0)
      nm += "|" + std::to_string(ea[k.ga]) + "," + std::to_string(eb[k.gb]) + "," + std::to_string(k.flag);
    names.push_back("(" + nm + ")");
    pr.push_back(k.flag == 2 ? 2 : 1);
  }
  return {a.alphabet(), std::move(names), 0, std::move(pr), std::move(ts), false};
}

WordAutomaton conjunction_dpa(const WordAutomaton& a, const WordAutomaton& b) {
  return compress_priorities(npa_to_dpa(conjunction_nba(a, b)));
}

WordAutomaton nba_union(const WordAutomaton& a, const WordAutomaton& b) {
  if (!(a.alphabet() == b.alphabet())) throw Error("union: alphabet mismatch");
  if (!a.is_buchi() || !b.is_buchi()) throw Error("union: operands must be Buchi automata");
  const State na = static_cast<State>(a.num_states());
  std::vector<std::string> names{"init"};
  std::vector<Priority> pr{1};
  for (State q = 0; q < na; ++q) {
    names.push_back("A." + a.state_name(q));
    pr.push_back(a.priority(q));
  }
  for (State q = 0; q < b.num_states(); ++q) {
    names.push_back("B." + b.state_name(q));
    pr.push_back(b.priority(q));
  }
  std::vector<WordTransition> ts;
  for (const auto& t : a.transitions()) {
    ts.push_back({t.q + 1, t.a, t.to + 1});
    if (t.q == a.initial()) ts.push_back({0, t.a, t.to + 1});
  }
  for (const auto& t : b.transitions()) {
    ts.push_back({t.q + 1 + na, t.a, t.to + 1 + na});
    if (t.q == b.initial()) ts.push_back({0, t.a, t.to + 1 + na});
  }
  return {a.alphabet(), std::move(names), 0, std::move(pr), std::move(ts), false};
}

WordAutomaton compress_priorities(const WordAutomaton& a) {
  auto map = compress_map(a.priorities());
  auto pr = a.priorities();
  for (auto& p : pr) p = map[p];
  return {a.alphabet(), a.state_names(), a.initial(), std::move(pr), a.transitions(), a.deterministic()};
}

WordAutomaton reachable_part(const WordAutomaton& a) {
  WordSource src(a);
  auto out = explore(src, a.alphabet(), [&](State q) { return a.state_name(q); });
  return {out.alphabet(), out.state_names(), 0, out.priorities(), out.transitions(), a.deterministic()};
}

// ---------------------------------------------------------------------------
// Lasso membership: configurations (position, state) over u.v with the loop
// closed; accept iff some reachable cycle has an even maximal priority.

namespace {

// Runs a deterministic automaton to the loop entry, iterates the loop until
// the entry state repeats and inspects the priorities on that cycle.
bool lasso_member_det(const WordAutomaton& a, const Lasso& w) {
  State q = a.initial();
  for (Letter l : w.prefix) {
    auto s = a.successors(q, l);
    if (s.empty()) return false;
    q = s[0];
  }
  std::vector<State> entries;
  std::vector<Priority> block_max;
  while (true) {
    auto it = std::find(entries.begin(), entries.end(), q);
    if (it != entries.end()) {
      Priority m = 0;
      for (auto j = static_cast<std::size_t>(it - entries.begin()); j < block_max.size(); ++j)
        m = std::max(m, block_max[j]);
      return m % 2 == 0;
    }
    entries.push_back(q);
    Priority m = 0;
    for (Letter l : w.loop) {
      m = std::max(m, a.priority(q));
      auto s = a.successors(q, l);
      if (s.empty()) return false;
      q = s[0];
    }
    block_max.push_back(m);
  }
}

}  // namespace

bool lasso_member(const WordAutomaton& a, const Lasso& w) {
  if (w.loop.empty()) throw Error("lasso_member: empty loop");
  if (a.deterministic()) return lasso_member_det(a, w);
  const std::size_t u = w.prefix.size(), len = u + w.loop.size();
  const std::size_t n = a.num_states();
  auto letter = [&](std::size_t i) { return i < u ? w.prefix[i] : w.loop[i - u]; };
  auto next_pos = [&](std::size_t i) { return i + 1 < len ? i + 1 : u; };
  const std::size_t total = len * n;
  std::vector<std::vector<std::uint32_t>> succ(total);
  for (std::size_t i = 0; i < len; ++i)
    for (State q = 0; q < n; ++q)
      for (State r : a.successors(q, letter(i)))
        succ[i * n + q].push_back(static_cast<std::uint32_t>(next_pos(i) * n + r));
  std::vector<char> reach(total, 0);
  std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(a.initial())};
  reach[a.initial()] = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto t : succ[v])
      if (!reach[t]) {
        reach[t] = 1;
        stack.push_back(t);
      }
  }
  auto prio = [&](std::size_t v) { return a.priority(static_cast<State>(v % n)); };
  // For each reachable v with even priority p: is there a cycle through v
  // using only configurations of priority <= p?
  for (std::size_t v = 0; v < total; ++v) {
    if (!reach[v] || prio(v) % 2 != 0) continue;
    const Priority p = prio(v);
    std::vector<char> seen(total, 0);
    std::vector<std::uint32_t> st;
    for (auto t : succ[v])
      if (prio(t) <= p && !seen[t]) {
        seen[t] = 1;
        st.push_back(t);
      }
    while (!st.empty()) {
      auto x = st.back();
      st.pop_back();
      if (x == v) return true;
      for (auto t : succ[x])
        if (prio(t) <= p && !seen[t]) {
          seen[t] = 1;
          st.push_back(t);
        }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Strongly connected components of the subgraph induced by `allowed`
// (iterative Tarjan). Vertices outside it get UINT32_MAX.

namespace {

std::pair<std::vector<std::uint32_t>, std::uint32_t> components(const std::vector<std::vector<std::uint32_t>>& adj,
                                                                const std::vector<char>& allowed) {
  const std::size_t n = adj.size();
  std::vector<std::uint32_t> index(n, UINT32_MAX), low(n, 0), comp(n, UINT32_MAX), stack;
  std::vector<char> on(n, 0);
  std::uint32_t counter = 0, ncomp = 0;
  for (std::uint32_t r = 0; r < n; ++r) {
    if (!allowed[r] || index[r] != UINT32_MAX) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> call{{r, 0}};
    index[r] = low[r] = counter++;
    stack.push_back(r);
    on[r] = 1;
    while (!call.empty()) {
      auto& [v, k] = call.back();
      if (k < adj[v].size()) {
        const auto w = adj[v][k++];
        if (!allowed[w]) continue;
        if (index[w] == UINT32_MAX) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = 1;
          call.emplace_back(w, 0);
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const auto done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = 0;
          comp[w] = ncomp;
        } while (w != done);
        ++ncomp;
      }
    }
  }
  return {std::move(comp), ncomp};
}

// Assigns priorities to the states of `part` bottom-up: inside each
// nontrivial SCC the states of maximal priority get the least value of the
// same parity above everything the rest of the SCC received. Every cycle keeps
// the parity of its maximum. States on no cycle inside `part` get off_cycle.
constexpr Priority off_cycle = std::numeric_limits<Priority>::max();

void minimize_part(const std::vector<std::vector<std::uint32_t>>& adj, const std::vector<Priority>& old,
                   const std::vector<char>& part, std::vector<Priority>& out) {
  const auto [comp, ncomp] = components(adj, part);
  std::vector<std::vector<std::uint32_t>> members(ncomp);
  for (std::uint32_t v = 0; v < adj.size(); ++v)
    if (comp[v] != UINT32_MAX) members[comp[v]].push_back(v);
  for (std::uint32_t c = 0; c < ncomp; ++c) {
    bool cyclic = false;
    Priority top = 0;
    for (auto v : members[c]) {
      top = std::max(top, old[v]);
      for (auto w : adj[v]) cyclic |= comp[w] == c;
    }
    if (!cyclic) {
      for (auto v : members[c]) out[v] = off_cycle;
      continue;
    }
    std::vector<char> rest(adj.size(), 0);
    for (auto v : members[c]) rest[v] = old[v] != top;
    minimize_part(adj, old, rest, out);
    Priority floor = 0;
    for (auto v : members[c])
      if (rest[v] && out[v] != off_cycle) floor = std::max(floor, out[v]);
    Priority p = top % 2;
    while (p < floor) p += 2;
    for (auto v : members[c])
      if (!rest[v]) out[v] = p;
  }
}

}  // namespace

WordAutomaton minimize_priorities(const WordAutomaton& a) {
  std::vector<std::vector<std::uint32_t>> adj(a.num_states());
  for (const auto& t : a.transitions()) adj[t.q].push_back(t.to);
  std::vector<Priority> pr(a.num_states(), 0);
  minimize_part(adj, a.priorities(), std::vector<char>(a.num_states(), 1), pr);
  // Any value at most the cycle values works off cycles; reuse the least one.
  Priority least = *std::min_element(pr.begin(), pr.end());
  if (least == off_cycle) least = 0;
  for (auto& p : pr)
    if (p == off_cycle) p = least;
  return {a.alphabet(), a.state_names(), a.initial(), std::move(pr), a.transitions(), a.deterministic()};
}

// ---------------------------------------------------------------------------
// Intersection emptiness: product graph, then one SCC pass per pair of even
// guesses (gx, gy) on the vertices whose priorities stay below them.

std::optional<Lasso> intersection_lasso(const WordAutomaton& x, const WordAutomaton& y) {
  if (!(x.alphabet() == y.alphabet())) throw Error("intersection: alphabet mismatch");
  const std::size_t ny = y.num_states(), sigma = x.alphabet().size();
  std::unordered_map<std::uint64_t, std::uint32_t> id;
  std::vector<std::pair<State, State>> node;
  std::vector<std::vector<std::pair<std::uint32_t, Letter>>> succ;
  std::vector<std::pair<std::uint32_t, Letter>> parent;
  auto get = [&](State p, State q, std::uint32_t from, Letter l) {
    auto [it, fresh] = id.emplace(std::uint64_t{p} * ny + q, static_cast<std::uint32_t>(node.size()));
    if (fresh) {
      node.emplace_back(p, q);
      succ.emplace_back();
      parent.emplace_back(from, l);
    }
    return it->second;
  };
  get(x.initial(), y.initial(), 0, 0);
  for (std::uint32_t i = 0; i < node.size(); ++i)
    for (Letter l = 0; l < sigma; ++l)
      for (State p : x.successors(node[i].first, l))
        for (State q : y.successors(node[i].second, l)) {
          const auto j = get(p, q, i, l);
          succ[i].emplace_back(j, l);
        }
  const std::size_t n = node.size();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto [j, l] : succ[i]) adj[i].push_back(j);

  // Letters of a path of at least one step from s to t inside `allowed`.
  auto path = [&](std::uint32_t s, std::uint32_t t, const std::vector<char>& allowed) {
    std::vector<std::pair<std::uint32_t, Letter>> from(n, {UINT32_MAX, 0});
    std::deque<std::uint32_t> work;
    for (auto [j, l] : succ[s])
      if (allowed[j] && from[j].first == UINT32_MAX) {
        from[j] = {s, l};
        work.push_back(j);
      }
    while (!work.empty() && from[t].first == UINT32_MAX) {
      const auto v = work.front();
      work.pop_front();
      for (auto [j, l] : succ[v])
        if (allowed[j] && from[j].first == UINT32_MAX) {
          from[j] = {v, l};
          work.push_back(j);
        }
    }
    std::vector<Letter> out;
    std::uint32_t v = t;
    do {
      out.push_back(from[v].second);
      v = from[v].first;
    } while (v != s);
    std::reverse(out.begin(), out.end());
    return out;
  };

  std::set<Priority> gx, gy;
  for (auto p : x.priorities())
    if (p % 2 == 0) gx.insert(p);
  for (auto p : y.priorities())
    if (p % 2 == 0) gy.insert(p);
  for (Priority ex : gx)
    for (Priority ey : gy) {
      std::vector<char> allowed(n, 0);
      for (std::size_t i = 0; i < n; ++i)
        allowed[i] = x.priority(node[i].first) <= ex && y.priority(node[i].second) <= ey;
      const auto [comp, ncomp] = components(adj, allowed);
      for (std::uint32_t c = 0; c < ncomp; ++c) {
        std::uint32_t u = UINT32_MAX, w = UINT32_MAX;
        bool cyclic = false;
        for (std::uint32_t i = 0; i < n; ++i) {
          if (comp[i] != c) continue;
          if (x.priority(node[i].first) == ex && u == UINT32_MAX) u = i;
          if (y.priority(node[i].second) == ey && w == UINT32_MAX) w = i;
          for (auto [j, l] : succ[i]) cyclic |= comp[j] == c;
        }
        if (!cyclic || u == UINT32_MAX || w == UINT32_MAX) continue;
        std::vector<char> inside(n, 0);
        for (std::uint32_t i = 0; i < n; ++i) inside[i] = comp[i] == c;
        Lasso out;
        for (std::uint32_t v = u; v != 0; v = parent[v].first) out.prefix.push_back(parent[v].second);
        std::reverse(out.prefix.begin(), out.prefix.end());
        out.loop = path(u, w, inside);
        if (u != w) {
          auto back = path(w, u, inside);
          out.loop.insert(out.loop.end(), back.begin(), back.end());
        } else {
          out.loop = path(u, u, inside);
        }
        return out;
      }
    }
  return std::nullopt;
}

}  // namespace treesep
