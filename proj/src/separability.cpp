#include "treesep/separability.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "treesep/tree.hpp"
#include "treesep/verify.hpp"

namespace treesep {

std::string_view variant_name(VariantKind k) {
  switch (k) {
    case VariantKind::WordDetC: return "word-det-c";
    case VariantKind::TreeDetC: return "det-c";
    case VariantKind::TreeDetCUniversal: return "det-c-universal";
    case VariantKind::TreeDet: return "det";
    case VariantKind::TreeGame: return "game";
    case VariantKind::TreeGameC: return "game-c";
  }
  return "?";
}

bool uses_priorities(VariantKind k) {
  return k == VariantKind::WordDetC || k == VariantKind::TreeDetC || k == VariantKind::TreeDetCUniversal ||
         k == VariantKind::TreeGameC;
}

bool is_game_variant(VariantKind k) { return k == VariantKind::TreeGame || k == VariantKind::TreeGameC; }

void check_variant(const Variant& v) {
  if (uses_priorities(v.kind)) {
    if (v.c.empty()) throw Error(std::string(variant_name(v.kind)) + " needs a nonempty priority set");
    if (!std::is_sorted(v.c.begin(), v.c.end()) || std::adjacent_find(v.c.begin(), v.c.end()) != v.c.end())
      throw Error("priority set must be sorted and distinct");
  } else if (!v.c.empty()) {
    throw Error(std::string(variant_name(v.kind)) + " takes no priority set");
  }
}

std::vector<Slot> round_slots(VariantKind k) {
  switch (k) {
    case VariantKind::WordDetC: return {Slot::C, Slot::A};
    case VariantKind::TreeDetC: return {Slot::C, Slot::A, Slot::F, Slot::D};
    case VariantKind::TreeDetCUniversal: return {Slot::C, Slot::A, Slot::D};
    case VariantKind::TreeDet: return {Slot::A, Slot::F, Slot::D};
    case VariantKind::TreeGame: return {Slot::A, Slot::M, Slot::F, Slot::D};
    case VariantKind::TreeGameC: return {Slot::C, Slot::A, Slot::M, Slot::F, Slot::D};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Arena

namespace {

constexpr std::size_t max_selector_bits = 20;

std::uint32_t transition_index(const TreeAutomaton& a, const Transition& t) {
  return static_cast<std::uint32_t>(&t - a.transitions().data());
}

}  // namespace

SeparabilityArena::SeparabilityArena(const Variant& v, const TreeAutomaton& a, const TreeAutomaton& b)
    : v_(v), slots_(round_slots(v.kind)), ta_(&a), tb_(&b), letters_(a.alphabet().size()) {
  check_variant(v);
  if (v.kind == VariantKind::WordDetC) throw Error("word-det-c needs word automata");
  if (!(a.alphabet() == b.alphabet())) throw Error("separability: alphabet mismatch");
}

SeparabilityArena::SeparabilityArena(const Variant& v, const WordAutomaton& a, const WordAutomaton& b)
    : v_(v), slots_(round_slots(v.kind)), wa_(&a), wb_(&b), letters_(a.alphabet().size()) {
  check_variant(v);
  if (v.kind != VariantKind::WordDetC) throw Error("word automata need the word-det-c variant");
  if (!(a.alphabet() == b.alphabet())) throw Error("separability: alphabet mismatch");
}

int SeparabilityArena::player(std::size_t k) const {
  const Slot s = slots_.at(k);
  return s == Slot::A || s == Slot::D ? input_player : separator_player;
}

std::size_t SeparabilityArena::slot_index(Slot s) const {
  for (std::size_t k = 0; k < slots_.size(); ++k)
    if (slots_[k] == s) return k;
  return slots_.size();
}

const TreeAutomaton* SeparabilityArena::selector_domain(std::span<const Choice> prefix) const {
  if (slot_index(Slot::F) == slots_.size()) return nullptr;
  const std::size_t km = slot_index(Slot::M);
  if (km < slots_.size() && static_cast<Mode>(prefix[km]) == Mode::Or) return ta_;
  return tb_;
}

void SeparabilityArena::choices(Position, std::span<const Choice> prefix, std::vector<Choice>& out) const {
  switch (slots_.at(prefix.size())) {
    case Slot::C:
      for (Choice i = 0; i < v_.c.size(); ++i) out.push_back(i);
      break;
    case Slot::A:
      for (Choice x = 0; x < letters_; ++x) out.push_back(x);
      break;
    case Slot::M:
      out.push_back(static_cast<Choice>(Mode::Or));
      out.push_back(static_cast<Choice>(Mode::And));
      break;
    case Slot::F: {
      const auto* x = selector_domain(prefix);
      const std::size_t n = x->by_letter(static_cast<Letter>(prefix[slot_index(Slot::A)])).size();
      if (n > max_selector_bits) throw LimitError("selector domain exceeds " + std::to_string(max_selector_bits) + " transitions");
      for (Choice f = 0; f < (Choice{1} << n); ++f) out.push_back(f);
      break;
    }
    case Slot::D:
      out.push_back(0);
      out.push_back(1);
      break;
  }
}

std::string SeparabilityArena::describe_choice(std::size_t k, Choice c) const {
  switch (slots_.at(k)) {
    case Slot::C: return "c=" + std::to_string(v_.c.at(c));
    case Slot::A:
      return "a=" + (ta_ ? ta_->alphabet().name(static_cast<Letter>(c)) : wa_->alphabet().name(static_cast<Letter>(c)));
    case Slot::M: return static_cast<Mode>(c) == Mode::Or ? "m=or" : "m=and";
    case Slot::F: return "f=" + std::to_string(c);
    case Slot::D: return std::string("d=") + dir_char(static_cast<Dir>(c));
  }
  return "?";
}

Round SeparabilityArena::decode(std::span<const Choice> o) const {
  Round r;
  for (std::size_t k = 0; k < slots_.size() && k < o.size(); ++k) {
    switch (slots_[k]) {
      case Slot::C: r.c = static_cast<int>(o[k]); break;
      case Slot::A: r.a = static_cast<Letter>(o[k]); break;
      case Slot::M: r.m = static_cast<int>(o[k]); break;
      case Slot::F: r.f = o[k]; break;
      case Slot::D: r.d = static_cast<int>(o[k]); break;
    }
  }
  return r;
}

bool guard_holds(const SeparabilityArena& arena, const Round& r, int side, std::uint32_t t) {
  if (arena.slot_index(Slot::F) == arena.num_decisions()) return true;
  const bool has_m = arena.slot_index(Slot::M) < arena.num_decisions();
  const int domain = has_m && static_cast<Mode>(r.m) == Mode::Or ? 0 : 1;
  if (side != domain) return true;
  const TreeAutomaton& x = side == 0 ? *arena.tree_a() : *arena.tree_b();
  return static_cast<int>((r.f >> x.letter_rank(t)) & 1) == r.d;
}

// ---------------------------------------------------------------------------
// Input's condition

struct InputNba::Impl {
  enum class Kind { Tree, Word, Priorities, None };
  struct Track {
    Kind kind = Kind::Priorities;
    int side = -1;
    std::size_t n = 1;
    State init = 0;
    std::vector<Priority> guesses;
  };
  // States of a block: pre-phase pairs (x, y), then (x, y, gx, gy, flag)
  // with flag 2 marking a completed round of both guesses. A single block
  // (y is None) needs no flag: (x, gx) accepts when x has priority gx.
  struct Block {
    Track x, y;
    std::size_t offset = 0;
    [[nodiscard]] bool single() const { return y.kind == Kind::None; }
    [[nodiscard]] std::size_t pre() const { return x.n * y.n; }
    [[nodiscard]] std::size_t size() const {
      return pre() * (1 + x.guesses.size() * (single() ? 1 : y.guesses.size() * 3));
    }
  };

  const SeparabilityArena& arena;
  std::vector<Block> blocks;
  bool joined = false;  // state 0 is a fresh initial state
  int subset_side = -1;
  Track subset_track;
  std::size_t total = 0;
  std::map<std::vector<Choice>, Letter> ids;
  std::vector<std::vector<Choice>> outcomes;
  std::vector<Round> rounds;
  mutable std::vector<State> sx, sy;

  explicit Impl(const SeparabilityArena& a) : arena(a) {}

  Track side_track(int side, bool even) const {
    Track t;
    t.side = side;
    std::set<Priority> ps;
    if (arena.tree_a()) {
      const TreeAutomaton& x = side == 0 ? *arena.tree_a() : *arena.tree_b();
      t.kind = Kind::Tree;
      t.n = x.num_states();
      t.init = x.initial();
      ps.insert(x.priorities().begin(), x.priorities().end());
    } else {
      const WordAutomaton& x = side == 0 ? *arena.word_a() : *arena.word_b();
      t.kind = Kind::Word;
      t.n = x.num_states();
      t.init = x.initial();
      ps.insert(x.priorities().begin(), x.priorities().end());
    }
    for (auto p : ps)
      if ((p % 2 == 0) == even) t.guesses.push_back(p);
    return t;
  }

  // One state of priority 0: the block then tests the other track alone.
  static Track none_track() {
    Track t;
    t.kind = Kind::None;
    t.guesses = {0};
    return t;
  }

  Track priority_track(bool even) const {
    Track t;
    for (auto p : arena.variant().c)
      if ((p % 2 == 0) == even) t.guesses.push_back(p);
    return t;
  }

  void track_successors(const Track& t, State q, const Round& r, std::vector<State>& out) const {
    out.clear();
    switch (t.kind) {
      case Kind::Tree: {
        const TreeAutomaton& x = t.side == 0 ? *arena.tree_a() : *arena.tree_b();
        for (const auto& tr : x.from(q, r.a))
          if (guard_holds(arena, r, t.side, transition_index(x, tr))) out.push_back(tr.target(static_cast<Dir>(r.d)));
        break;
      }
      case Kind::Word: {
        const WordAutomaton& x = t.side == 0 ? *arena.word_a() : *arena.word_b();
        for (State s : x.successors(q, r.a)) out.push_back(s);
        break;
      }
      case Kind::Priorities:
      case Kind::None:
        out.push_back(0);
        break;
    }
  }

  Priority state_priority(const Track& t, State q) const {
    if (t.kind == Kind::Tree) return (t.side == 0 ? *arena.tree_a() : *arena.tree_b()).priority(q);
    if (t.kind == Kind::Word) return (t.side == 0 ? *arena.word_a() : *arena.word_b()).priority(q);
    return 0;
  }

  Priority track_priority(const Track& t, State q, const Round& r) const {
    switch (t.kind) {
      case Kind::Tree: return (t.side == 0 ? *arena.tree_a() : *arena.tree_b()).priority(q);
      case Kind::Word: return (t.side == 0 ? *arena.word_a() : *arena.word_b()).priority(q);
      case Kind::Priorities: return arena.variant().c.at(static_cast<std::size_t>(r.c));
      case Kind::None: return 0;
    }
    return 0;
  }

  [[nodiscard]] std::size_t block_of(State q) const {
    for (std::size_t i = blocks.size(); i-- > 0;)
      if (q >= blocks[i].offset) return i;
    return 0;
  }

  State post(const Block& b, State x, State y, std::size_t gx, std::size_t gy, std::uint8_t flag) const {
    if (b.single()) return static_cast<State>(b.offset + b.pre() + x * b.x.guesses.size() + gx);
    const std::size_t pair = x * b.y.n + y;
    const std::size_t t = ((pair * b.x.guesses.size() + gx) * b.y.guesses.size() + gy) * 3 + flag;
    return static_cast<State>(b.offset + b.pre() + t);
  }

  void expand(const Block& b, std::size_t local, const Round& r, std::vector<State>& out) const {
    const std::size_t pre = b.pre();
    const bool first = local < pre;
    std::size_t pair = local, gx = 0, gy = 0;
    std::uint8_t flag = 0;
    if (!first && b.single()) {
      gx = (local - pre) % b.x.guesses.size();
      pair = (local - pre) / b.x.guesses.size();
    } else if (!first) {
      std::size_t t = local - pre;
      flag = static_cast<std::uint8_t>(t % 3);
      t /= 3;
      gy = t % b.y.guesses.size();
      t /= b.y.guesses.size();
      gx = t % b.x.guesses.size();
      pair = t / b.x.guesses.size();
    }
    const State x = static_cast<State>(pair / b.y.n), y = static_cast<State>(pair % b.y.n);
    std::vector<State> nx, ny;
    track_successors(b.x, x, r, nx);
    if (nx.empty()) return;
    track_successors(b.y, y, r, ny);
    auto advance = [](std::uint8_t f, Priority px, Priority py, Priority ex, Priority ey) {
      f = f == 2 ? 0 : f;
      if (f == 0 && px == ex) f = 1;
      if (f == 1 && py == ey) f = 2;
      return f;
    };
    for (State x2 : nx) {
      const Priority px = track_priority(b.x, x2, r);
      for (State y2 : ny) {
        const Priority py = track_priority(b.y, y2, r);
        if (first) {
          out.push_back(static_cast<State>(b.offset + x2 * b.y.n + y2));
          for (std::size_t i = 0; i < b.x.guesses.size(); ++i)
            for (std::size_t j = 0; j < b.y.guesses.size(); ++j)
              if (px <= b.x.guesses[i] && py <= b.y.guesses[j])
                out.push_back(post(b, x2, y2, i, j, advance(0, px, py, b.x.guesses[i], b.y.guesses[j])));
        } else {
          const Priority ex = b.x.guesses[gx], ey = b.y.guesses[gy];
          if (px <= ex && py <= ey) out.push_back(post(b, x2, y2, gx, gy, advance(flag, px, py, ex, ey)));
        }
      }
    }
  }
};

InputNba::InputNba(const SeparabilityArena& arena) : impl_(std::make_unique<Impl>(arena)) {
  auto& im = *impl_;
  const VariantKind k = arena.variant().kind;
  if (k == VariantKind::TreeDet || k == VariantKind::TreeGame) {
    // A side whose priorities are all even only needs some infinite run;
    // it is tracked by subsets outside the Buchi automaton.
    for (int side : {0, 1}) {
      const auto& x = side == 0 ? *arena.tree_a() : *arena.tree_b();
      if (std::all_of(x.priorities().begin(), x.priorities().end(), [](Priority p) { return p % 2 == 0; })) {
        im.subset_side = side;
        im.subset_track = im.side_track(side, true);
        break;
      }
    }
    if (im.subset_side < 0)
      im.blocks.push_back({im.side_track(0, true), im.side_track(1, true)});
    else
      im.blocks.push_back({im.side_track(1 - im.subset_side, true), Impl::none_track()});
  } else {
    im.blocks.push_back({im.side_track(0, true), im.priority_track(false)});
    im.blocks.push_back({im.side_track(1, true), im.priority_track(true)});
    im.joined = true;
  }
  std::size_t off = im.joined ? 1 : 0;
  for (auto& b : im.blocks) {
    b.offset = off;
    off += b.size();
  }
  im.total = off;
}

InputNba::~InputNba() = default;

std::size_t InputNba::num_states() const { return impl_->total; }

State InputNba::initial() const {
  if (impl_->joined) return 0;
  const auto& b = impl_->blocks[0];
  return static_cast<State>(b.offset + b.x.init * b.y.n + b.y.init);
}

Priority InputNba::priority(State q) const {
  const auto& im = *impl_;
  if (im.joined && q == 0) return 1;
  const auto& b = im.blocks[im.block_of(q)];
  const std::size_t local = q - b.offset;
  if (local < b.pre()) return 1;
  if (b.single()) {
    const std::size_t g = (local - b.pre()) % b.x.guesses.size();
    const auto x = static_cast<State>((local - b.pre()) / b.x.guesses.size());
    return im.state_priority(b.x, x) == b.x.guesses[g] ? 2 : 1;
  }
  return (local - b.pre()) % 3 == 2 ? 2 : 1;
}

void InputNba::successors(State q, Letter l, std::vector<State>& out) const {
  const auto& im = *impl_;
  const Round& r = im.rounds.at(l);
  if (im.joined && q == 0) {
    for (const auto& b : im.blocks) im.expand(b, b.x.init * b.y.n + b.y.init, r, out);
    return;
  }
  const auto& b = im.blocks[im.block_of(q)];
  im.expand(b, q - b.offset, r, out);
}

Letter InputNba::intern(std::span<const Choice> outcome) {
  auto& im = *impl_;
  std::vector<Choice> key(outcome.begin(), outcome.end());
  auto [it, fresh] = im.ids.emplace(key, static_cast<Letter>(im.outcomes.size()));
  if (fresh) {
    im.rounds.push_back(im.arena.decode(key));
    im.outcomes.push_back(std::move(key));
  }
  return it->second;
}

const std::vector<Choice>& InputNba::outcome(Letter l) const { return impl_->outcomes.at(l); }

std::optional<State> InputNba::side_state(State q, int side) const {
  const auto& im = *impl_;
  if (im.joined && q == 0) {
    for (const auto& b : im.blocks)
      if (b.x.side == side) return b.x.init;
    return std::nullopt;
  }
  const auto& b = im.blocks[im.block_of(q)];
  std::size_t local = q - b.offset;
  if (local >= b.pre())
    local = b.single() ? (local - b.pre()) / b.x.guesses.size()
                       : (local - b.pre()) / 3 / b.y.guesses.size() / b.x.guesses.size();
  if (b.x.side == side) return static_cast<State>(local / b.y.n);
  if (b.y.side == side) return static_cast<State>(local % b.y.n);
  return std::nullopt;
}

int InputNba::subset_side() const { return impl_->subset_side; }

void InputNba::subset_successors(State q, Letter l, std::vector<State>& out) const {
  impl_->track_successors(impl_->subset_track, q, impl_->rounds.at(l), out);
}

State InputNba::subset_initial() const { return impl_->subset_track.init; }

std::vector<std::size_t> InputNba::block_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& b : impl_->blocks) out.push_back(b.size());
  return out;
}

WinCondition::WinCondition(const SeparabilityArena& arena)
    : arena_(arena), nba_(arena), safra_(nba_), f_slot_(arena.slot_index(Slot::F)) {
  if (nba_.subset_side() >= 0) (void)intern_pair(safra_.initial(), {nba_.subset_initial()});
}

State WinCondition::intern_pair(State safra, std::vector<State> subset) {
  if (subset.empty()) {
    if (sink_ == no_state) {
      sink_ = static_cast<State>(pairs_.size());
      pairs_.push_back({no_state, 0});
    }
    return sink_;
  }
  auto [sit, sfresh] = subset_ids_.emplace(std::move(subset), static_cast<std::uint32_t>(subsets_.size()));
  if (sfresh) subsets_.push_back(sit->first);
  const std::pair<State, std::uint32_t> key{safra, sit->second};
  auto [it, fresh] = pair_ids_.emplace(key, static_cast<State>(pairs_.size()));
  if (fresh) pairs_.push_back(key);
  return it->second;
}

State WinCondition::initial() { return nba_.subset_side() < 0 ? safra_.initial() : 0; }

Priority WinCondition::priority(State w) {
  if (nba_.subset_side() < 0) return safra_.priority(w);
  return w == sink_ ? 1 : safra_.priority(pairs_[w].first);
}

std::size_t WinCondition::explored_states() const {
  return nba_.subset_side() < 0 ? safra_.size() : pairs_.size();
}

State WinCondition::step(State w, Position, std::span<const Choice> outcome) {
  const Letter l = nba_.intern(outcome);
  if (nba_.subset_side() < 0) return safra_.step(w, l);
  if (w == sink_) return sink_;
  const auto [s, id] = pairs_[w];
  std::set<State> next;
  std::vector<State> buf;
  for (State q : subsets_[id]) {
    nba_.subset_successors(q, l, buf);
    next.insert(buf.begin(), buf.end());
  }
  if (next.empty()) return intern_pair(s, {});
  return intern_pair(safra_.step(s, l), {next.begin(), next.end()});
}

bool WinCondition::canonical_choices(State w, Position, std::span<const Choice> prefix, std::vector<Choice>& out) {
  if (prefix.size() != f_slot_) return false;
  const bool paired = nba_.subset_side() >= 0;
  if (paired ? w == sink_ || safra_.is_sink(pairs_[w].first) : safra_.is_sink(w)) {
    out.push_back(0);
    return true;
  }
  const TreeAutomaton* x = arena_.selector_domain(prefix);
  const int side = x == arena_.tree_a() ? 0 : 1;
  std::set<State> live;
  if (paired && side == nba_.subset_side()) {
    live.insert(subsets_[pairs_[w].second].begin(), subsets_[pairs_[w].second].end());
  } else {
    for (State s : safra_.support(paired ? pairs_[w].first : w))
      if (auto q = nba_.side_state(s, side)) live.insert(*q);
  }
  const auto ids = x->by_letter(static_cast<Letter>(prefix[arena_.slot_index(Slot::A)]));
  std::vector<std::size_t> bits;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (live.count(x->transitions()[ids[i]].q)) bits.push_back(i);
  if (bits.size() > max_selector_bits)
    throw LimitError("selector domain exceeds " + std::to_string(max_selector_bits) + " live transitions");
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << bits.size()); ++s) {
    Choice f = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if ((s >> i) & 1) f |= Choice{1} << bits[i];
    out.push_back(f);
  }
  return true;
}

bool WinCondition::accepts(const std::vector<std::vector<Choice>>& prefix,
                           const std::vector<std::vector<Choice>>& loop) {
  if (loop.empty()) throw Error("accepts: empty loop");
  State s = initial();
  for (const auto& o : prefix) s = step(s, 0, o);
  std::vector<State> starts;
  while (std::find(starts.begin(), starts.end(), s) == starts.end()) {
    starts.push_back(s);
    for (const auto& o : loop) s = step(s, 0, o);
  }
  // s re-entered the loop: its cycle passes every state visited from here on.
  const State entry = s;
  Priority best = 0;
  do {
    for (const auto& o : loop) {
      s = step(s, 0, o);
      best = std::max(best, priority(s));
    }
  } while (s != entry);
  return best % 2 == 0;
}

// ---------------------------------------------------------------------------
// Paths and generalised automata

Alphabet path_alphabet(const Alphabet& sigma) {
  std::vector<std::string> names;
  for (const auto& x : sigma.letters()) {
    names.push_back(x + ".L");
    names.push_back(x + ".R");
  }
  return Alphabet(names);
}

WordAutomaton path_language(const TreeAutomaton& a) {
  std::vector<WordTransition> ts;
  for (const auto& t : a.transitions())
    for (int d = 0; d < 2; ++d) ts.push_back({t.q, static_cast<Letter>(2 * t.a + d), t.target(static_cast<Dir>(d))});
  return {path_alphabet(a.alphabet()), a.state_names(), a.initial(), a.priorities(), std::move(ts), false};
}

namespace {

// Deterministic tree automaton reading (a,L) to the left and (a,R) to the right.
TreeAutomaton fold_paths(const WordAutomaton& d, const Alphabet& sigma) {
  const State n = static_cast<State>(d.num_states());
  std::vector<std::string> names;
  for (State q = 0; q < n; ++q) names.push_back("d" + std::to_string(q));
  names.push_back("TOP");
  std::vector<Priority> pr = d.priorities();
  pr.push_back(0);
  std::vector<Transition> ts;
  for (State q = 0; q < n; ++q)
    for (Letter a = 0; a < sigma.size(); ++a) ts.push_back({q, a, d.step(q, 2 * a), d.step(q, 2 * a + 1)});
  for (Letter a = 0; a < sigma.size(); ++a) ts.push_back({n, a, n, n});
  return {sigma, std::move(names), d.initial(), std::move(pr), std::move(ts), AutomatonKind::Deterministic, n};
}

bool rejecting_sink(const WordAutomaton& d, State s) {
  if (d.priority(s) % 2 == 0) return false;
  for (Letter l = 0; l < d.alphabet().size(); ++l)
    if (d.step(s, l) != s) return false;
  return true;
}

}  // namespace

TreeAutomaton path_automaton(const TreeAutomaton& a) {
  return fold_paths(minimize_priorities(npa_to_dpa(path_language(a))), a.alphabet());
}

std::vector<Diagnostic> validate(const GeneralisedGameAutomaton& g) {
  std::vector<Diagnostic> out;
  if (!g.base.is_game_like()) out.push_back({"shape", "base is not a game automaton"});
  for (auto& d : validate(g.base))
    if (d.invariant != "top" || g.base.has_top()) out.push_back(d);
  if (!g.condition.deterministic() || !g.condition.is_complete())
    out.push_back({"condition", "condition is not deterministic and complete"});
  if (!(g.condition.alphabet() == path_alphabet(g.base.alphabet())))
    out.push_back({"condition", "condition alphabet is not Sigma x {L,R}"});
  return out;
}

bool generalised_member(const GeneralisedGameAutomaton& g, const RegularTree& t0) {
  if (!validate(g).empty()) throw Error("generalised_member: malformed automaton");
  const RegularTree t = align_alphabet(t0, g.base.alphabet());
  const auto& a = g.base;
  const auto& d = g.condition;
  Priority p0 = std::numeric_limits<Priority>::max();
  for (auto p : d.priorities()) p0 = std::min(p0, p);
  using Key = std::tuple<std::uint32_t, State, State>;
  ParityGame game;
  std::map<Key, Vertex> id;
  std::vector<std::optional<Key>> key;  // empty for sinks and transition choices
  auto add = [&](Priority p, std::uint8_t owner, std::optional<Key> k) {
    key.push_back(k);
    return game.add_vertex(p, owner);
  };
  const Vertex win = add(0, 0, std::nullopt), lose = add(1, 0, std::nullopt);
  game.succ[win] = {win};
  game.succ[lose] = {lose};
  auto get = [&](std::uint32_t node, State q, State s) {
    if (q == a.top()) return win;
    const Key k{node, q, s};
    auto it = id.find(k);
    if (it != id.end()) return it->second;
    const Vertex v = add(d.priority(s), 0, k);
    id.emplace(k, v);
    return v;
  };
  game.initial = get(t.root, a.initial(), d.initial());
  for (Vertex v = 0; v < game.size(); ++v) {
    if (!key[v]) continue;
    const auto [node, q, s] = *key[v];
    const Letter x = t.label[node];
    auto ts = a.from(q, x);
    if (ts.empty()) game.succ[v].push_back(lose);
    for (const auto& tr : ts) {
      const Vertex c = add(p0, 1, std::nullopt);
      game.succ[v].push_back(c);
      for (int dir = 0; dir < 2; ++dir) {
        const Vertex w = get(t.child(node, static_cast<Dir>(dir)), tr.target(static_cast<Dir>(dir)),
                             d.step(s, 2 * x + dir));
        game.succ[c].push_back(w);
      }
    }
  }
  return solve_parity(game).winner[game.initial] == 0;
}

TreeAutomaton generalised_to_game(const GeneralisedGameAutomaton& g) {
  if (!validate(g).empty()) throw Error("generalised_to_game: malformed automaton");
  const auto& a = g.base;
  const auto& d = g.condition;
  const Alphabet& sigma = a.alphabet();
  std::map<std::pair<State, State>, State> id;
  std::vector<std::pair<State, State>> keys;
  std::vector<std::string> names;
  std::vector<Priority> pr;
  Priority odd = 1;
  for (auto p : d.priorities())
    if (p % 2 == 1) odd = std::max(odd, p);
  State bottom = no_state;
  // TOP gets its index once the reachable part is known; use a marker here.
  constexpr State top_mark = no_state - 1;
  auto get = [&](State q, State s) -> State {
    if (q == a.top()) return top_mark;
    if (rejecting_sink(d, s)) {
      if (bottom == no_state) {
        bottom = static_cast<State>(keys.size());
        keys.emplace_back(no_state, no_state);
        names.push_back("BOT");
        pr.push_back(odd);
      }
      return bottom;
    }
    auto [it, fresh] = id.emplace(std::make_pair(q, s), static_cast<State>(keys.size()));
    if (fresh) {
      keys.emplace_back(q, s);
      names.push_back("(" + a.state_name(q) + "," + d.state_name(s) + ")");
      pr.push_back(d.priority(s));
    }
    return it->second;
  };
  std::vector<Transition> ts;
  const State init = get(a.initial(), d.initial());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto [q, s] = keys[i];
    for (Letter x = 0; x < sigma.size(); ++x) {
      if (i == bottom) {
        ts.push_back({bottom, x, bottom, bottom});
        continue;
      }
      for (const auto& tr : a.from(q, x))
        ts.push_back({static_cast<State>(i), x, get(tr.left, d.step(s, 2 * x)), get(tr.right, d.step(s, 2 * x + 1))});
    }
  }
  const State top = static_cast<State>(keys.size());
  names.push_back("TOP");
  pr.push_back(0);
  for (auto& t : ts) {
    if (t.left == top_mark) t.left = top;
    if (t.right == top_mark) t.right = top;
  }
  for (Letter x = 0; x < sigma.size(); ++x) ts.push_back({top, x, top, top});
  return {sigma, std::move(names), init == top_mark ? top : init, std::move(pr), std::move(ts), a.kind(), top};
}

// ---------------------------------------------------------------------------
// Synthesis

namespace {

// Separator's decisions per memory element, read off a winning machine.
struct MachineTable {
  std::vector<int> c;                                        // per element
  std::vector<std::vector<int>> mode;                        // [element][letter]
  std::vector<std::vector<Choice>> f;                        // [element][letter]
  std::vector<std::vector<std::array<std::uint32_t, 2>>> to;  // [element][letter][d]
  std::vector<std::vector<std::uint32_t>> word_to;           // [element][letter]
};

MachineTable read_machine(const SeparabilityArena& arena, const StrategyMachine& m) {
  if (m.owner != separator_player) throw Error("synthesis needs a Separator machine");
  const std::size_t n = m.size(), letters = arena.num_letters();
  MachineTable t;
  t.c.assign(n, -1);
  t.mode.assign(n, std::vector<int>(letters, -1));
  t.f.assign(n, std::vector<Choice>(letters, 0));
  t.to.assign(n, std::vector<std::array<std::uint32_t, 2>>(letters, {0, 0}));
  t.word_to.assign(n, std::vector<std::uint32_t>(letters, 0));
  const auto& slots = arena.slots();
  for (std::uint32_t l = 0; l < n; ++l) {
    for (Letter a = 0; a < letters; ++a) {
      std::vector<Choice> o;
      bool complete = true;
      for (std::size_t k = 0; k < slots.size() && complete; ++k) {
        switch (slots[k]) {
          case Slot::A: o.push_back(a); break;
          case Slot::D: o.push_back(0); break;  // both directions handled below
          default: {
            auto c = m.decide(0, l, o);
            if (!c) complete = false;
            else o.push_back(*c);
          }
        }
      }
      if (!complete) throw Error("synthesis: the machine has no decision for a reachable round");
      const Round r = arena.decode(o);
      t.c[l] = r.c;
      t.mode[l][a] = r.m;
      t.f[l][a] = r.f;
      const std::size_t kd = arena.slot_index(Slot::D);
      if (kd == slots.size()) {
        auto nx = m.next(0, l, o);
        if (!nx) throw Error("synthesis: missing memory update");
        t.word_to[l][a] = nx->second;
        continue;
      }
      for (Choice d : {0, 1}) {
        o[kd] = d;
        auto nx = m.next(0, l, o);
        if (!nx) throw Error("synthesis: missing memory update");
        t.to[l][a][d] = nx->second;
      }
    }
  }
  return t;
}

std::vector<std::string> memory_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("m" + std::to_string(i));
  return names;
}

// alpha(M): states M + TOP, shape from the modes (conjunctive without modes).
TreeAutomaton alpha(const SeparabilityArena& arena, const StrategyMachine& m, const MachineTable& t,
                    const std::vector<Priority>& pr, AutomatonKind kind) {
  const Alphabet& sigma = arena.tree_a()->alphabet();
  const State n = static_cast<State>(m.size()), top = n;
  std::vector<Transition> ts;
  for (State l = 0; l < n; ++l)
    for (Letter a = 0; a < sigma.size(); ++a) {
      const auto [lt, rt] = t.to[l][a];
      if (t.mode[l][a] == static_cast<int>(Mode::Or)) {
        ts.push_back({l, a, lt, top});
        ts.push_back({l, a, top, rt});
      } else {
        ts.push_back({l, a, lt, rt});
      }
    }
  for (Letter a = 0; a < sigma.size(); ++a) ts.push_back({top, a, top, top});
  auto names = memory_names(n);
  names.push_back("TOP");
  auto p = pr;
  p.push_back(0);
  return {sigma, std::move(names), m.initial_memory, std::move(p), std::move(ts), kind, top};
}

// D for TreeGame: the paths whose machine-conform play satisfies Win_A,
// i.e. W_A x M projected to Sigma x {L,R}, then determinized.
WordAutomaton conform_paths(const SeparabilityArena& arena, const StrategyMachine& m, const MachineTable& t) {
  const TreeAutomaton& a = *arena.tree_a();
  std::map<std::pair<State, std::uint32_t>, State> id;
  std::vector<std::pair<State, std::uint32_t>> keys;
  auto get = [&](State p, std::uint32_t l) {
    auto [it, fresh] = id.emplace(std::make_pair(p, l), static_cast<State>(keys.size()));
    if (fresh) keys.emplace_back(p, l);
    return it->second;
  };
  get(a.initial(), m.initial_memory);
  std::vector<WordTransition> ts;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto [p, l] = keys[i];
    for (Letter x = 0; x < a.alphabet().size(); ++x)
      for (int d = 0; d < 2; ++d) {
        Round r;
        r.a = x;
        r.m = t.mode[l][x];
        r.f = t.f[l][x];
        r.d = d;
        for (const auto& tr : a.from(p, x))
          if (guard_holds(arena, r, 0, transition_index(a, tr)))
            ts.push_back({static_cast<State>(i), static_cast<Letter>(2 * x + d),
                          get(tr.target(static_cast<Dir>(d)), t.to[l][x][d])});
      }
  }
  std::vector<std::string> names;
  std::vector<Priority> pr;
  for (const auto& [p, l] : keys) {
    names.push_back("(" + a.state_name(p) + ",m" + std::to_string(l) + ")");
    pr.push_back(a.priority(p));
  }
  WordAutomaton npa(path_alphabet(a.alphabet()), std::move(names), 0, std::move(pr), std::move(ts), false);
  return minimize_priorities(npa_to_dpa(npa));
}

}  // namespace

TreeAutomaton synthesize_separator(const SeparabilityArena& arena, const StrategyMachine& m,
                                   std::size_t* determinized_states) {
  const Variant& v = arena.variant();
  if (!arena.tree_a()) throw Error("synthesize_separator: tree variant expected");
  if (v.kind == VariantKind::TreeDet) {
    auto s = path_automaton(*arena.tree_a());
    if (determinized_states) *determinized_states = s.num_states() - 1;
    return s;
  }
  const auto t = read_machine(arena, m);
  std::vector<Priority> pr(m.size(), 0);
  if (uses_priorities(v.kind))
    for (std::size_t l = 0; l < m.size(); ++l) pr[l] = v.c.at(static_cast<std::size_t>(t.c[l]));
  switch (v.kind) {
    case VariantKind::TreeDetC:
    case VariantKind::TreeDetCUniversal:
      return alpha(arena, m, t, pr, AutomatonKind::Deterministic);
    case VariantKind::TreeGameC:
      return alpha(arena, m, t, pr, AutomatonKind::Game);
    case VariantKind::TreeGame: {
      GeneralisedGameAutomaton g{alpha(arena, m, t, pr, AutomatonKind::Game), conform_paths(arena, m, t)};
      if (determinized_states) *determinized_states = g.condition.num_states();
      return generalised_to_game(g);
    }
    default:
      throw Error("synthesize_separator: unsupported variant");
  }
}

WordAutomaton synthesize_word_separator(const SeparabilityArena& arena, const StrategyMachine& m) {
  if (!arena.word_a()) throw Error("synthesize_word_separator: word variant expected");
  const auto t = read_machine(arena, m);
  const auto& v = arena.variant();
  std::vector<Priority> pr;
  std::vector<WordTransition> ts;
  for (std::uint32_t l = 0; l < m.size(); ++l) {
    pr.push_back(v.c.at(static_cast<std::size_t>(t.c[l])));
    for (Letter a = 0; a < arena.num_letters(); ++a) ts.push_back({l, a, t.word_to[l][a]});
  }
  return {arena.word_a()->alphabet(), memory_names(m.size()), m.initial_memory, std::move(pr), std::move(ts), true};
}

// ---------------------------------------------------------------------------
// Decision

namespace {

std::optional<Priority> first_of_parity(const Variant& v, int parity) {
  if (!uses_priorities(v.kind)) return static_cast<Priority>(parity);
  for (auto p : v.c)
    if (static_cast<int>(p % 2) == parity) return p;
  return std::nullopt;
}

SeparabilityResult solve(const SeparabilityArena& arena, const SeparabilityOptions& opt) {
  SeparabilityResult r;
  WinCondition cond(arena);
  const auto t0 = std::chrono::steady_clock::now();
  auto p = build_product(arena, cond, input_player, opt.max_vertices);
  auto sol = solve_parity(p.game);
  r.stats.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.stats.game_vertices = p.game.size();
  r.stats.condition_states = cond.explored_states();
  r.stats.nba_states = cond.nba_states();
  std::set<Priority> prios;
  for (State s = 0; s < cond.explored_states(); ++s) prios.insert(cond.priority(s));
  r.stats.condition_priorities = prios.size();
  r.separable = sol.winner[0] == 1;
  r.strategy = extract_strategy_machine(p, sol, r.separable ? 1 : 0);
  r.stats.memory = r.strategy->size();
  r.stats.determinized_states = r.stats.condition_states;
  return r;
}

}  // namespace

SeparabilityResult decide_separability(const Variant& v, const TreeAutomaton& a0, const TreeAutomaton& b0,
                                       const SeparabilityOptions& opt) {
  check_variant(v);
  if (v.kind == VariantKind::WordDetC) throw Error("word-det-c needs word automata");
  const TreeAutomaton b1 = align_alphabet(b0, a0.alphabet());
  auto ta = trim(a0), tb = trim(b1);
  // Fewer priorities keep the Input automaton and its determinization small.
  ta.automaton = minimize_priorities(ta.automaton);
  tb.automaton = minimize_priorities(tb.automaton);
  const Alphabet& sigma = a0.alphabet();

  auto shortcut = [&](std::optional<TreeAutomaton> s) {
    SeparabilityResult r;
    r.shortcut = true;
    r.separable = s.has_value();
    if (s) r.stats.determinized_states = s->num_states() - 1;
    r.separator = std::move(s);
    return r;
  };
  SeparabilityResult r;
  const auto odd = first_of_parity(v, 1), even = first_of_parity(v, 0);
  if (ta.empty && odd) {
    r = shortcut(rejecting_automaton(sigma, *odd));
  } else if (tb.empty && even) {
    r = shortcut(universal_automaton(sigma, *even));
  } else if (ta.empty || tb.empty) {
    r = shortcut(std::nullopt);
  } else if (auto d = opt.overlap_check ? decide_disjoint(ta.automaton, tb.automaton) : DisjointResult{true, std::nullopt, 0, 0};
             !d.disjoint) {
    r = shortcut(std::nullopt);
    r.overlap = std::move(d.witness);
  } else {
    SeparabilityArena arena(v, ta.automaton, tb.automaton);
    r = solve(arena, opt);
    if (r.separable && opt.synthesize) {
      std::size_t det = r.stats.determinized_states;
      r.separator = synthesize_separator(arena, *r.strategy, &det);
      r.stats.determinized_states = det;
    }
  }
  if (opt.verify && r.separator) r.verified = verify_separator(a0, b1, *r.separator, v).pass;
  return r;
}

SeparabilityResult decide_separability(const Variant& v, const WordAutomaton& a, const WordAutomaton& b,
                                       const SeparabilityOptions& opt) {
  check_variant(v);
  SeparabilityArena arena(v, a, b);
  auto r = solve(arena, opt);
  if (r.separable && opt.synthesize) r.word_separator = synthesize_word_separator(arena, *r.strategy);
  if (opt.verify && r.word_separator) r.verified = verify_word_separator(a, b, *r.word_separator, v).pass;
  return r;
}

bool decide_universally_rejecting(const TreeAutomaton& a, const TreeAutomaton& b, const std::vector<Priority>& c) {
  SeparabilityOptions opt;
  opt.synthesize = false;
  return decide_separability({VariantKind::TreeDetCUniversal, c}, a, b, opt).separable;
}

}  // namespace treesep
