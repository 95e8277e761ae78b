#include "treesep/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace treesep {

namespace {

struct Line {
  std::size_t no = 0;
  std::vector<std::string> tok;
};

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error("line " + std::to_string(line) + ": " + msg);
}

std::vector<Line> lex(std::string_view text) {
  std::vector<Line> out;
  std::size_t no = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    ++no;
    pos = end + 1;
    if (auto h = raw.find('#'); h != std::string_view::npos) raw = raw.substr(0, h);
    std::istringstream is{std::string(raw)};
    Line l{no, {}};
    for (std::string t; is >> t;) l.tok.push_back(t);
    if (!l.tok.empty()) out.push_back(std::move(l));
    if (end == text.size()) break;
  }
  return out;
}

bool is_token(const std::string& s) {
  if (s.empty() || s == "->") return false;
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '#' || c == '=') return false;
  return true;
}

// Header, keyword lines and transition lines of one file.
struct Document {
  FileType type = FileType::Tree;
  std::string kind;
  std::size_t header_line = 0;
  std::map<std::string, Line> keyword;
  std::vector<Line> transitions;
};

Document split(std::string_view text) {
  auto lines = lex(text);
  if (lines.empty()) fail(1, "empty file");
  Document d;
  const Line& h = lines[0];
  d.header_line = h.no;
  if (h.tok[0] == "tree" || h.tok[0] == "word") {
    if (h.tok.size() != 2) fail(h.no, "header must be '" + h.tok[0] + " <kind>'");
    d.type = h.tok[0] == "tree" ? FileType::Tree : FileType::Word;
    d.kind = h.tok[1];
  } else if (h.tok[0] == "regtree") {
    if (h.tok.size() != 1) fail(h.no, "header 'regtree' takes no kind");
    d.type = FileType::RegTree;
  } else {
    fail(h.no, "malformed header '" + h.tok[0] + "', expected tree, word or regtree");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& l = lines[i];
    if (l.tok.size() >= 3 && l.tok[2] == "->") {
      d.transitions.push_back(l);
      continue;
    }
    const std::string& k = l.tok[0];
    if (k != "alphabet" && k != "states" && k != "initial" && k != "priorities")
      fail(l.no, "unexpected line starting with '" + k + "'");
    if (!d.keyword.emplace(k, l).second) fail(l.no, "duplicate '" + k + "' line");
  }
  return d;
}

const Line& need(const Document& d, const std::string& k) {
  auto it = d.keyword.find(k);
  if (it == d.keyword.end()) fail(d.header_line, "missing '" + k + "' line");
  return it->second;
}

std::vector<std::string> names_of(const Line& l) {
  std::vector<std::string> out(l.tok.begin() + 1, l.tok.end());
  if (out.empty()) fail(l.no, "'" + l.tok[0] + "' needs at least one name");
  std::map<std::string, int> seen;
  for (const auto& n : out) {
    if (!is_token(n)) fail(l.no, "invalid name '" + n + "'");
    if (seen[n]++) fail(l.no, "duplicate name '" + n + "'");
  }
  return out;
}

// Shared skeleton of tree and word automata.
struct Skeleton {
  Alphabet sigma;
  std::vector<std::string> states;
  std::map<std::string, State> state_id;
  State initial = 0;
  std::vector<Priority> priority;
};

State state_ref(const Skeleton& s, const Line& l, const std::string& name) {
  auto it = s.state_id.find(name);
  if (it == s.state_id.end()) fail(l.no, "unknown state '" + name + "'");
  return it->second;
}

Letter letter_ref(const Alphabet& sigma, const Line& l, const std::string& name) {
  auto a = sigma.find(name);
  if (!a) fail(l.no, "unknown letter '" + name + "'");
  return *a;
}

Skeleton skeleton(const Document& d, bool with_priorities) {
  Skeleton s;
  const Line& al = need(d, "alphabet");
  s.sigma = Alphabet(names_of(al));
  const Line& st = need(d, "states");
  s.states = names_of(st);
  for (State q = 0; q < s.states.size(); ++q) s.state_id[s.states[q]] = q;
  const Line& in = need(d, "initial");
  if (in.tok.size() != 2) fail(in.no, "'initial' takes exactly one state");
  s.initial = state_ref(s, in, in.tok[1]);
  if (!with_priorities) {
    if (auto it = d.keyword.find("priorities"); it != d.keyword.end()) fail(it->second.no, "regular trees have no priorities");
    return s;
  }
  const Line& pl = need(d, "priorities");
  std::vector<std::optional<Priority>> pr(s.states.size());
  for (std::size_t i = 1; i < pl.tok.size(); ++i) {
    const std::string& t = pl.tok[i];
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(pl.no, "expected state=priority, got '" + t + "'");
    const State q = state_ref(s, pl, t.substr(0, eq));
    const std::string num = t.substr(eq + 1);
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos || num.size() > 9)
      fail(pl.no, "priority of '" + t.substr(0, eq) + "' is not a natural number");
    if (pr[q]) fail(pl.no, "priority of '" + t.substr(0, eq) + "' given twice");
    pr[q] = static_cast<Priority>(std::stoul(num));
  }
  for (State q = 0; q < pr.size(); ++q) {
    if (!pr[q]) fail(pl.no, "missing priority for state '" + s.states[q] + "'");
    s.priority.push_back(*pr[q]);
  }
  return s;
}

void expect(FileType want, const Document& d) {
  if (d.type != want) {
    static const char* names[] = {"tree", "word", "regtree"};
    fail(d.header_line, std::string("expected a ") + names[static_cast<int>(want)] + " file, got " +
                            names[static_cast<int>(d.type)]);
  }
}

void check_arity(const Line& l, std::size_t n) {
  if (l.tok.size() != n) fail(l.no, "transition needs " + std::to_string(n - 3) + " target(s) after '->'");
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += " " + x;
  return out;
}

void check_tokens(const std::vector<std::string>& names, const char* what) {
  for (const auto& n : names)
    if (!is_token(n)) throw Error(std::string("cannot serialize ") + what + " name '" + n + "'");
}

std::string automaton_head(const char* type, std::string_view kind, const Alphabet& sigma,
                           const std::vector<std::string>& names, State initial, const std::vector<Priority>& pr) {
  check_tokens(sigma.letters(), "letter");
  check_tokens(names, "state");
  std::string out = std::string(type) + " " + std::string(kind) + "\n";
  out += "alphabet" + join(sigma.letters()) + "\n";
  out += "states" + join(names) + "\n";
  out += "initial " + names.at(initial) + "\n";
  out += "priorities";
  for (std::size_t q = 0; q < names.size(); ++q) out += " " + names[q] + "=" + std::to_string(pr[q]);
  return out + "\n";
}

std::vector<std::string> token_names(const std::vector<std::string>& names) {
  std::vector<std::string> out = names;
  std::map<std::string, int> used;
  for (const auto& n : names) used[n]++;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (is_token(out[i]) && used[out[i]] == 1) continue;
    std::string fresh = "s" + std::to_string(i);
    while (used.count(fresh)) fresh += "_";
    used[fresh] = 1;
    out[i] = fresh;
  }
  return out;
}

}  // namespace

FileType file_type(std::string_view text) { return split(text).type; }

TreeAutomaton parse_tree_automaton(std::string_view text) {
  const Document d = split(text);
  expect(FileType::Tree, d);
  AutomatonKind kind;
  if (d.kind == "nondet")
    kind = AutomatonKind::Nondeterministic;
  else if (d.kind == "det")
    kind = AutomatonKind::Deterministic;
  else if (d.kind == "game")
    kind = AutomatonKind::Game;
  else
    fail(d.header_line, "unknown kind '" + d.kind + "', expected nondet, det or game");
  const Skeleton s = skeleton(d, true);
  std::vector<Transition> ts;
  for (const auto& l : d.transitions) {
    check_arity(l, 5);
    ts.push_back({state_ref(s, l, l.tok[0]), letter_ref(s.sigma, l, l.tok[1]), state_ref(s, l, l.tok[3]),
                  state_ref(s, l, l.tok[4])});
  }
  auto top = s.state_id.find("TOP");
  TreeAutomaton a(s.sigma, s.states, s.initial, s.priority, std::move(ts), kind,
                  top == s.state_id.end() ? no_state : top->second);
  if (auto v = validate(a); !v.empty()) throw Error("invalid automaton: " + v[0].invariant + ": " + v[0].detail);
  return a;
}

WordAutomaton parse_word_automaton(std::string_view text) {
  const Document d = split(text);
  expect(FileType::Word, d);
  if (d.kind != "nondet" && d.kind != "det") fail(d.header_line, "unknown kind '" + d.kind + "', expected nondet or det");
  const Skeleton s = skeleton(d, true);
  std::vector<WordTransition> ts;
  for (const auto& l : d.transitions) {
    check_arity(l, 4);
    ts.push_back({state_ref(s, l, l.tok[0]), letter_ref(s.sigma, l, l.tok[1]), state_ref(s, l, l.tok[3])});
  }
  WordAutomaton w(s.sigma, s.states, s.initial, s.priority, std::move(ts), d.kind == "det");
  if (auto v = validate(w); !v.empty()) throw Error("invalid automaton: " + v[0].invariant + ": " + v[0].detail);
  return w;
}

RegularTree parse_regular_tree(std::string_view text) {
  const Document d = split(text);
  expect(FileType::RegTree, d);
  const Skeleton s = skeleton(d, false);
  RegularTree t;
  t.alphabet = s.sigma;
  t.node_names = s.states;
  t.root = s.initial;
  t.label.assign(s.states.size(), 0);
  t.succ.assign(s.states.size(), {0, 0});
  std::vector<char> seen(s.states.size(), 0);
  for (const auto& l : d.transitions) {
    check_arity(l, 5);
    const State n = state_ref(s, l, l.tok[0]);
    if (seen[n]++) fail(l.no, "node '" + l.tok[0] + "' defined twice");
    t.label[n] = letter_ref(s.sigma, l, l.tok[1]);
    t.succ[n] = {state_ref(s, l, l.tok[3]), state_ref(s, l, l.tok[4])};
  }
  for (State n = 0; n < seen.size(); ++n)
    if (!seen[n]) fail(d.keyword.at("states").no, "node '" + s.states[n] + "' has no line");
  if (auto v = validate(t); !v.empty()) throw Error("invalid tree: " + v[0].invariant + ": " + v[0].detail);
  return t;
}

std::string serialize(const TreeAutomaton& a) {
  if (a.has_top() && a.state_name(a.top()) != "TOP") throw Error("cannot serialize: the top state must be named TOP");
  if (auto t = a.find_state("TOP"); t && *t != a.top()) throw Error("cannot serialize: TOP names a non-top state");
  std::string out =
      automaton_head("tree", kind_name(a.kind()), a.alphabet(), a.state_names(), a.initial(), a.priorities());
  for (const auto& t : a.transitions())
    out += a.state_name(t.q) + " " + a.alphabet().name(t.a) + " -> " + a.state_name(t.left) + " " +
           a.state_name(t.right) + "\n";
  return out;
}

std::string serialize(const WordAutomaton& a) {
  std::string out = automaton_head("word", a.deterministic() ? "det" : "nondet", a.alphabet(), a.state_names(),
                                   a.initial(), a.priorities());
  for (const auto& t : a.transitions())
    out += a.state_name(t.q) + " " + a.alphabet().name(t.a) + " -> " + a.state_name(t.to) + "\n";
  return out;
}

std::string serialize(const RegularTree& t) {
  check_tokens(t.alphabet.letters(), "letter");
  check_tokens(t.node_names, "node");
  std::string out = "regtree\nalphabet" + join(t.alphabet.letters()) + "\nstates" + join(t.node_names) +
                    "\ninitial " + t.node_names.at(t.root) + "\n";
  for (std::size_t n = 0; n < t.size(); ++n)
    out += t.node_names[n] + " " + t.alphabet.name(t.label[n]) + " -> " + t.node_names[t.succ[n][0]] + " " +
           t.node_names[t.succ[n][1]] + "\n";
  return out;
}

TreeAutomaton with_token_names(const TreeAutomaton& a) {
  auto names = token_names(a.state_names());
  for (State q = 0; q < names.size(); ++q) {
    if (q == a.top()) names[q] = "TOP";
    else if (names[q] == "TOP") names[q] = "s" + std::to_string(q);
  }
  return {a.alphabet(), names, a.initial(), a.priorities(), a.transitions(), a.kind(), a.top()};
}

WordAutomaton with_token_names(const WordAutomaton& a) {
  return {a.alphabet(), token_names(a.state_names()), a.initial(), a.priorities(), a.transitions(), a.deterministic()};
}

std::vector<Priority> parse_priority_set(std::string_view text) {
  auto number = [&](std::string_view t) {
    if (t.empty() || t.size() > 9 || t.find_first_not_of("0123456789") != std::string_view::npos)
      throw Error("priority set '" + std::string(text) + "': '" + std::string(t) + "' is not a natural number");
    return static_cast<Priority>(std::stoul(std::string(t)));
  };
  std::set<Priority> out;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    const Priority lo = number(text.substr(0, dots)), hi = number(text.substr(dots + 2));
    if (lo > hi) throw Error("priority set '" + std::string(text) + "': empty range");
    for (Priority p = lo; p <= hi; ++p) out.insert(p);
  } else {
    std::size_t pos = 0;
    for (;;) {
      const auto comma = text.find(',', pos);
      out.insert(number(text.substr(pos, comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  }
  return {out.begin(), out.end()};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace treesep
