// Command-line front end. Exit codes: 0 decision or pass, 1 verification
// failure (or empty language for witness), 2 input error, 3 size limit hit.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "treesep/core.hpp"
#include "treesep/game.hpp"
#include "treesep/io.hpp"
#include "treesep/omega.hpp"
#include "treesep/separability.hpp"
#include "treesep/tree.hpp"
#include "treesep/verify.hpp"

using namespace treesep;
using nlohmann::json;

namespace {

constexpr int exit_fail = 1, exit_input = 2, exit_limit = 3;

struct DecideArgs {
  std::string variant, priorities, a, b, separator, json_path;
  bool verify = true;
  bool universally_rejecting = false;
  bool overlap_check = true;
  std::size_t max_vertices = SeparabilityOptions{}.max_vertices;
};

struct VerifyArgs {
  std::string a, b, separator, variant, priorities, json_path, counterexample;
};

Variant make_variant(const std::string& name, const std::string& priorities, bool universally_rejecting) {
  static const std::map<std::string, VariantKind> kinds{{"det", VariantKind::TreeDet},
                                                        {"det-c", VariantKind::TreeDetC},
                                                        {"game", VariantKind::TreeGame},
                                                        {"game-c", VariantKind::TreeGameC},
                                                        {"word-det-c", VariantKind::WordDetC}};
  auto it = kinds.find(name);
  if (it == kinds.end()) throw Error("unknown variant '" + name + "'");
  Variant v{it->second, {}};
  if (universally_rejecting) {
    if (v.kind != VariantKind::TreeDetC) throw Error("--universally-rejecting needs --variant det-c");
    v.kind = VariantKind::TreeDetCUniversal;
  }
  if (uses_priorities(v.kind) && priorities.empty()) throw Error("--variant " + name + " needs --priorities");
  if (!uses_priorities(v.kind) && !priorities.empty()) throw Error("--variant " + name + " takes no --priorities");
  if (!priorities.empty()) v.c = parse_priority_set(priorities);
  check_variant(v);
  return v;
}

TreeAutomaton load_tree(const std::string& path) {
  try {
    return parse_tree_automaton(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

WordAutomaton load_word(const std::string& path) {
  try {
    return parse_word_automaton(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

RegularTree load_regtree(const std::string& path) {
  try {
    return parse_regular_tree(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

FileType type_of(const std::string& path) {
  try {
    return file_type(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

json stats_json(const SeparabilityStats& s) {
  return {{"game_vertices", s.game_vertices},
          {"condition_states", s.condition_states},
          {"condition_priorities", s.condition_priorities},
          {"nba_states", s.nba_states},
          {"strategy_memory", s.memory},
          {"determinized_states", s.determinized_states},
          {"solve_seconds", s.solve_seconds}};
}

std::string lasso_text(const Alphabet& sigma, const Lasso& l) {
  std::string out = "u =";
  for (auto x : l.prefix) out += " " + sigma.name(x);
  out += " ; v =";
  for (auto x : l.loop) out += " " + sigma.name(x);
  return out;
}

void write_json(const std::string& path, const json& j) {
  if (!path.empty()) write_text_file(path, j.dump(2) + "\n");
}

int run_decide(const DecideArgs& args) {
  const Variant v = make_variant(args.variant, args.priorities, args.universally_rejecting);
  SeparabilityOptions opt;
  opt.overlap_check = args.overlap_check;
  opt.max_vertices = args.max_vertices;

  SeparabilityResult r;
  std::string text;  // canonical separator file
  std::optional<bool> certified;
  json verification = nullptr;
  if (v.kind == VariantKind::WordDetC) {
    const auto a = load_word(args.a), b = load_word(args.b);
    r = decide_separability(v, a, b, opt);
    if (r.word_separator) {
      text = serialize(with_token_names(*r.word_separator));
      if (args.verify) {
        auto rep = verify_word_separator(a, b, parse_word_automaton(text), v);
        certified = rep.pass;
        verification = {{"pass", rep.pass}, {"shape_ok", rep.shape_ok}, {"priorities_ok", rep.priorities_ok},
                        {"contained", rep.contained}, {"disjoint", rep.disjoint}};
      }
    }
  } else {
    const auto a = load_tree(args.a), b = load_tree(args.b);
    r = decide_separability(v, a, b, opt);
    if (r.separator) {
      text = serialize(with_token_names(*r.separator));
      if (args.verify) {
        // Certify the exact text that would be written.
        auto rep = verify_separator(a, b, parse_tree_automaton(text), v);
        certified = rep.pass;
        verification = {{"pass", rep.pass},         {"shape_ok", rep.shape_ok}, {"priorities_ok", rep.priorities_ok},
                        {"contained", rep.contained}, {"disjoint", rep.disjoint}, {"problems", rep.problems}};
      }
    }
  }

  std::cout << (r.separable ? "SEPARABLE" : "NOT_SEPARABLE") << "\n";
  if (r.shortcut) std::cout << "decided without the separability game" << (r.overlap ? " (languages intersect)" : "") << "\n";
  const bool write = r.separable && !text.empty() && !args.separator.empty() && certified != false;
  if (certified == false) std::cerr << "verification FAILED; separator not written\n";
  if (write) {
    write_text_file(args.separator, text);
    std::cout << "separator: " << args.separator << (certified ? " (verified)" : "") << "\n";
  }

  json report = {{"decision", r.separable ? "SEPARABLE" : "NOT_SEPARABLE"},
                 {"variant", variant_name(v.kind)},
                 {"priorities", v.c},
                 {"separator", write ? json(args.separator) : json(nullptr)},
                 {"shortcut", r.shortcut},
                 {"verification", verification},
                 {"stats", stats_json(r.stats)}};
  write_json(args.json_path, report);
  return certified == false ? exit_fail : 0;
}

int run_verify(const VerifyArgs& args) {
  json report;
  bool pass = false;
  if (type_of(args.separator) == FileType::Word) {
    const auto a = load_word(args.a), b = load_word(args.b), s = load_word(args.separator);
    Variant v{VariantKind::WordDetC, s.priority_set()};
    if (!args.variant.empty()) v = make_variant(args.variant, args.priorities, false);
    if (v.kind != VariantKind::WordDetC) throw Error("a word separator needs --variant word-det-c");
    const auto rep = verify_word_separator(a, b, s, v);
    pass = rep.pass;
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    std::optional<Lasso> cex = rep.containment_witness ? rep.containment_witness : rep.disjointness_witness;
    if (!rep.shape_ok) std::cout << "separator is not deterministic\n";
    if (!rep.priorities_ok) std::cout << "separator uses priorities outside C\n";
    if (cex) std::cout << (rep.containment_witness ? "in A, not in S: " : "in S and B: ") << lasso_text(a.alphabet(), *cex) << "\n";
    report = {{"pass", pass},
              {"shape_ok", rep.shape_ok},
              {"priorities_ok", rep.priorities_ok},
              {"contained", rep.contained},
              {"disjoint", rep.disjoint},
              {"counterexample", cex ? json(lasso_text(a.alphabet(), *cex)) : json(nullptr)}};
  } else {
    const auto a = load_tree(args.a), b = load_tree(args.b), s = load_tree(args.separator);
    // Default: language-level check in the separator's own shape family.
    Variant v{s.kind() == AutomatonKind::Game ? VariantKind::TreeGame : VariantKind::TreeDet, {}};
    if (!args.variant.empty()) v = make_variant(args.variant, args.priorities, false);
    const auto rep = verify_separator(a, b, s, v);
    pass = rep.pass;
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    for (const auto& p : rep.problems) std::cout << p << "\n";
    json cex_json = nullptr;
    if (!pass && rep.shape_ok) {
      if (auto c = counterexample(a, b, s)) {
        const std::string path = args.counterexample.empty() ? args.separator + ".cex.tree" : args.counterexample;
        write_text_file(path, serialize(c->tree));
        const char* what = c->failure == Failure::NotContained ? "in A, not in S" : "in S and B";
        std::cout << "counterexample: " << path << " (" << what << (c->recertified ? ", recertified" : "") << ")\n";
        cex_json = {{"path", path}, {"failure", what}, {"recertified", c->recertified}};
      }
    }
    report = {{"pass", pass},           {"variant", variant_name(v.kind)}, {"shape_ok", rep.shape_ok},
              {"priorities_ok", rep.priorities_ok}, {"contained", rep.contained}, {"disjoint", rep.disjoint},
              {"problems", rep.problems}, {"counterexample", cex_json}};
  }
  write_json(args.json_path, report);
  return pass ? 0 : exit_fail;
}

int run_witness(const std::string& in, const std::string& out) {
  const auto a = load_tree(in);
  if (trim(a).empty) {
    std::cout << "EMPTY\n";
    return exit_fail;
  }
  const auto text = serialize(emptiness_witness(a));
  std::cout << "NONEMPTY\n";
  if (out.empty())
    std::cout << text;
  else
    write_text_file(out, text);
  return 0;
}

int run_member(const std::string& aut, const std::string& tree) {
  auto a = load_tree(aut);
  auto t = align_alphabet(load_regtree(tree), a.alphabet());
  std::cout << (regular_tree_member(a, t) ? "true" : "false") << "\n";
  return 0;
}

int run_determinize(const std::string& in, const std::string& out) {
  const auto d = with_token_names(npa_to_dpa(load_word(in)));
  const auto text = serialize(d);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
    std::cout << "states " << d.num_states() << " priorities " << d.priority_set().size() << "\n";
  }
  return 0;
}

// Solution in pgsolver's convention: "paritysol N;" then "v winner [move];".
int run_solve_game(const std::string& in) {
  std::istringstream is(read_text_file(in));
  const auto g = read_pgsolver(is);
  const auto sol = solve_parity(g);
  std::cout << "paritysol " << g.size() - 1 << ";\n";
  for (Vertex v = 0; v < g.size(); ++v) {
    std::cout << v << " " << int(sol.winner[v]);
    if (sol.winner[v] == g.owner[v]) std::cout << " " << sol.strategy[v];
    std::cout << ";\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regular separability of parity tree automata by deterministic and game automata."};
  app.require_subcommand(1);

  DecideArgs d;
  auto* decide = app.add_subcommand("decide", "Decide separability and optionally emit a separator");
  decide->add_option("--variant", d.variant, "det | det-c | game | game-c | word-det-c")->required();
  decide->add_option("--priorities", d.priorities, "Priority set C, as 0,1,2 or 0..2 (the -c variants only)");
  decide->add_option("--a", d.a, "Automaton for the language to include")->required();
  decide->add_option("--b", d.b, "Automaton for the language to exclude")->required();
  decide->add_option("--separator", d.separator, "Write the separator here when separable");
  decide->add_flag("--verify,!--no-verify", d.verify, "Certify the separator before writing it (default on)");
  decide->add_option("--json", d.json_path, "Write a JSON report");
  decide->add_flag("--universally-rejecting", d.universally_rejecting,
                   "With det-c: require a separator whose rejecting branches are all rejected");
  decide->add_flag("--overlap-check,!--no-overlap-check", d.overlap_check,
                   "Refute intersecting languages before the game (default on)");
  decide->add_option("--max-vertices", d.max_vertices, "Game size limit");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Certify that S separates A from B");
  verify->add_option("--a", va.a)->required();
  verify->add_option("--b", va.b)->required();
  verify->add_option("--separator", va.separator)->required();
  verify->add_option("--variant", va.variant, "Also check the shape and C of this variant");
  verify->add_option("--priorities", va.priorities);
  verify->add_option("--json", va.json_path);
  verify->add_option("--counterexample", va.counterexample, "Where to write a refuting tree (default S.cex.tree)");

  std::string w_in, w_out;
  auto* witness = app.add_subcommand("witness", "A regular tree accepted by the automaton");
  witness->add_option("--a", w_in)->required();
  witness->add_option("--out", w_out, "Default: stdout");

  std::string m_aut, m_tree;
  auto* member = app.add_subcommand("member", "Membership of a regular tree");
  member->add_option("--automaton", m_aut)->required();
  member->add_option("--tree", m_tree)->required();

  std::string det_in, det_out;
  auto* determinize = app.add_subcommand("determinize", "Deterministic parity automaton for a word automaton");
  determinize->add_option("--in", det_in)->required();
  determinize->add_option("--out", det_out, "Default: stdout");

  std::string pg_in;
  auto* solve = app.add_subcommand("solve-game", "Solve a parity game in pgsolver format");
  solve->add_option("--in", pg_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_input;
  }

  try {
    if (*decide) return run_decide(d);
    if (*verify) return run_verify(va);
    if (*witness) return run_witness(w_in, w_out);
    if (*member) return run_member(m_aut, m_tree);
    if (*determinize) return run_determinize(det_in, det_out);
    if (*solve) return run_solve_game(pg_in);
  } catch (const LimitError& e) {
    std::cerr << "limit: " << e.what() << "\n";
    return exit_limit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  }
  return exit_input;
}
