#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "treesep/core.hpp"
#include "treesep/omega.hpp"

namespace treesep {

// Line-based text format. The first significant line is the header
// ("tree nondet|det|game", "word nondet|det" or "regtree"), then:
//   alphabet a b
//   states q0 q1 TOP
//   initial q0
//   priorities q0=1 q1=0 TOP=0        (automata only)
//   q0 a -> q1 TOP                    (tree; regtree: node label -> left right)
//   q0 a -> q1                        (word)
// '#' starts a comment. The state name TOP denotes the top state.
// Errors are Error("line N: ...").

enum class FileType : std::uint8_t { Tree, Word, RegTree };

[[nodiscard]] FileType file_type(std::string_view text);

// Tree automata are also checked by validate(); the first violation is an error.
[[nodiscard]] TreeAutomaton parse_tree_automaton(std::string_view text);
[[nodiscard]] WordAutomaton parse_word_automaton(std::string_view text);
[[nodiscard]] RegularTree parse_regular_tree(std::string_view text);

// Names must be tokens: nonempty, no whitespace, '#' or '='.
[[nodiscard]] std::string serialize(const TreeAutomaton& a);
[[nodiscard]] std::string serialize(const WordAutomaton& a);
[[nodiscard]] std::string serialize(const RegularTree& t);

// Copies whose state names that are not tokens become s<index>.
[[nodiscard]] TreeAutomaton with_token_names(const TreeAutomaton& a);
[[nodiscard]] WordAutomaton with_token_names(const WordAutomaton& a);

// "0,1,2" or "0..2"; the result is sorted and distinct.
[[nodiscard]] std::vector<Priority> parse_priority_set(std::string_view text);

[[nodiscard]] std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace treesep
