#pragma once

#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "treesep/omega.hpp"

namespace treesep::testing {

// Base seed for randomized suites; TREESEP_SEED overrides it.
inline std::uint64_t base_seed() {
  if (const char* s = std::getenv("TREESEP_SEED")) return std::strtoull(s, nullptr, 10);
  return 20240611;
}

inline Alphabet ab() { return Alphabet({"a", "b"}); }

inline WordAutomaton word(const Alphabet& sigma, std::vector<Priority> pr, std::vector<WordTransition> ts,
                          bool det, State init = 0) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < pr.size(); ++i) names.push_back("s" + std::to_string(i));
  return {sigma, std::move(names), init, std::move(pr), std::move(ts), det};
}

// Every lasso u.v^w with |u| <= max_u and 1 <= |v| <= max_v.
inline std::vector<Lasso> all_lassos(std::size_t sigma, std::size_t max_u, std::size_t max_v) {
  auto words = [&](std::size_t len) {
    std::vector<std::vector<Letter>> out{{}};
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<std::vector<Letter>> next;
      for (const auto& w : out)
        for (Letter a = 0; a < sigma; ++a) {
          next.push_back(w);
          next.back().push_back(a);
        }
      out = std::move(next);
    }
    return out;
  };
  std::vector<Lasso> out;
  for (std::size_t lu = 0; lu <= max_u; ++lu)
    for (const auto& u : words(lu))
      for (std::size_t lv = 1; lv <= max_v; ++lv)
        for (const auto& v : words(lv)) out.push_back({u, v});
  return out;
}

// Random nondeterministic parity word automaton.
inline WordAutomaton random_npa(std::mt19937_64& rng, std::size_t max_states, Priority max_priority,
                                std::size_t sigma) {
  std::uniform_int_distribution<std::size_t> ns(1, max_states);
  const std::size_t n = ns(rng);
  std::uniform_int_distribution<Priority> pd(0, max_priority);
  std::vector<Priority> pr(n);
  for (auto& p : pr) p = pd(rng);
  std::vector<WordTransition> ts;
  std::uniform_int_distribution<int> coin(0, 2);
  for (State q = 0; q < n; ++q)
    for (Letter a = 0; a < sigma; ++a)
      for (State r = 0; r < n; ++r)
        if (coin(rng) == 0) ts.push_back({q, a, r});
  std::vector<std::string> letters;
  for (std::size_t i = 0; i < sigma; ++i) letters.push_back(std::string(1, static_cast<char>('a' + i)));
  return word(Alphabet(letters), pr, ts, false);
}

}  // namespace treesep::testing
