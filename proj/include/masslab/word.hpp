#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "masslab/errors.hpp"
#include "masslab/pairing.hpp"

namespace masslab {

// A finite sequence over a countable alphabet.  Bits for 2^N, naturals for
// N^N; two-tape words use pair-coded (tape,symbol) entries.
using Word = std::vector<nat>;

inline bool is_prefix(const Word& sigma, const Word& f) {
  if (sigma.size() > f.size()) return false;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma[i] != f[i]) return false;
  return true;
}

inline Word prefix(const Word& f, std::size_t n) {
  return Word(f.begin(), f.begin() + std::min(n, f.size()));
}

// Immediate predecessor; defined only for nonempty words.
inline Word pred(const Word& sigma) {
  if (sigma.empty()) throw shape_error("pred: empty word has no predecessor");
  return Word(sigma.begin(), sigma.end() - 1);
}

inline Word cat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline Word cat(Word a, nat sym) {
  a.push_back(sym);
  return a;
}

inline Word suffix_from(const Word& f, std::size_t n) {
  if (n > f.size()) throw shape_error("suffix_from: offset past end");
  return Word(f.begin() + n, f.end());
}

// (f+g)(2n) = f(n), (f+g)(2n+1) = g(n); requires |f| in {|g|, |g|+1}.
inline Word interleave(const Word& f, const Word& g) {
  if (f.size() != g.size() && f.size() != g.size() + 1)
    throw shape_error("interleave: |f| must be |g| or |g|+1");
  Word out;
  out.reserve(f.size() + g.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.push_back(f[i]);
    if (i < g.size()) out.push_back(g[i]);
  }
  return out;
}

inline std::pair<Word, Word> deinterleave(const Word& w) {
  Word f, g;
  for (std::size_t i = 0; i < w.size(); ++i)
    (i % 2 == 0 ? f : g).push_back(w[i]);
  return {std::move(f), std::move(g)};
}

// Length-lexicographic order: shorter first, then lexicographic.
inline bool length_lex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

inline std::string show(const Word& w) {
  std::string s = "<";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(w[i]);
  }
  return s + ">";
}

}  // namespace masslab
