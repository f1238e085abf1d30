#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "masslab/trees.hpp"
#include "masslab/word.hpp"

namespace masslab::tape {

using trees::ClosedClass;

// A record of writes in the I-tape model: entry (i,n) writes symbol n on
// tape i.  On the wire and inside ClosedClass words an entry is the pair
// code pair(i,n).
struct Entry {
  nat tape = 0;
  nat symbol = 0;
  friend bool operator==(const Entry&, const Entry&) = default;
};

using TapeWord = std::vector<Entry>;

nat encode_entry(const Entry& e);
Entry decode_entry(nat code);
Word encode(const TapeWord& t);
TapeWord decode(const Word& w);

// The i-th projection: symbols written on tape i, in order.
Word proj(nat tape, const TapeWord& sigma);

// #{n < |sigma|-1 : tape(n) != tape(n+1)}.
nat mind_changes(const TapeWord& sigma);

// The instruction to write `sigma` on tape i.
TapeWord write(nat tape, const Word& sigma);

TapeWord cat(TapeWord a, const TapeWord& b);

std::string show(const TapeWord& t);

// Con(T_i): every projection of every prefix stays inside its tree.
bool con(const std::vector<ClosedClass>& trees, const TapeWord& sigma);

enum class TieMode { finite, omega, infinity };

// The tree associated with the consistent disjunction of the family:
// Con plus, for the finite mode, the mind-change budget mc(sigma) < n.
// The omega-mode path condition mc(f) < infinity has no tree-level
// reflection, so omega and infinity trees coincide here.
ClosedClass tie(TieMode mode, nat n, const std::vector<ClosedClass>& Ps);

inline ClosedClass tie(nat n, const std::vector<ClosedClass>& Ps) {
  return tie(TieMode::finite, n, Ps);
}

// The heart: sigma in the tie tree whose every projection is depth-d
// extendible in its factor tree.  Projections longer than d fall back to
// extendibility at their own length.
bool heart(const ClosedClass& tie_tree, const std::vector<ClosedClass>& Ps,
           std::size_t d, const TapeWord& sigma);

// Heart as a class over encoded tape words (factors recovered from tie
// metadata when Ps is not supplied separately).
ClosedClass heart_class(const ClosedClass& tie_tree, std::size_t d);

}  // namespace masslab::tape
