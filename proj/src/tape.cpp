#include "masslab/tape.hpp"

#include <algorithm>

#include "masslab/errors.hpp"
#include "masslab/pairing.hpp"

namespace masslab::tape {

nat encode_entry(const Entry& e) { return pair(e.tape, e.symbol); }

Entry decode_entry(nat code) {
  auto [i, n] = unpair(code);
  return Entry{i, n};
}

Word encode(const TapeWord& t) {
  Word w;
  w.reserve(t.size());
  for (const Entry& e : t) w.push_back(encode_entry(e));
  return w;
}

TapeWord decode(const Word& w) {
  TapeWord t;
  t.reserve(w.size());
  for (nat c : w) t.push_back(decode_entry(c));
  return t;
}

Word proj(nat tape, const TapeWord& sigma) {
  Word out;
  for (const Entry& e : sigma)
    if (e.tape == tape) out.push_back(e.symbol);
  return out;
}

nat mind_changes(const TapeWord& sigma) {
  nat mc = 0;
  for (std::size_t n = 0; n + 1 < sigma.size(); ++n)
    if (sigma[n].tape != sigma[n + 1].tape) ++mc;
  return mc;
}

TapeWord write(nat tape, const Word& sigma) {
  TapeWord t;
  t.reserve(sigma.size());
  for (nat s : sigma) t.push_back(Entry{tape, s});
  return t;
}

TapeWord cat(TapeWord a, const TapeWord& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string show(const TapeWord& t) {
  std::string s = "<";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += "(" + std::to_string(t[i].tape) + "," + std::to_string(t[i].symbol) + ")";
  }
  return s + ">";
}

bool con(const std::vector<ClosedClass>& trees, const TapeWord& sigma) {
  // Projections grow one symbol at a time, so checking each projection as it
  // grows covers pr_i(sigma|n) for every n <= |sigma|.
  std::vector<Word> pr(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i)
    if (!trees[i].member({})) return false;
  for (const Entry& e : sigma) {
    if (e.tape >= trees.size()) return false;
    pr[e.tape].push_back(e.symbol);
    if (!trees[e.tape].member(pr[e.tape])) return false;
  }
  return true;
}

ClosedClass tie(TieMode mode, nat n, const std::vector<ClosedClass>& Ps) {
  if (Ps.empty()) throw shape_error("tie: empty family");
  ClosedClass c;
  auto info = std::make_shared<trees::TieInfo>();
  info->factors = Ps;
  c.tie = info;
  std::vector<ClosedClass> fam = Ps;
  bool bounded = mode == TieMode::finite;
  c.member = [fam, bounded, n](const Word& w) {
    TapeWord t = decode(w);
    if (bounded && mind_changes(t) >= n) return false;
    return con(fam, t);
  };
  nat symbol_bound = 0;
  for (std::size_t i = 0; i < Ps.size(); ++i) {
    // symbols on tape i are bounded by the factor's own alphabet
    nat sb = 1;
    for (std::size_t d = 0; d < 64; ++d) sb = std::max(sb, Ps[i].branch_bound(d));
    for (nat s = 0; s < sb; ++s)
      symbol_bound = std::max(symbol_bound, encode_entry(Entry{static_cast<nat>(i), s}) + 1);
  }
  c.branch_bound = [symbol_bound](std::size_t) { return symbol_bound; };
  std::string mode_str = bounded ? std::to_string(n) : (mode == TieMode::omega ? "omega" : "inf");
  std::string label = "tie " + mode_str + " (";
  for (std::size_t i = 0; i < Ps.size(); ++i) {
    if (i) label += ", ";
    label += Ps[i].label;
  }
  c.label = label + ")";
  return c;
}

bool heart(const ClosedClass& tie_tree, const std::vector<ClosedClass>& Ps,
           std::size_t d, const TapeWord& sigma) {
  if (!tie_tree.member(encode(sigma))) return false;
  for (std::size_t i = 0; i < Ps.size(); ++i) {
    Word pr = proj(i, sigma);
    std::size_t depth = std::max(d, pr.size());
    if (!trees::ext_approx(Ps[i], pr, depth)) return false;
  }
  return true;
}

ClosedClass heart_class(const ClosedClass& tie_tree, std::size_t d) {
  if (!tie_tree.tie)
    throw shape_error("heart: underlying class carries no disjunction factors");
  ClosedClass c;
  ClosedClass base = tie_tree;
  std::vector<ClosedClass> fam = tie_tree.tie->factors;
  c.member = [base, fam, d](const Word& w) { return heart(base, fam, d, decode(w)); };
  c.branch_bound = tie_tree.branch_bound;
  c.tie = tie_tree.tie;
  c.label = "heart " + std::to_string(d) + " (" + tie_tree.label + ")";
  return c;
}

}  // namespace masslab::tape
