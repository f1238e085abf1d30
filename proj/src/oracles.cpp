#include "masslab/oracles.hpp"

#include <algorithm>
#include <set>

#include "masslab/concat.hpp"
#include "masslab/pairing.hpp"
#include "masslab/tape.hpp"

// Reference enumerations: every function below regenerates its word set from
// the defining formula of the operator (grammar-style generation), serving as
// the independent side of the operator/oracle equivalence checks.

namespace masslab::oracles {

namespace {

std::vector<Word> sorted(std::set<Word> s) {
  std::vector<Word> v(s.begin(), s.end());
  std::sort(v.begin(), v.end(), length_lex_less);
  return v;
}

void gen_words(const ClosedClass& P, const Word& cur, std::size_t depth,
               std::set<Word>& out) {
  out.insert(cur);
  if (cur.size() == depth) return;
  nat bound = P.branch_bound(cur.size());
  for (nat j = 0; j < bound; ++j) {
    Word child = cat(cur, j);
    if (P.member(child)) gen_words(P, child, depth, out);
  }
}

}  // namespace

std::vector<Word> words(const ClosedClass& P, std::size_t depth) {
  std::set<Word> s;
  if (P.member({})) gen_words(P, {}, depth, s);
  return sorted(std::move(s));
}

std::vector<Word> layer(const ClosedClass& P, std::size_t depth) {
  std::vector<Word> out;
  for (const Word& w : words(P, depth))
    if (w.size() == depth) out.push_back(w);
  return out;
}

std::vector<Word> leaves(const ClosedClass& P, std::size_t depth) {
  std::vector<Word> out;
  for (const Word& w : words(P, depth)) {
    bool has_child = false;
    for (nat j = 0; j < P.branch_bound(w.size()) && !has_child; ++j)
      has_child = P.member(cat(w, j));
    if (!has_child) out.push_back(w);
  }
  return out;
}

std::vector<Word> product_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d) {
  std::set<Word> s;
  std::size_t lf = (d + 1) / 2, lg = d / 2;
  for (const Word& f : layer(P, lf))
    for (const Word& g : layer(Q, lg)) s.insert(interleave(f, g));
  return sorted(std::move(s));
}

std::vector<Word> coproduct_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d) {
  std::set<Word> s;
  if (d == 0) {
    s.insert({});
    return sorted(std::move(s));
  }
  for (const Word& w : layer(P, d - 1)) s.insert(cat(Word{0}, w));
  for (const Word& w : layer(Q, d - 1)) s.insert(cat(Word{1}, w));
  return sorted(std::move(s));
}

std::vector<Word> union_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d) {
  std::set<Word> s;
  for (const Word& w : layer(P, d)) s.insert(w);
  for (const Word& w : layer(Q, d)) s.insert(w);
  return sorted(std::move(s));
}

std::vector<Word> concat_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d) {
  std::set<Word> s;
  for (const Word& w : layer(P, d)) s.insert(w);
  for (const Word& rho : leaves(P, d))
    for (const Word& t : layer(Q, d - rho.size())) s.insert(cat(rho, t));
  return sorted(std::move(s));
}

std::vector<Word> comm_concat_layer(const ClosedClass& P, const ClosedClass& Q,
                                    std::size_t d) {
  std::set<Word> s;
  std::size_t lf = (d + 1) / 2, lg = d / 2;
  std::set<Word> pq, qp;
  for (const Word& w : concat_layer(P, Q, lf)) pq.insert(w);
  for (const Word& w : concat_layer(Q, P, lg)) qp.insert(w);
  for (const Word& f : pq)
    for (const Word& g : qp) s.insert(interleave(f, g));
  return sorted(std::move(s));
}

std::vector<Word> concat_family_layer(const ClosedClass& P,
                                      const std::vector<ClosedClass>& Qs, std::size_t d) {
  std::set<Word> s;
  for (const Word& w : layer(P, d)) s.insert(w);
  std::vector<Word> ls = leaves(P, d);  // already length-lex sorted
  for (std::size_t n = 0; n < ls.size(); ++n) {
    const ClosedClass& Qn = Qs[n % Qs.size()];
    for (const Word& t : layer(Qn, d - ls[n].size())) s.insert(cat(ls[n], t));
  }
  return sorted(std::move(s));
}

std::vector<Word> derivative_layer(const ClosedClass& P, nat n, std::size_t d) {
  // generate full word sets for P^(k) bottom-up
  std::set<Word> cur;
  for (const Word& w : words(P, d)) cur.insert(w);
  for (nat k = 1; k < n; ++k) {
    std::set<Word> next;
    for (const Word& w : words(P, d)) next.insert(w);
    for (const Word& rho : leaves(P, d))
      for (const Word& t : cur) {
        if (rho.size() + t.size() > d) continue;
        next.insert(cat(rho, t));
      }
    cur = std::move(next);
  }
  std::vector<Word> out;
  for (const Word& w : cur)
    if (w.size() == d) out.push_back(w);
  std::sort(out.begin(), out.end(), length_lex_less);
  return out;
}

std::vector<Word> delayed_layer(const ClosedClass& P, const Word& tau, std::size_t d) {
  // generate by block count from the decomposition grammar
  std::set<Word> s;
  std::vector<Word> lv = leaves(P, d);
  std::function<void(const Word&, std::size_t)> gen = [&](const Word& pre,
                                                          std::size_t blocks) {
    for (const Word& t : words(P, d - pre.size())) s.insert(cat(pre, t));
    if (blocks >= tau.size()) return;
    for (const Word& rho : lv) {
      if (pre.size() + rho.size() > d) continue;
      if (pre.size() + rho.size() < tau[blocks]) continue;
      gen(cat(pre, rho), blocks + 1);
    }
  };
  gen({}, 0);
  std::vector<Word> out;
  for (const Word& w : s)
    if (w.size() == d) out.push_back(w);
  std::sort(out.begin(), out.end(), length_lex_less);
  return out;
}

std::vector<Word> hyperconcat_layer(const ClosedClass& Q, const ClosedClass& P,
                                    std::size_t d) {
  std::set<Word> s;
  std::vector<Word> lv = leaves(P, d);
  std::set<Word> qwords;
  for (const Word& w : words(Q, d)) qwords.insert(w);
  std::function<void(const Word&, const Word&)> gen = [&](const Word& pre, const Word& q) {
    for (const Word& t : words(P, d - pre.size())) s.insert(cat(pre, t));
    for (const Word& rho : lv) {
      if (pre.size() + rho.size() + 1 > d) continue;
      for (nat c = 0; c < concat::max_bound_upto(Q, d); ++c) {
        Word q2 = cat(q, c);
        if (!qwords.count(q2)) continue;
        Word pre2 = cat(cat(pre, rho), c);
        gen(pre2, q2);
      }
    }
  };
  if (Q.member({})) gen({}, {});
  std::vector<Word> out;
  for (const Word& w : s)
    if (w.size() == d) out.push_back(w);
  std::sort(out.begin(), out.end(), length_lex_less);
  return out;
}

std::vector<Word> arrow_layer(const ClosedClass& P, const ClosedClass& Q, nat sharp,
                              std::size_t d) {
  std::set<Word> s;
  for (const Word& w : layer(P, d)) s.insert(w);
  for (const Word& sigma : words(P, d))
    if (sigma.size() + 1 <= d)
      for (const Word& t : layer(Q, d - sigma.size() - 1))
        s.insert(cat(cat(sigma, sharp), t));
  return sorted(std::move(s));
}

std::vector<Word> sqcap_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d) {
  std::set<Word> s;
  for (std::size_t j = 0; j <= d; ++j)
    for (const Word& sigma : layer(P, j))
      for (const Word& t : layer(Q, d - j)) s.insert(cat(sigma, t));
  return sorted(std::move(s));
}

std::vector<Word> tie_layer(const std::vector<ClosedClass>& Ps, bool bounded, nat n,
                            std::size_t d) {
  // enumerate raw (tape,symbol) sequences and keep the consistent ones
  std::vector<nat> symbols;
  for (std::size_t i = 0; i < Ps.size(); ++i) {
    nat b = concat::max_bound_upto(Ps[i], d);
    for (nat v = 0; v < b; ++v)
      symbols.push_back(pair(static_cast<nat>(i), v));
  }
  std::sort(symbols.begin(), symbols.end());
  std::set<Word> out;
  std::function<void(Word&)> gen = [&](Word& cur) {
    // consistency of every prefix, recomputed from scratch
    for (std::size_t pl = 0; pl <= cur.size(); ++pl) {
      for (std::size_t i = 0; i < Ps.size(); ++i) {
        Word pr;
        for (std::size_t k = 0; k < pl; ++k)
          if (unpair_first(cur[k]) == i) pr.push_back(unpair_second(cur[k]));
        if (!Ps[i].member(pr)) return;
      }
    }
    if (bounded) {
      nat mc = 0;
      for (std::size_t k = 0; k + 1 < cur.size(); ++k)
        if (unpair_first(cur[k]) != unpair_first(cur[k + 1])) ++mc;
      if (mc >= n) return;
    }
    if (cur.size() == d) {
      out.insert(cur);
      return;
    }
    for (nat sym : symbols) {
      cur.push_back(sym);
      gen(cur);
      cur.pop_back();
    }
  };
  Word w;
  gen(w);
  return sorted(std::move(out));
}

std::vector<Word> heart_layer(const std::vector<ClosedClass>& Ps, bool bounded, nat n,
                              std::size_t d, std::size_t ext_depth) {
  std::vector<Word> base = tie_layer(Ps, bounded, n, d);
  std::vector<Word> out;
  for (const Word& w : base) {
    bool ok = true;
    for (std::size_t i = 0; i < Ps.size() && ok; ++i) {
      Word pr;
      for (nat sym : w)
        if (unpair_first(sym) == i) pr.push_back(unpair_second(sym));
      std::size_t target = std::max(ext_depth, pr.size());
      bool ext = false;
      for (const Word& cand : layer(Ps[i], target))
        if (is_prefix(pr, cand)) {
          ext = true;
          break;
        }
      ok = ext;
    }
    if (ok) out.push_back(w);
  }
  return out;
}

}  // namespace masslab::oracles
