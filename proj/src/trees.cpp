#include "masslab/trees.hpp"

#include <algorithm>
#include <deque>

#include "masslab/errors.hpp"
#include "masslab/pairing.hpp"

namespace masslab::trees {

Frontier frontier(const ClosedClass& P, std::size_t depth, std::size_t cap) {
  Frontier f;
  f.depth = depth;
  if (!P.member({})) return f;
  std::deque<Word> layer{Word{}};
  std::size_t visited = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    std::deque<Word> next;
    for (const Word& w : layer) {
      nat bound = P.branch_bound(d);
      bool any_child = false;
      for (nat j = 0; j < bound; ++j) {
        Word child = cat(w, j);
        if (!P.member(child)) continue;
        any_child = true;
        if (++visited > cap)
          throw resource_error("frontier: cap of " + std::to_string(cap) +
                               " nodes exceeded under " + P.label);
        next.push_back(std::move(child));
      }
      if (!any_child) f.leaves.push_back(w);
    }
    layer = std::move(next);
  }
  f.members.assign(layer.begin(), layer.end());
  std::sort(f.members.begin(), f.members.end());
  std::sort(f.leaves.begin(), f.leaves.end(), length_lex_less);
  return f;
}

bool ext_approx(const ClosedClass& P, const Word& sigma, std::size_t depth,
                std::size_t cap) {
  if (sigma.size() > depth)
    throw shape_error("ext_approx: |sigma| exceeds the observation depth");
  if (!P.member(sigma)) return false;
  // check that sigma reaches the root through members
  for (std::size_t n = 0; n < sigma.size(); ++n)
    if (!P.member(prefix(sigma, n))) return false;
  // depth-first search for a member extension of length `depth`
  std::size_t visited = 0;
  std::function<bool(const Word&)> dfs = [&](const Word& w) -> bool {
    if (w.size() == depth) return true;
    nat bound = P.branch_bound(w.size());
    for (nat j = 0; j < bound; ++j) {
      Word child = cat(w, j);
      if (!P.member(child)) continue;
      if (++visited > cap) throw resource_error("ext_approx: cap exceeded");
      if (dfs(child)) return true;
    }
    return false;
  };
  return dfs(sigma);
}

bool is_leaf(const ClosedClass& P, const Word& sigma) {
  if (!P.member(sigma)) return false;
  nat bound = P.branch_bound(sigma.size());
  for (nat j = 0; j < bound; ++j)
    if (P.member(cat(sigma, j))) return false;
  return true;
}

std::vector<Word> leaves_upto(const ClosedClass& P, std::size_t depth, std::size_t cap) {
  Frontier f = frontier(P, depth, cap);
  std::vector<Word> out = f.leaves;
  for (const Word& w : f.members)
    if (is_leaf(P, w)) out.push_back(w);
  std::sort(out.begin(), out.end(), length_lex_less);
  return out;
}

// --- basic classes -----------------------------------------------------------

ClosedClass empty_class() {
  ClosedClass c;
  c.member = [](const Word&) { return false; };
  c.branch_bound = [](std::size_t) -> nat { return 0; };
  c.label = "empty";
  return c;
}

ClosedClass full(nat b) {
  ClosedClass c;
  c.member = [b](const Word& w) {
    for (nat s : w)
      if (s >= b) return false;
    return true;
  };
  c.branch_bound = [b](std::size_t) { return b; };
  c.label = "full " + std::to_string(b);
  return c;
}

ClosedClass singleton(const Word& w) {
  if (w.empty()) throw shape_error("singleton: empty period");
  ClosedClass c;
  Word period = w;
  c.member = [period](const Word& sigma) {
    for (std::size_t i = 0; i < sigma.size(); ++i)
      if (sigma[i] != period[i % period.size()]) return false;
    return true;
  };
  nat bound = *std::max_element(w.begin(), w.end()) + 1;
  c.branch_bound = [bound](std::size_t) { return bound; };
  c.label = "singleton " + show(w);
  return c;
}

ClosedClass homogeneous(const std::vector<std::vector<nat>>& factors) {
  if (factors.empty()) throw shape_error("homogeneous: no factors");
  nat bound = 1;
  bool nonempty = true;
  for (const auto& f : factors) {
    if (f.empty()) nonempty = false;
    for (nat s : f) bound = std::max(bound, s + 1);
  }
  std::string label = "homog [";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) label += ",";
    label += "{";
    for (std::size_t j = 0; j < factors[i].size(); ++j) {
      if (j) label += ",";
      label += std::to_string(factors[i][j]);
    }
    label += "}";
  }
  label += "]";
  if (!nonempty) {
    ClosedClass c = empty_class();
    c.label = label;
    return c;
  }
  auto fs = factors;
  return homogeneous_fn(
      [fs](std::size_t x) { return fs[x % fs.size()]; }, bound, label);
}

ClosedClass homogeneous_fn(std::function<std::vector<nat>(std::size_t)> factor_at,
                           nat bound, std::string label) {
  ClosedClass c;
  c.member = [factor_at](const Word& w) {
    for (std::size_t x = 0; x < w.size(); ++x) {
      auto f = factor_at(x);
      if (std::find(f.begin(), f.end(), w[x]) == f.end()) return false;
    }
    return true;
  };
  c.branch_bound = [bound](std::size_t) { return bound; };
  c.label = std::move(label);
  return c;
}

// --- combinators ---------------------------------------------------------------

ClosedClass product(const ClosedClass& P, const ClosedClass& Q) {
  ClosedClass c;
  c.member = [P, Q](const Word& w) {
    auto [f, g] = deinterleave(w);
    return P.member(f) && Q.member(g);
  };
  auto bp = P.branch_bound;
  auto bq = Q.branch_bound;
  c.branch_bound = [bp, bq](std::size_t d) { return d % 2 == 0 ? bp(d / 2) : bq(d / 2); };
  c.label = "oplus(" + P.label + ", " + Q.label + ")";
  return c;
}

ClosedClass coproduct(const ClosedClass& P, const ClosedClass& Q) {
  ClosedClass c;
  c.member = [P, Q](const Word& w) {
    if (w.empty()) return true;
    Word tail = suffix_from(w, 1);
    if (w[0] == 0) return P.member(tail);
    if (w[0] == 1) return Q.member(tail);
    return false;
  };
  auto bp = P.branch_bound;
  auto bq = Q.branch_bound;
  c.branch_bound = [bp, bq](std::size_t d) -> nat {
    if (d == 0) return 2;
    return std::max(bp(d - 1), bq(d - 1));
  };
  c.label = "linf(" + P.label + ", " + Q.label + ")";
  return c;
}

ClosedClass union_class(const ClosedClass& P, const ClosedClass& Q) {
  ClosedClass c;
  c.member = [P, Q](const Word& w) { return P.member(w) || Q.member(w); };
  auto bp = P.branch_bound;
  auto bq = Q.branch_bound;
  c.branch_bound = [bp, bq](std::size_t d) { return std::max(bp(d), bq(d)); };
  c.label = "cup(" + P.label + ", " + Q.label + ")";
  return c;
}

ClosedClass cylinder(const ClosedClass& P, const Word& sigma) {
  ClosedClass c = P;
  Word s = sigma;
  auto inner = P.member;
  c.member = [inner, s](const Word& w) {
    if (!(is_prefix(w, s) || is_prefix(s, w))) return false;
    return inner(w);
  };
  c.label = "cap " + show(sigma) + " (" + P.label + ")";
  return c;
}

ClosedClass shift(const Word& rho, const ClosedClass& P) {
  ClosedClass c;
  Word r = rho;
  c.member = [r, P](const Word& w) {
    if (w.size() <= r.size()) return is_prefix(w, r);
    if (!is_prefix(r, w)) return false;
    return P.member(suffix_from(w, r.size()));
  };
  auto bp = P.branch_bound;
  nat rb = 1;
  for (nat s : rho) rb = std::max(rb, s + 1);
  c.branch_bound = [r, bp, rb](std::size_t d) -> nat {
    if (d < r.size()) return rb;
    return bp(d - r.size());
  };
  c.label = show(rho) + "^(" + P.label + ")";
  return c;
}

// --- DNR -------------------------------------------------------------------------

BudgetSchedule constant_budget(nat s) {
  return [s](std::size_t) { return s; };
}

BudgetSchedule stage_budget() {
  return [](std::size_t len) { return static_cast<nat>(len); };
}

ClosedClass dnr(const kernel::Machine& machine, nat k, nat m, Word oracle,
                BudgetSchedule sched, std::string label) {
  if (k < 2 || m < 1) throw shape_error("dnr: need k >= 2, m >= 1");
  if (k >= 64) throw shape_error("dnr: desk-scale k < 64 required");
  const kernel::Machine* mach = &machine;
  ClosedClass c;
  // diagonal outcomes depend only on (cell, budget); memoize across the many
  // membership probes a frontier enumeration makes
  auto cache = std::make_shared<std::map<std::pair<nat, nat>, std::optional<nat>>>();
  c.member = [mach, k, m, oracle, sched, cache](const Word& w) {
    nat budget = sched(w.size());
    for (std::size_t x = 0; x < w.size(); ++x) {
      if (w[x] >= k) return false;
      auto key = std::make_pair(static_cast<nat>(x), budget);
      auto it = cache->find(key);
      if (it == cache->end()) {
        std::optional<nat> forbidden;
        for (nat e : tuple_decode(x, m)) {
          kernel::Outcome o = mach->phi(e, oracle, x, budget);
          if (o.halted() && o.value < k) {
            // collapse the (at most m) forbidden values into a bitmask
            forbidden = forbidden.value_or(0) | (nat{1} << o.value);
          }
        }
        it = cache->emplace(key, forbidden).first;
      }
      if (it->second && ((*it->second >> w[x]) & 1)) return false;
    }
    return true;
  };
  c.branch_bound = [k](std::size_t) { return k; };
  c.label = label.empty()
                ? "dnr " + std::to_string(k) + (m == 1 ? "" : " " + std::to_string(m))
                : std::move(label);
  return c;
}

}  // namespace masslab::trees
