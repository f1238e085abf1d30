#include "masslab/concat.hpp"

#include <algorithm>
#include <map>
#include <memory>

#include "masslab/errors.hpp"

namespace masslab::concat {

namespace {

// Shared lazily-extended leaf enumeration of a tree, in length-lex order.
class LeafIndex {
 public:
  explicit LeafIndex(ClosedClass P) : P_(std::move(P)) {}

  // Rank of rho among all leaves (leaves longer than rho come later in
  // length-lex order, so ranking within depth |rho| is global).
  std::optional<std::size_t> rank(const Word& rho) {
    ensure(rho.size());
    auto it = std::lower_bound(leaves_.begin(), leaves_.end(), rho, length_lex_less);
    if (it == leaves_.end() || *it != rho) return std::nullopt;
    return static_cast<std::size_t>(it - leaves_.begin());
  }

  bool is_leaf(const Word& rho) { return trees::is_leaf(P_, rho); }

 private:
  void ensure(std::size_t depth) {
    if (depth < depth_done_) return;
    leaves_ = trees::leaves_upto(P_, depth);
    depth_done_ = depth + 1;
  }

  ClosedClass P_;
  std::vector<Word> leaves_;
  std::size_t depth_done_ = 0;
};

}  // namespace

nat max_bound_upto(const ClosedClass& P, std::size_t d) {
  nat b = 1;
  for (std::size_t j = 0; j <= d; ++j) b = std::max(b, P.branch_bound(j));
  return b;
}

std::optional<std::size_t> LayeredClass::least_layer(const Word& w) const {
  for (std::size_t n = 0; n < layers.size(); ++n)
    if (layers[n].member(w)) return n;
  return std::nullopt;
}

Family cyclic_family(std::vector<ClosedClass> classes) {
  if (classes.empty()) throw shape_error("cyclic_family: empty family");
  return [classes](std::size_t n) { return classes[n % classes.size()]; };
}

Family constant_family(ClosedClass cls) {
  return [cls](std::size_t) { return cls; };
}

ClosedClass concat_op(const ClosedClass& P, const ClosedClass& Q) {
  ClosedClass c;
  c.member = [P, Q](const Word& w) {
    if (P.member(w)) return true;
    for (std::size_t j = 0; j < w.size(); ++j) {
      Word rho = prefix(w, j);
      if (!trees::is_leaf(P, rho)) continue;
      if (Q.member(suffix_from(w, j))) return true;
    }
    return false;
  };
  auto bp = P.branch_bound;
  auto bq = Q.branch_bound;
  c.branch_bound = [bp, bq](std::size_t d) {
    nat b = bp(d);
    for (std::size_t j = 0; j <= d; ++j) b = std::max(b, bq(j));
    return b;
  };
  c.label = "concat(" + P.label + ", " + Q.label + ")";
  return c;
}

ClosedClass comm_concat(const ClosedClass& P, const ClosedClass& Q) {
  ClosedClass c = trees::product(concat_op(P, Q), concat_op(Q, P));
  c.label = "commconcat(" + P.label + ", " + Q.label + ")";
  return c;
}

ClosedClass concat_family(const ClosedClass& P, Family Qs, std::string label) {
  auto idx = std::make_shared<LeafIndex>(P);
  ClosedClass c;
  c.member = [P, Qs, idx](const Word& w) {
    if (P.member(w)) return true;
    for (std::size_t j = 0; j < w.size(); ++j) {
      Word rho = prefix(w, j);
      auto n = idx->rank(rho);
      if (!n) continue;
      if (Qs(*n).member(suffix_from(w, j))) return true;
    }
    return false;
  };
  auto bp = P.branch_bound;
  auto q0 = Qs;
  c.branch_bound = [bp, q0](std::size_t d) {
    nat b = bp(d);
    // suffix bounds over the first few family members; sound for the desk
    // fixtures, whose alphabets agree across the family
    for (std::size_t n = 0; n < 4; ++n) b = std::max(b, max_bound_upto(q0(n), d));
    return b;
  };
  c.label = label.empty() ? "family(" + P.label + ", ...)" : std::move(label);
  return c;
}

ClosedClass recursive_meet(const ClosedClass& base, Family Qs, std::string label) {
  ClosedClass c = concat_family(base, std::move(Qs),
                                label.empty() ? "meet(" + base.label + ", ...)" : label);
  return c;
}

ClosedClass derivative(const ClosedClass& P, nat n) {
  if (n < 1) throw shape_error("derivative: n >= 1 required");
  ClosedClass c = P;
  for (nat i = 1; i < n; ++i) c = concat_op(P, c);
  c.label = "deriv " + std::to_string(n) + " (" + P.label + ")";
  return c;
}

ClosedClass tie_jump(const ClosedClass& base, const ClosedClass& P) {
  ClosedClass c = concat_op(base, P);
  c.label = "jump(" + base.label + ", " + P.label + ")";
  return c;
}

ClosedClass delayed_derivative(const ClosedClass& P, const Word& tau) {
  ClosedClass c;
  Word t = tau;
  c.member = [P, t](const Word& w) {
    // decompose w into complete leaf blocks followed by a T_P remainder;
    // completing block j requires accumulated length >= t(j)
    std::map<std::pair<std::size_t, std::size_t>, bool> memo;
    std::function<bool(std::size_t, std::size_t)> go =
        [&](std::size_t pos, std::size_t blocks) -> bool {
      auto key = std::make_pair(pos, blocks);
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      bool ok = P.member(suffix_from(w, pos));
      if (!ok && blocks < t.size()) {
        for (std::size_t l = 1; pos + l <= w.size(); ++l) {
          Word rho(w.begin() + pos, w.begin() + pos + l);
          if (!trees::is_leaf(P, rho)) continue;
          if (pos + l < t[blocks]) continue;
          if (go(pos + l, blocks + 1)) {
            ok = true;
            break;
          }
        }
      }
      memo[key] = ok;
      return ok;
    };
    return go(0, 0);
  };
  auto bp = P.branch_bound;
  c.branch_bound = [bp, t](std::size_t d) {
    nat b = 1;
    for (std::size_t j = 0; j <= d; ++j) b = std::max(b, bp(j));
    return b;
  };
  c.label = "delayed " + show(tau) + " (" + P.label + ")";
  return c;
}

LayeredClass btie(const ClosedClass& P, std::size_t layer_cap) {
  LayeredClass lc;
  for (std::size_t n = 0; n <= layer_cap; ++n)
    lc.layers.push_back(derivative(P, n + 1));
  lc.label = "btie " + std::to_string(layer_cap) + " (" + P.label + ")";
  return lc;
}

ClosedClass sharp_presentation(Family family, nat base_bound, std::string label) {
  nat sharp = base_bound;
  ClosedClass c;
  c.member = [family, sharp](const Word& w) {
    std::size_t count = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] > sharp) return false;
      if (w[i] == sharp) {
        ++count;
        last = i + 1;
      }
    }
    return family(count).member(suffix_from(w, last));
  };
  c.branch_bound = [sharp](std::size_t) { return sharp + 1; };
  c.label = label.empty() ? "sharp-union" : std::move(label);
  return c;
}

ClosedClass hyperconcat(const ClosedClass& Q, const ClosedClass& P) {
  ClosedClass c;
  c.member = [Q, P](const Word& w) {
    std::map<std::pair<std::size_t, Word>, bool> memo;
    // pos: offset into w; q: branch of T_Q spelled by the separators so far
    std::function<bool(std::size_t, const Word&)> go =
        [&](std::size_t pos, const Word& q) -> bool {
      auto key = std::make_pair(pos, q);
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      bool ok = P.member(suffix_from(w, pos));
      if (!ok) {
        // leftmost-longest: try the longest leaf block first
        for (std::size_t l = w.size() - pos; l >= 1; --l) {
          if (pos + l >= w.size()) continue;  // no room for the separator symbol
          Word rho(w.begin() + pos, w.begin() + pos + l);
          if (!trees::is_leaf(P, rho)) continue;
          Word q2 = cat(q, w[pos + l]);
          if (!Q.member(q2)) continue;
          if (go(pos + l + 1, q2)) {
            ok = true;
            break;
          }
        }
      }
      memo[key] = ok;
      return ok;
    };
    if (!Q.member({})) return false;
    return go(0, {});
  };
  auto bp = P.branch_bound;
  auto bq = Q.branch_bound;
  c.branch_bound = [bp, bq](std::size_t d) {
    nat b = 1;
    for (std::size_t j = 0; j <= d; ++j) b = std::max({b, bp(j), bq(j)});
    return b;
  };
  c.label = "hyper(" + Q.label + ", " + P.label + ")";
  return c;
}

ClosedClass arrow_concat(const ClosedClass& P, const ClosedClass& Q,
                         std::optional<nat> sharp_opt) {
  nat sharp = sharp_opt ? *sharp_opt
                        : std::max(max_bound_upto(P, 63), max_bound_upto(Q, 63));
  ClosedClass c;
  c.member = [P, Q, sharp](const Word& w) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] != sharp) continue;
      return P.member(prefix(w, j)) && Q.member(suffix_from(w, j + 1));
    }
    return P.member(w);
  };
  c.branch_bound = [sharp](std::size_t) { return sharp + 1; };
  c.label = "arrow(" + P.label + ", " + Q.label + ")";
  return c;
}

ClosedClass sqcap_concat(const ClosedClass& P, const ClosedClass& Q) {
  ClosedClass c;
  c.member = [P, Q](const Word& w) {
    for (std::size_t j = 0; j <= w.size(); ++j)
      if (P.member(prefix(w, j)) && Q.member(suffix_from(w, j))) return true;
    return false;
  };
  auto bp = P.branch_bound;
  auto bq = Q.branch_bound;
  c.branch_bound = [bp, bq](std::size_t d) {
    nat b = 1;
    for (std::size_t j = 0; j <= d; ++j) b = std::max({b, bp(j), bq(j)});
    return b;
  };
  c.label = "sqcap(" + P.label + ", " + Q.label + ")";
  return c;
}

}  // namespace masslab::concat
