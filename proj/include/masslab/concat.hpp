#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "masslab/trees.hpp"
#include "masslab/word.hpp"

namespace masslab::concat {

using trees::ClosedClass;

// A class given as an increasing union of closed layers (layer n of btie(P)
// is the (n+1)-fold concatenation power of P).
struct LayeredClass {
  std::vector<ClosedClass> layers;
  std::string label;
  std::optional<std::size_t> least_layer(const Word& w) const;
};

// Stage strings produced by c.e. enumerations: t_n(i) is the stage at which
// the i-th element entered V_n, so each t_n is nondecreasing.
struct Timekeeper {
  std::vector<Word> t;
  std::string provenance;
};

// Families are total maps n -> class so infinitary operations stay lazy.
using Family = std::function<ClosedClass(std::size_t)>;
Family cyclic_family(std::vector<ClosedClass> classes);
Family constant_family(ClosedClass cls);

// P ^ Q: P together with a copy of Q grafted below every leaf of T_P.
ClosedClass concat_op(const ClosedClass& P, const ClosedClass& Q);

// P join Q = (P^Q) lsup (Q^P).
ClosedClass comm_concat(const ClosedClass& P, const ClosedClass& Q);

// P ^ {Q_n}: Q_n grafted below the length-lexicographically n-th leaf.
ClosedClass concat_family(const ClosedClass& P, Family Qs, std::string label = "");

// Recursive meet: base ^ {Q_n} where base stands in for a Medvedev-complete
// class.  The base must have leaves for the meet to route anything.
ClosedClass recursive_meet(const ClosedClass& base, Family Qs, std::string label = "");

// Finite iterate P^(n):  P^(1) = P, P^(n+1) = P ^ P^(n).
ClosedClass derivative(const ClosedClass& P, nat n);

// base ^ P, the derived-class jump.
ClosedClass tie_jump(const ClosedClass& base, const ClosedClass& P);

// The tau-delayed (|tau|+1)-derivative: grafting below a leaf is allowed only
// once the accumulated word is at least tau(i) long.
ClosedClass delayed_derivative(const ClosedClass& P, const Word& tau);

// The straight-line layered disjunction of P: layers P^(1),...,P^(cap+1).
LayeredClass btie(const ClosedClass& P, std::size_t layer_cap);

// The sharp-separated presentation of an increasing union: a word with n
// sharps is alive iff its tail after the last sharp lies in T_{family(n)}.
// The sharp symbol is `base_bound` itself.
ClosedClass sharp_presentation(Family family, nat base_bound, std::string label = "");

// Q diamond P: blocks of P-leaves separated by symbols spelling a branch of
// T_Q, with a trailing T_P remainder.  Ambiguous block boundaries are
// resolved leftmost-longest with backtracking.
ClosedClass hyperconcat(const ClosedClass& Q, const ClosedClass& P);

// P -> Q: members are sigma ^ <#> ^ tau with sigma in T_P, tau in T_Q.
// The separator is `sharp` (default: one past both alphabets).
ClosedClass arrow_concat(const ClosedClass& P, const ClosedClass& Q,
                         std::optional<nat> sharp = std::nullopt);

// P sqcap Q: all-splits concatenation {sigma ^ tau}.
ClosedClass sqcap_concat(const ClosedClass& P, const ClosedClass& Q);

// Largest branch bound over depths <= d (helper shared with oracles).
nat max_bound_upto(const ClosedClass& P, std::size_t d);

}  // namespace masslab::concat
