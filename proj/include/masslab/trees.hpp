#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "masslab/kernel.hpp"
#include "masslab/word.hpp"

namespace masslab::trees {

struct TieInfo;

// The depth-observable part of a Pi01 class: a total, downward-closed
// decision procedure on words plus a per-depth branching bound.  Decision
// procedures are pure; classes are cheap to copy (functions share state).
struct ClosedClass {
  std::function<bool(const Word&)> member;
  std::function<nat(std::size_t depth)> branch_bound;
  std::string label;
  // Present only on trees built by the two-tape disjunction operators;
  // carries the factor classes, which the heart predicate needs.
  std::shared_ptr<const TieInfo> tie;

  bool contains(const Word& w) const { return member(w); }
};

struct TieInfo {
  std::vector<ClosedClass> factors;
};

struct Frontier {
  std::size_t depth = 0;
  std::vector<Word> members;  // all members of length == depth, length-lex order
  std::vector<Word> leaves;   // members of length < depth with no member successor
};

inline constexpr std::size_t kDefaultFrontierCap = 2'000'000;

// Exhaustive BFS to `depth` through members only.  Throws resource_error if
// more than `cap` tree nodes are visited.
Frontier frontier(const ClosedClass& P, std::size_t depth,
                  std::size_t cap = kDefaultFrontierCap);

// Depth-d proxy for sigma in T^ext: some member of length d extends sigma.
bool ext_approx(const ClosedClass& P, const Word& sigma, std::size_t depth,
                std::size_t cap = kDefaultFrontierCap);

// All leaves of length <= depth, length-lex order.
std::vector<Word> leaves_upto(const ClosedClass& P, std::size_t depth,
                              std::size_t cap = kDefaultFrontierCap);

bool is_leaf(const ClosedClass& P, const Word& sigma);

// --- basic classes -----------------------------------------------------------

ClosedClass empty_class();
ClosedClass full(nat b);                 // all words over {0..b-1}
ClosedClass singleton(const Word& w);    // the single path w^omega (w nonempty)

// member(sigma) iff sigma(x) in F_{x mod |factors|}; factors repeat
// cyclically.  An empty factor set anywhere makes the class empty.
ClosedClass homogeneous(const std::vector<std::vector<nat>>& factors);
ClosedClass homogeneous_fn(std::function<std::vector<nat>(std::size_t)> factor_at,
                           nat bound, std::string label);

// --- combinators ---------------------------------------------------------------

// P lsup Q = {f + g : f in P, g in Q} via interleaving.
ClosedClass product(const ClosedClass& P, const ClosedClass& Q);
// P linf Q = (<0>^P) u (<1>^Q); the root is always a node.
ClosedClass coproduct(const ClosedClass& P, const ClosedClass& Q);
// One-tape classical disjunction P u Q.
ClosedClass union_class(const ClosedClass& P, const ClosedClass& Q);
// P cap [sigma].
ClosedClass cylinder(const ClosedClass& P, const Word& sigma);
// rho ^ P.
ClosedClass shift(const Word& rho, const ClosedClass& P);

// --- diagonally noncomputable classes -------------------------------------------

// Budget used by words of a given length; must be nondecreasing so the tree
// stays downward closed.
using BudgetSchedule = std::function<nat(std::size_t len)>;
BudgetSchedule constant_budget(nat s);
BudgetSchedule stage_budget();  // budget = word length (the step-|sigma| convention)

// member(sigma) iff for every m-tuple code x < |sigma|: sigma(x) < k and
// sigma(x) differs from every halting Phi_{e_i}(oracle; x), i < m, within the
// schedule's budget at |sigma|.  m = 1 with empty oracle gives DNR_k.
ClosedClass dnr(const kernel::Machine& machine, nat k, nat m, Word oracle,
                BudgetSchedule sched, std::string label = "");

}  // namespace masslab::trees
