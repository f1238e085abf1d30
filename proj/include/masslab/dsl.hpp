#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "masslab/concat.hpp"
#include "masslab/trees.hpp"
#include "masslab/word.hpp"

namespace masslab {
struct Fixtures;
}

namespace masslab::dsl {

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

// Abstract syntax for class expressions.  Canonical print is the interchange
// format: parse(print(e)) == e.
struct Expr {
  enum class Op {
    dnr,        // dnr k [m]
    homog,      // homog [{..},{..}]
    singleton,  // singleton <w>
    full,       // full b
    fixture,    // bare identifier
    oplus,      // interleaving product
    linf,       // coproduct
    cup,        // union
    cap,        // cap <w> (e): cylinder restriction
    concat,     // concat(P, Q)
    commconcat,
    family,     // family(P, Q0, Q1, ...): Q's cycle below P's leaves
    meet,       // meet(Q0, ...): recursive meet over the registry base
    deriv,      // deriv n (e)
    delayed,    // delayed <tau> (e)
    btie,       // btie cap (e): layered class
    hyper,      // hyper(Q, P)
    tie,        // tie n|omega|inf (P0, P1, ...)
    arrow,
    sqcap,
    heart,      // heart d (tie ...)
  };
  enum class TieMode { finite, omega, infinity };

  Op op{};
  std::vector<nat> nums;
  Word word;
  std::vector<std::vector<nat>> sets;
  std::string name;
  TieMode tie_mode = TieMode::finite;
  std::vector<ExprPtr> args;
};

bool equal(const Expr& a, const Expr& b);

// Throws parse_error with line:col and the expected-token set.
ExprPtr parse(const std::string& text);

std::string print(const Expr& e);

using Elaborated = std::variant<trees::ClosedClass, concat::LayeredClass>;

// Structural recursion into the tree/disjunction/concatenation modules; the
// provenance label of the result is the canonical print.
Elaborated elaborate(const Expr& e, const Fixtures& env);

// Convenience: parse + elaborate, requiring a plain closed class.
trees::ClosedClass elaborate_class(const std::string& text, const Fixtures& env);

}  // namespace masslab::dsl
