#pragma once

#include <vector>

#include "masslab/trees.hpp"
#include "masslab/word.hpp"

namespace masslab::oracles {

using trees::ClosedClass;

// Reference enumerations used by the check suites and tests.  Each function
// rebuilds its answer from the defining formula of the operator, generating
// word sets directly, and never calls the operator implementations.

// All tree words of length <= depth whose every prefix is a member, grouped
// as a sorted flat list.
std::vector<Word> words(const ClosedClass& P, std::size_t depth);
// Only the length-d layer.
std::vector<Word> layer(const ClosedClass& P, std::size_t depth);
// Leaves of length <= depth (member, no member child).
std::vector<Word> leaves(const ClosedClass& P, std::size_t depth);

std::vector<Word> product_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d);
std::vector<Word> coproduct_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d);
std::vector<Word> union_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d);
std::vector<Word> concat_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d);
std::vector<Word> comm_concat_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d);
std::vector<Word> concat_family_layer(const ClosedClass& P,
                                      const std::vector<ClosedClass>& Qs, std::size_t d);
std::vector<Word> derivative_layer(const ClosedClass& P, nat n, std::size_t d);
std::vector<Word> delayed_layer(const ClosedClass& P, const Word& tau, std::size_t d);
std::vector<Word> hyperconcat_layer(const ClosedClass& Q, const ClosedClass& P, std::size_t d);
std::vector<Word> arrow_layer(const ClosedClass& P, const ClosedClass& Q, nat sharp,
                              std::size_t d);
std::vector<Word> sqcap_layer(const ClosedClass& P, const ClosedClass& Q, std::size_t d);

// Two-tape references: encoded tape words of length d.
std::vector<Word> tie_layer(const std::vector<ClosedClass>& Ps, bool bounded, nat n,
                            std::size_t d);
std::vector<Word> heart_layer(const std::vector<ClosedClass>& Ps, bool bounded, nat n,
                              std::size_t d, std::size_t ext_depth);

}  // namespace masslab::oracles
