#pragma once

#include <string>

#include "masslab/learner.hpp"
#include "masslab/trees.hpp"

namespace masslab::exporter {

// Frontier as a JSON document: sorted member list plus leaves.
std::string frontier_json(const trees::ClosedClass& cls, const trees::Frontier& f);

// Tree rendering down to the frontier depth.  Nodes of disjunction trees are
// colored by the tape of their last declaration.
std::string frontier_dot(const trees::ClosedClass& cls, const trees::Frontier& f);

}  // namespace masslab::exporter
