#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "masslab/kernel.hpp"
#include "masslab/learner.hpp"
#include "masslab/trees.hpp"

namespace masslab {

// The named environment the CLI and the check suites run against: a sealed-
// by-convention program registry plus named classes, learners, and streams.
// The machine lives behind a stable pointer; learners capture it.
struct Fixtures {
  Fixtures() : machine_(std::make_unique<kernel::Machine>()) {}
  Fixtures(const Fixtures&) = delete;
  Fixtures& operator=(const Fixtures&) = delete;

  kernel::Machine& machine() const { return *machine_; }

  std::map<std::string, trees::ClosedClass> classes;
  std::map<std::string, learner::Learner> learners;
  std::map<std::string, kernel::ProgramIndex> programs;
  std::map<std::string, Word> streams;
  std::vector<kernel::CorpusEntry> corpus;
  nat default_budget = 10'000;
  trees::ClosedClass base;  // stand-in for the Medvedev-complete base class

 private:
  std::unique_ptr<kernel::Machine> machine_;
};

// The standard environment: a small machine whose diagonal behaviour is rich
// enough to give the DNR classes structure, the spine base class, game
// fixtures, and the named learners.
std::unique_ptr<Fixtures> make_standard_fixtures(nat default_budget = 10'000);

// Extends an environment from fixture-file text: program corpus records plus
// "class NAME = <expr>" lines.
void load_fixture_file(Fixtures& fx, const std::string& text);

// A nonempty binary class with infinitely many leaves: the all-zero path
// survives, and committing to a 1 at position i kills the branch two levels
// later, leaving the leaves 0^i 1 j.
trees::ClosedClass spine_class();

}  // namespace masslab
