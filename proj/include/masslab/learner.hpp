#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "masslab/kernel.hpp"
#include "masslab/trees.hpp"
#include "masslab/word.hpp"

namespace masslab::learner {

using kernel::ProgramIndex;
using trees::ClosedClass;

// A total map from observation strings to program indices.
struct Learner {
  std::function<ProgramIndex(const Word&)> guess;
  std::string descriptor;
};

Learner constant_learner(ProgramIndex e, std::string descriptor = "");

struct StageRecord {
  std::size_t stage = 0;           // prefix length
  ProgramIndex guess = 0;
  nat mc_count = 0;                // mind changes up to this stage
  std::size_t output_len = 0;      // |output prefix of Phi_guess(g|stage)|
  bool refuted = false;            // that prefix exits the target tree
};

struct RunTrace {
  std::vector<ProgramIndex> guesses;     // guess(g|n) for n = 0..|g|
  std::vector<std::size_t> mcl;          // {n < |g| : guess(g|n+1) != guess(g|n)}
  std::vector<ProgramIndex> indx;        // distinct predicted indices, first-seen order
  std::vector<StageRecord> stages;
  Word final_output;                     // output prefix of the last guess
  bool refuted = false;
  bool converged = false;                // last change >= K stages before horizon
  std::size_t margin_K = 0;

  nat mind_changes() const { return mcl.size(); }
  ProgramIndex final_guess() const { return guesses.back(); }
};

struct SimulateOptions {
  nat budget = 10'000;
  std::size_t output_len = 16;     // cells probed per stage
  std::size_t margin_K = 2;        // convergence margin
};

RunTrace simulate(const kernel::Machine& m, const Learner& L, const Word& g,
                  const ClosedClass& target, const SimulateOptions& opt = {});

std::string trace_jsonl(const RunTrace& t);

// --- the (alpha,beta|gamma) verifiers ----------------------------------------

enum class Kind {
  one_one,          // (1,1): a single consistent program
  one_bounded_mc,   // (1,<w,b): learner, mind changes <= b, converged+consistent
  one_bounded_indx, // (1,w|<w,b): learner, #indx <= b, converged+consistent
  one_omega,        // (1,w): learner, converged+consistent
  team_programs,    // (<w,1,b): some program in a b-list consistent
  team_learners,    // (<w,w,b): some team member converged+consistent
};

std::string kind_name(Kind k);

using Witness = std::variant<ProgramIndex, Learner, std::vector<ProgramIndex>,
                             std::vector<Learner>>;

struct StreamFailure {
  Word g;
  std::string reason;
};

struct ClassReport {
  Kind kind{};
  nat bound = 0;
  std::size_t checked = 0;
  std::size_t margin_K = 0;  // the convergence margin the verdicts used
  bool pass = false;
  std::vector<StreamFailure> failures;
};

// Checks the class-defining side conditions at finite horizon on every
// sampled stream.  Samples must be members of `source` (shape_error
// otherwise); `bound` is b where the kind uses one.
ClassReport verify_class(const kernel::Machine& m, Kind kind, const Witness& w,
                         const std::vector<Word>& sample, const ClosedClass& source,
                         const ClosedClass& target, nat bound,
                         const SimulateOptions& opt = {});

// --- Popperian probe -----------------------------------------------------------

struct StallReport {
  struct Item {
    Word g;
    bool stall = false;
    std::size_t at_cell = 0;   // first cell whose halting gap reached the horizon
    std::string label() const { return stall ? "stall observed" : "not yet falsified"; }
  };
  std::vector<Item> items;
  bool any_stall = false;
};

// Reports streams where the converged guess's output gains no new symbol for
// `horizon` consecutive budget stages.  Never claims totality itself.
StallReport popperian_probe(const kernel::Machine& m, const Learner& L,
                            const std::vector<Word>& sample, nat horizon,
                            std::size_t cells = 16);

}  // namespace masslab::learner
