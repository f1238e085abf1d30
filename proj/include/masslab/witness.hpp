#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "masslab/concat.hpp"
#include "masslab/kernel.hpp"
#include "masslab/learner.hpp"
#include "masslab/tape.hpp"
#include "masslab/trees.hpp"

namespace masslab::witness {

using concat::Timekeeper;
using kernel::ProgramIndex;
using learner::Learner;
using trees::ClosedClass;

// --- homogeneous collapse (challenge learner) ---------------------------------

struct CollapseSetup {
  std::vector<ProgramIndex> programs;  // candidate solvers, positions 0..b-1
  // stagewise shrinking approximation F_{x,s} of the factor F_x
  std::function<std::vector<nat>(std::size_t x, nat stage)> factor_approx;
  nat refute_budget = 20'000;  // budget for evaluating the current guess
};

// Builds the challenge learner: A_0 = {e < b}; the guess on each challenge is
// a machine program dovetailing least-<e,t> over the surviving candidates; a
// refutation F_{x,s}-exit removes the responsible candidate.  The learner
// changes its mind at most b times.
Learner homog_collapse_learner(kernel::Machine& m, const CollapseSetup& setup);

// Host mirror of the dovetail inside the challenge program (exposed for
// cross-checking machine and host agree).
std::optional<std::pair<std::size_t, nat>> collapse_search(
    const kernel::Machine& m, const std::vector<ProgramIndex>& programs,
    const std::vector<std::size_t>& alive, const Word& g, nat x, nat pair_cap);

// --- DNR square reduction ------------------------------------------------------

struct DnrSquarePiece {
  nat v = 0;
  ProgramIndex gamma;     // u |-> g_1(z(v,u))
  ProgramIndex fallback;  // dovetailed Delta_v: g_0(z(v,u_v)) for the least falsifier
};

struct DnrSquareSchedule {
  nat k = 2;
  std::vector<DnrSquarePiece> pieces;  // strictly-along guards theta(g,v)
  std::string kind = "strictly-along-Pi01";

  // theta(g,v) refuted at the desk horizon: some u < u_bound has a halting
  // diagonal that the readable part of g fails to avoid on tape 1.
  bool guard_refuted(const kernel::Machine& m, const Word& g, nat v, nat u_bound,
                     nat budget) const;
  // least piece whose guard is not yet refuted
  std::optional<nat> active_piece(const kernel::Machine& m, const Word& g,
                                  nat u_bound, nat budget) const;
  // output prefix of the active piece's program on g
  Word evaluate(const kernel::Machine& m, const Word& g, nat u_bound, nat budget,
                std::size_t out_cap) const;
};

DnrSquareSchedule dnr_square_reduction(kernel::Machine& m, nat k, nat piece_cap);

// --- noncupping extraction (image-of-tree evaluation) --------------------------

struct NoncupOptions {
  std::size_t rounds = 2;
  std::size_t depth = 8;      // length of the extracted prefix
  std::size_t horizon = 24;   // enumeration depth for oracle-side trees
  std::size_t out_cap = 16;   // image prefix cap per word
  std::size_t tree_cap = 200'000;
};

struct NoncupResult {
  std::vector<std::vector<Word>> E_trees;  // oracle-side trees per round
  std::vector<std::vector<Word>> D_trees;  // image trees per round
  std::vector<std::pair<Word, std::size_t>> lengths;  // l(sigma) bookkeeping
  std::vector<Word> violations;            // image words leaving V_P
  Word extracted;
  bool reached_depth = false;
};

// Runs the D^g/E^g rounds for the functional phi against V_P, V_Q and pulls a
// dead-end-free path prefix out of the union of the image trees.
NoncupResult noncup_extract(const kernel::Machine& m, ProgramIndex phi,
                            const ClosedClass& V_P, const ClosedClass& V_Q,
                            const Word& g, const NoncupOptions& opt = {});

// --- locking-sequence learner over hyperconcatenation --------------------------

struct HyperLearnerOptions {
  nat m_cap = 2;              // separator symbols tried
  std::size_t rho_cap = 64;   // candidate locking prefixes tried (length-lex rank)
  std::size_t depth_cap = 8;  // extendibility horizon
  std::size_t guard_enum = 6; // enumeration depth for guard condition (3)
  NoncupOptions extract;
};

struct HyperLearnerState {
  std::size_t challenges = 0;
  bool exhausted = false;  // no surviving guard within the enumeration cap
};

// The returned learner enumerates (rho, m) pairs, guesses the uniformized
// extraction functional for the surviving pair, and advances whenever the
// Pi01 guard phi(g, rho, m) is refuted.
Learner hyperconcat_learner(kernel::Machine& m, const Learner& psi,
                            const ClosedClass& P, const ClosedClass& Q,
                            const HyperLearnerOptions& opt,
                            std::shared_ptr<HyperLearnerState> state = nullptr);

// Guard refutation, exposed for tests (monotone: once refuted, stays so).
bool hyper_guard_holds(const kernel::Machine& m, const Learner& psi,
                       const ClosedClass& P, const ClosedClass& Q, const Word& g,
                       const Word& rho, nat sep, const HyperLearnerOptions& opt);

// --- Sigma02 union learner -----------------------------------------------------

// Guesses, on f|n, the program g |-> i^g for the least layer i containing
// f|n; converges with the correct tag on members of the union.
Learner sigma2_union_learner(kernel::Machine& m, const std::vector<ClosedClass>& Ps);

// --- timekeeper construction ----------------------------------------------------

struct TimekeeperOptions {
  nat stages = 12;
  std::size_t strategies = 3;   // R_0 .. R_{strategies-1}
  std::size_t leaf_depth = 10;  // search depth for leaves extending a witness
  std::size_t out_cap = 16;
};

struct TimekeeperResult {
  Timekeeper keeper;
  ClosedClass hat;                       // P ^ { P^(t_n) }
  std::vector<std::vector<Word>> tau;    // tau_n[s] histories
  std::string transcript;                // JSON lines
};

// Runs the R_n strategies: strategy n acts when some opponent e < n extends
// its output inside T_Q below tau_n; each action grafts a fresh leaf block
// and stamps the stage into t_n.
TimekeeperResult timekeeper_build(const kernel::Machine& m, const ClosedClass& P,
                                  const ClosedClass& Q,
                                  const std::vector<ProgramIndex>& opponents,
                                  const TimekeeperOptions& opt = {});

// --- priority construction -------------------------------------------------------

struct PriorityOptions {
  nat stages = 10;
  std::size_t out_cap = 12;
  std::size_t cap_nodes = 100'000;
};

struct PriorityResult {
  std::vector<nat> heights;              // h_s
  std::vector<std::size_t> tree_sizes;   // |T_s|
  std::string transcript;                // JSON lines
  bool partition_ok = true;
  bool gamma_monotone_ok = true;
  bool gamma_injective_ok = true;
  bool tree_ok = true;
};

// The stagewise hat construction: builds T_s, active heights h_s, gamma_e
// tables and M_e partitions, processing attention via mind-changes on
// intervals and length-of-agreement inside T_Q.
PriorityResult priority_hat(const kernel::Machine& m, const ClosedClass& P,
                            const ClosedClass& Q,
                            const std::vector<std::vector<Learner>>& teams,
                            const ClosedClass& base, const PriorityOptions& opt = {});

// --- forcing games ----------------------------------------------------------------

struct ForcingOptions {
  nat target_changes = 3;       // m
  nat stage_cap = 4'000;
  nat guess_budget = 256;       // budget for the wait-condition probe
};

struct ForcingResult {
  tape::TapeWord g;
  std::vector<nat> mind_change_counts;  // per learner
  nat switches = 0;
  bool achieved = false;
  bool stalled = false;          // the wait condition never fired (AP branch)
  nat stall_stage = 0;
  std::string transcript;        // JSON lines
};

// Plays the tape-switching adversary against a team of t learners over 2^t
// factor classes: write the current tape's extension stream until some
// learner's program commits to a tape index agreeing with the current
// declaration bit, then flip the committed bits.
ForcingResult force_mind_changes(const kernel::Machine& m,
                                 const std::vector<Learner>& team,
                                 const std::vector<ClosedClass>& Ps,
                                 const tape::TapeWord& rho,
                                 const std::vector<Word>& extension_streams,
                                 const ForcingOptions& opt = {});

}  // namespace masslab::witness
