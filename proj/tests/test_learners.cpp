#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "masslab/fixtures.hpp"
#include "masslab/learner.hpp"

using namespace masslab;
using learner::Kind;
using learner::Learner;
using learner::RunTrace;
using trees::ClosedClass;

namespace {

std::unique_ptr<Fixtures>& fx() {
  static std::unique_ptr<Fixtures> f = make_standard_fixtures();
  return f;
}

learner::SimulateOptions opts() {
  learner::SimulateOptions o;
  o.budget = 2'000;
  o.output_len = 8;
  return o;
}

}  // namespace

TEST_CASE("constant learner on a member stream: no changes, consistent") {
  ClosedClass full2 = fx()->classes.at("full2");
  Learner L = learner::constant_learner(fx()->programs.at("echo"));
  Word g = {0, 1, 1, 0, 1, 0, 0, 1};
  RunTrace t = learner::simulate(fx()->machine(), L, g, full2, opts());
  CHECK(t.mind_changes() == 0);
  CHECK(t.converged);
  CHECK(!t.refuted);
  CHECK(t.indx.size() == 1);
  CHECK(t.final_output == g);
}

TEST_CASE("alternating learner shows 2k-1 changes on a length-2k prefix") {
  ClosedClass full2 = fx()->classes.at("full2");
  for (std::size_t k : {1u, 2u, 4u}) {
    Word g(2 * k, 0);
    RunTrace t = learner::simulate(fx()->machine(), fx()->learners.at("alternating"), g,
                                   full2, opts());
    CHECK(t.mind_changes() == 2 * k - 1);
    CHECK(!t.converged);
  }
}

TEST_CASE("mcl and indx match their definitional recomputation") {
  std::mt19937_64 rng(41);
  ClosedClass full2 = fx()->classes.at("full2");
  Learner L;
  L.descriptor = "pseudo-random guesser";
  L.guess = [](const Word& w) {
    nat h = 1469598103934665603ull;
    for (nat s : w) h = (h ^ s) * 1099511628211ull;
    return kernel::const_index(h % 3);
  };
  for (int round = 0; round < 50; ++round) {
    Word g(rng() % 10);
    for (auto& s : g) s = rng() % 2;
    RunTrace t = learner::simulate(fx()->machine(), L, g, full2, opts());
    // definitional mcl
    std::vector<std::size_t> mcl;
    for (std::size_t n = 0; n < g.size(); ++n)
      if (L.guess(prefix(g, n + 1)) != L.guess(prefix(g, n))) mcl.push_back(n);
    CHECK(t.mcl == mcl);
    std::vector<kernel::ProgramIndex> indx;
    for (std::size_t n = 0; n <= g.size(); ++n) {
      auto e = L.guess(prefix(g, n));
      if (std::find(indx.begin(), indx.end(), e) == indx.end()) indx.push_back(e);
    }
    CHECK(t.indx == indx);
  }
}

TEST_CASE("refutation fires when the output leaves the target") {
  ClosedClass zeros = fx()->classes.at("zeros");
  Learner L = learner::constant_learner(kernel::const_index(1));  // outputs 1^w
  Word g = {0, 0, 0};
  RunTrace t = learner::simulate(fx()->machine(), L, g, zeros, opts());
  CHECK(t.refuted);
}

TEST_CASE("verify_class: witness shapes are enforced") {
  ClosedClass full2 = fx()->classes.at("full2");
  std::vector<Word> sample = {{0, 1}, {1, 1}};
  CHECK_THROWS_AS(learner::verify_class(fx()->machine(), Kind::one_one,
                                        fx()->learners.at("alternating"), sample, full2,
                                        full2, 0, opts()),
                  shape_error);
  // samples outside the source are rejected
  std::vector<Word> bad = {{7}};
  CHECK_THROWS_AS(learner::verify_class(fx()->machine(), Kind::one_one,
                                        fx()->programs.at("echo"), bad, full2, full2, 0,
                                        opts()),
                  shape_error);
}

TEST_CASE("verify_class kinds behave on the echo witness") {
  ClosedClass full2 = fx()->classes.at("full2");
  std::mt19937_64 rng(2);
  std::vector<Word> sample;
  for (int i = 0; i < 20; ++i) {
    Word g(8);
    for (auto& s : g) s = rng() % 2;
    sample.push_back(g);
  }
  auto& m = fx()->machine();
  auto one = learner::verify_class(m, Kind::one_one, fx()->programs.at("echo"), sample,
                                   full2, full2, 0, opts());
  CHECK(one.pass);
  auto team = learner::verify_class(
      m, Kind::team_programs,
      std::vector<kernel::ProgramIndex>{fx()->programs.at("loop"), fx()->programs.at("echo")},
      sample, full2, full2, 2, opts());
  CHECK(team.pass);
  auto wrong = learner::verify_class(
      m, Kind::team_programs,
      std::vector<kernel::ProgramIndex>{kernel::const_index(7)}, sample, full2, full2, 1,
      opts());
  CHECK(!wrong.pass);  // output 7^w leaves the binary tree immediately
  // a diverging witness is vacuously unrefuted at finite horizon; the
  // popperian probe is the tool that flags it
  auto lonely = learner::verify_class(
      m, Kind::team_programs, std::vector<kernel::ProgramIndex>{fx()->programs.at("loop")},
      sample, full2, full2, 1, opts());
  CHECK(lonely.pass);

  // bounded mind-change kind fails on the alternating learner
  auto alt = learner::verify_class(m, Kind::one_bounded_mc, fx()->learners.at("alternating"),
                                   sample, full2, full2, 3, opts());
  CHECK(!alt.pass);
}

TEST_CASE("verdicts are monotone in budget for refutation-based checks") {
  ClosedClass zeros = fx()->classes.at("zeros");
  std::vector<Word> sample = {{0, 0, 0, 0, 0, 0}};
  auto& m = fx()->machine();
  learner::SimulateOptions lo = opts(), hi = opts();
  lo.budget = 40;
  hi.budget = 4000;
  auto wit = fx()->programs.at("slow10_const0");
  auto rlo = learner::verify_class(m, Kind::one_one, wit, sample, zeros, zeros, 0, lo);
  auto rhi = learner::verify_class(m, Kind::one_one, wit, sample, zeros, zeros, 0, hi);
  CHECK(rlo.pass);
  CHECK(rhi.pass);  // a pass never degrades as the budget grows
}

TEST_CASE("popperian probe distinguishes total from stalling guesses") {
  auto& m = fx()->machine();
  std::vector<Word> sample = {{0, 1, 0, 1, 0, 1, 0, 1, 0, 1}};
  auto ok = learner::popperian_probe(m, fx()->learners.at("echo_guess"), sample, 500);
  CHECK(!ok.any_stall);
  auto bad = learner::popperian_probe(m, fx()->learners.at("stall"), sample, 500);
  CHECK(bad.any_stall);
  CHECK(bad.items[0].at_cell == 0);
}

TEST_CASE("trace export is one JSON object per stage") {
  ClosedClass full2 = fx()->classes.at("full2");
  Word g = {0, 1, 0};
  RunTrace t = learner::simulate(fx()->machine(), fx()->learners.at("echo_guess"), g, full2,
                                 opts());
  std::string jsonl = learner::trace_jsonl(t);
  std::size_t lines = std::count(jsonl.begin(), jsonl.end(), '\n');
  CHECK(lines == g.size() + 1);
  CHECK(jsonl.find("\"stage\"") != std::string::npos);
  CHECK(jsonl.find("\"verdict\"") != std::string::npos);
}
