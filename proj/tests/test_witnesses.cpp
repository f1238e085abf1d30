#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "masslab/concat.hpp"
#include "masslab/fixtures.hpp"
#include "masslab/witness.hpp"

using namespace masslab;
using kernel::ProgramIndex;
using trees::ClosedClass;

namespace {

std::unique_ptr<Fixtures>& fx() {
  static std::unique_ptr<Fixtures> f = make_standard_fixtures();
  return f;
}

std::vector<ProgramIndex> collapse_candidates(nat count) {
  std::vector<ProgramIndex> out;
  for (nat e = 0; e < count; ++e) {
    std::ostringstream s;
    s << "arity 1\n"
      << "  loadi r2 0\n"
      << "  oracle r1 r2\n"
      << "  loadi r3 " << e << "\n"
      << "  sub r4 r1 r3\n"
      << "  jnz r4 bad\n"
      << "  sub r4 r3 r1\n"
      << "  jnz r4 bad\n"
      << "  loadi r0 0\n"
      << "  halt r0\n"
      << "bad:\n"
      << "  loadi r0 1\n"
      << "  halt r0\n";
    out.push_back(fx()->machine().add(s.str()));
  }
  return out;
}

}  // namespace

TEST_CASE("collapse search: host mirror equals the machine dovetail") {
  auto& m = fx()->machine();
  auto programs = collapse_candidates(3);
  std::vector<std::size_t> alive = {0, 1, 2};
  witness::CollapseSetup setup;
  setup.programs = programs;
  setup.factor_approx = [](std::size_t, nat) { return std::vector<nat>{0}; };
  learner::Learner L = witness::homog_collapse_learner(m, setup);
  Word g = {1, 0, 1, 1};
  ProgramIndex delta = L.guess({});  // the first challenge program
  Word out = m.output_prefix(delta, g, 4000, 4);
  REQUIRE(!out.empty());
  auto found = witness::collapse_search(m, programs, alive, g, 0, 100'000);
  REQUIRE(found.has_value());
  kernel::Outcome o =
      m.phi(programs[found->first], prefix(g, found->second), 0, found->second);
  REQUIRE(o.halted());
  CHECK(o.value == out[0]);
}

TEST_CASE("the budgeted probes keep challenge programs budget-monotone") {
  auto& m = fx()->machine();
  witness::CollapseSetup setup;
  setup.programs = collapse_candidates(2);
  setup.factor_approx = [](std::size_t, nat) { return std::vector<nat>{0}; };
  learner::Learner L = witness::homog_collapse_learner(m, setup);
  Word g = {1, 0, 0, 1};
  kernel::ProgramIndex delta = L.guess({});
  bool halted = false;
  kernel::Outcome first;
  for (nat s = 0; s <= 30'000; s += 250) {
    kernel::Outcome o = m.phi(delta, g, 0, s);
    if (halted) {
      CHECK(o.same(first));
    } else if (o.halted()) {
      halted = true;
      first = o;
    }
  }
  CHECK(halted);
}

TEST_CASE("collapse learner: b=1 never changes its mind") {
  auto& m = fx()->machine();
  witness::CollapseSetup setup;
  setup.programs = collapse_candidates(1);
  setup.factor_approx = [](std::size_t, nat) { return std::vector<nat>{0}; };
  learner::Learner L = witness::homog_collapse_learner(m, setup);
  ClosedClass target = trees::homogeneous({{0}});
  Word g = {0, 1, 1, 0, 1, 0, 1, 1, 0, 0};
  learner::SimulateOptions opt;
  opt.budget = 20000;
  opt.output_len = 8;
  auto tr = learner::simulate(m, L, g, target, opt);
  CHECK(tr.mind_changes() == 0);
  CHECK(!tr.refuted);
}

TEST_CASE("collapse learner respects the mind-change bound") {
  auto& m = fx()->machine();
  std::mt19937_64 rng(77);
  for (nat b : {2u, 3u}) {
    witness::CollapseSetup setup;
    setup.programs = collapse_candidates(b);
    setup.factor_approx = [](std::size_t, nat) { return std::vector<nat>{0}; };
    learner::Learner L = witness::homog_collapse_learner(m, setup);
    ClosedClass target = trees::homogeneous({{0}});
    for (int round = 0; round < 25; ++round) {
      Word g(10);
      for (auto& s : g) s = rng() % 2;
      g[0] = rng() % b;
      learner::SimulateOptions opt;
      opt.budget = 20000;
      opt.output_len = 8;
      auto tr = learner::simulate(m, L, g, target, opt);
      CHECK(tr.mind_changes() <= b);
      CHECK(tr.converged);
      CHECK(target.member(tr.final_output));
    }
  }
}

TEST_CASE("dnr square: machine pieces compute the projection formula") {
  auto& m = fx()->machine();
  auto sched = witness::dnr_square_reduction(m, 2, 2);
  // Gamma_v(g; u) = second coordinate of g(z(v,u))
  Word g = {0, 1, 2, 3, 0, 1, 2, 0, 2};
  for (nat v = 0; v < 2; ++v)
    for (nat u = 0; u < 3; ++u) {
      nat z = kernel::diag_pair(v, u);
      kernel::Outcome o = m.run(sched.pieces[v].gamma, g, u, 100'000);
      if (z < g.size()) {
        REQUIRE(o.halted());
        CHECK(o.value == unpair_second(g[z]));
      } else {
        CHECK(o.tag == kernel::Outcome::Tag::oracle_out_of_range);
      }
    }
}

TEST_CASE("dnr square: fallback finds the least falsifier") {
  auto& m = fx()->machine();
  auto sched = witness::dnr_square_reduction(m, 2, 1);
  // craft g with g_1(z(0,0)) = Phi_0(0) = 1: g(1) must decode to (x,1)
  Word g = {0, 1, 0, 0, 0, 0, 0, 0, 0};
  REQUIRE(unpair_second(g[kernel::diag_pair(0, 0)]) == 1);
  kernel::Outcome fb = m.run(sched.pieces[0].fallback, g, 0, 200'000);
  REQUIRE(fb.halted());
  CHECK(fb.value == unpair_first(g[kernel::diag_pair(0, 0)]));
  CHECK(sched.guard_refuted(m, g, 0, 4, 64));
  // with g(1) avoiding second coordinate 1 the guard survives
  Word g2 = g;
  g2[1] = 2;  // decodes to (1,0)
  CHECK(!sched.guard_refuted(m, g2, 0, 4, 64));
}

TEST_CASE("a reduction-piece guesser probes as eventually Popperian") {
  auto& m = fx()->machine();
  auto sched = witness::dnr_square_reduction(m, 2, 1);
  learner::Learner L = learner::constant_learner(sched.pieces[0].gamma, "gamma0-guess");
  // any long DNR_4 member serves as the observation
  trees::ClosedClass dnr4 =
      trees::dnr(m, 4, 1, {}, trees::constant_budget(64));
  Word g;
  for (std::size_t i = 0; i < 12; ++i) {
    for (nat j = 0; j < 4; ++j)
      if (dnr4.member(cat(g, j))) {
        g.push_back(j);
        break;
      }
  }
  REQUIRE(g.size() == 12);
  auto rep = learner::popperian_probe(m, L, {g}, 1000);
  CHECK(!rep.any_stall);  // halts cell by cell until it wants more oracle
}

TEST_CASE("priority: a never-changing team yields no mind-change events") {
  auto& m = fx()->machine();
  trees::ClosedClass spine = fx()->classes.at("spine");
  trees::ClosedClass full2 = fx()->classes.at("full2");
  std::vector<std::vector<learner::Learner>> teams = {{fx()->learners.at("echo_guess")}};
  witness::PriorityOptions opt;
  opt.stages = 6;
  auto res = witness::priority_hat(m, spine, full2, teams, spine, opt);
  CHECK(res.transcript.find("mind-change") == std::string::npos);
  CHECK(res.partition_ok);
}

TEST_CASE("noncup extraction follows a constant-path functional") {
  auto& m = fx()->machine();
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass evens0 = fx()->classes.at("evens0");
  Word g = prefix(fx()->streams.at("full0"), 48);
  witness::NoncupOptions opt;
  opt.depth = 6;
  opt.horizon = 14;
  auto res = witness::noncup_extract(m, kernel::const_index(0), evens0, spine, g, opt);
  CHECK(res.violations.empty());
  CHECK(res.reached_depth);
  CHECK(res.extracted == Word(6, 0));
  // l(sigma) bookkeeping exists for every oracle-side word
  CHECK(res.lengths.size() >= res.E_trees[0].size());
}

TEST_CASE("noncup extraction reports hypothesis violations") {
  auto& m = fx()->machine();
  ClosedClass zeros = fx()->classes.at("zeros");
  ClosedClass spine = fx()->classes.at("spine");
  Word g = prefix(fx()->streams.at("full0"), 48);
  witness::NoncupOptions opt;
  opt.depth = 4;
  opt.horizon = 10;
  // the constant-1 functional leaves zeros immediately
  auto res = witness::noncup_extract(m, kernel::const_index(1), zeros, spine, g, opt);
  CHECK(!res.violations.empty());
}

TEST_CASE("sigma2 union learner tags the least layer") {
  auto& m = fx()->machine();
  std::vector<ClosedClass> layers = {fx()->classes.at("zeros"), fx()->classes.at("evens0"),
                                     fx()->classes.at("full2")};
  learner::Learner L = witness::sigma2_union_learner(m, layers);
  learner::SimulateOptions opt;
  opt.budget = 20000;
  opt.output_len = 10;

  Word inner(10, 0);
  auto t0 = learner::simulate(m, L, inner, layers[2], opt);
  CHECK(t0.mind_changes() == 0);
  CHECK(t0.final_output[0] == 0);

  Word mid = {1, 0, 0, 0, 1, 0, 1, 0, 1, 0};
  auto t1 = learner::simulate(m, L, mid, layers[2], opt);
  CHECK(t1.converged);
  CHECK(t1.final_output[0] == 1);
  CHECK(Word(t1.final_output.begin() + 1, t1.final_output.end()) ==
        prefix(mid, t1.final_output.size() - 1));

  Word outer = {0, 1, 0, 0, 0, 0, 0, 0, 0, 0};
  auto t2 = learner::simulate(m, L, outer, layers[2], opt);
  CHECK(t2.final_output[0] == 2);
}

TEST_CASE("timekeeper: idle opponents leave t_n empty") {
  auto& m = fx()->machine();
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass full2 = fx()->classes.at("full2");
  witness::TimekeeperOptions opt;
  opt.stages = 5;
  opt.strategies = 2;
  auto res = witness::timekeeper_build(m, spine, full2, {fx()->programs.at("loop")}, opt);
  for (const Word& t : res.keeper.t) CHECK(t.empty());
  // hat reduces to grafting plain copies of P
  CHECK(res.hat.member({1, 0, 1, 0}));
}

TEST_CASE("timekeeper: a greedy opponent drives the strategies, replayed by hand") {
  auto& m = fx()->machine();
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass full2 = fx()->classes.at("full2");
  std::vector<ProgramIndex> opponents = {fx()->programs.at("echo")};
  witness::TimekeeperOptions opt;
  opt.stages = 6;
  opt.strategies = 2;
  auto res = witness::timekeeper_build(m, spine, full2, opponents, opt);

  // hand replay of strategy 1 (the only one watching an opponent): echo
  // reproduces its oracle, so its output inside full2 grows below any longer
  // extension until the output-prefix cap; the strategy grafts the least
  // leaf extending the least witness <0> each time
  std::vector<Word> leaves = trees::leaves_upto(spine, opt.leaf_depth);
  Word tau = leaves[1];
  Word expect_t;
  Word leaf_ext;
  for (const Word& lf : leaves)
    if (is_prefix(Word{0}, lf)) {
      leaf_ext = lf;
      break;
    }
  for (nat s = 0; s < opt.stages; ++s) {
    std::size_t base = std::min<std::size_t>(tau.size(), opt.out_cap);
    std::size_t grown = std::min<std::size_t>(tau.size() + 1, opt.out_cap);
    if (grown <= base) break;  // echo's visible output stopped growing
    tau = cat(tau, leaf_ext);
    expect_t.push_back(tau.size() - leaves[1].size());
  }
  CHECK(res.keeper.t[1] == expect_t);
  CHECK(res.tau[1].back() == tau);

  // the delayed derivative along t_n stays inside the plain derivative power
  for (const Word& t : res.keeper.t) {
    auto lhs = trees::frontier(concat::delayed_derivative(spine, t), 7).members;
    auto rhs = trees::frontier(concat::derivative(spine, t.size() + 1), 7).members;
    for (const Word& w : lhs) CHECK(std::binary_search(rhs.begin(), rhs.end(), w));
  }
}

TEST_CASE("priority construction: transcripts deterministic, invariants hold") {
  auto& m = fx()->machine();
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass full2 = fx()->classes.at("full2");
  std::vector<std::vector<learner::Learner>> teams = {
      {fx()->learners.at("echo_guess"), fx()->learners.at("alternating")}};
  witness::PriorityOptions opt;
  opt.stages = 6;
  auto r1 = witness::priority_hat(m, spine, full2, teams, spine, opt);
  auto r2 = witness::priority_hat(m, spine, full2, teams, spine, opt);
  CHECK(r1.transcript == r2.transcript);
  CHECK(r1.partition_ok);
  CHECK(r1.gamma_monotone_ok);
  CHECK(r1.gamma_injective_ok);
  CHECK(r1.tree_ok);
  CHECK(!r1.heights.empty());

  auto re = witness::priority_hat(m, spine, full2, {}, spine, opt);
  CHECK(re.transcript.empty());
}

TEST_CASE("forcing: the echo learner is forced through exactly m changes") {
  auto& m = fx()->machine();
  std::vector<ClosedClass> fam = {fx()->classes.at("fixtureA"), fx()->classes.at("fixtureB")};
  std::vector<Word> streams = {fx()->streams.at("zerosA"), fx()->streams.at("onesB")};
  for (nat target : {1u, 3u, 6u}) {
    witness::ForcingOptions opt;
    opt.target_changes = target;
    auto res = witness::force_mind_changes(m, {fx()->learners.at("echo")}, fam, {}, streams,
                                           opt);
    CHECK(res.achieved);
    CHECK(res.mind_change_counts[0] == target);
    CHECK(res.switches == target);
    CHECK(tape::con(fam, res.g));
  }
}

TEST_CASE("forcing: the stalling learner triggers the AP branch") {
  auto& m = fx()->machine();
  std::vector<ClosedClass> fam = {fx()->classes.at("fixtureA"), fx()->classes.at("fixtureB")};
  std::vector<Word> streams = {fx()->streams.at("zerosA"), fx()->streams.at("onesB")};
  witness::ForcingOptions opt;
  opt.target_changes = 2;
  opt.stage_cap = 50;
  auto res =
      witness::force_mind_changes(m, {fx()->learners.at("stall")}, fam, {}, streams, opt);
  CHECK(res.stalled);
  CHECK(res.switches == 0);
}

TEST_CASE("forcing: invalid shapes are rejected") {
  auto& m = fx()->machine();
  std::vector<ClosedClass> fam = {fx()->classes.at("fixtureA")};
  std::vector<Word> streams = {fx()->streams.at("zerosA")};
  CHECK_THROWS_AS(witness::force_mind_changes(m, {fx()->learners.at("echo")}, fam, {},
                                              streams, {}),
                  shape_error);
}

TEST_CASE("hyper guard: refutation is monotone in the observation") {
  auto& m = fx()->machine();
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass full2 = fx()->classes.at("full2");
  learner::Learner psi = learner::constant_learner(kernel::const_index(0));
  witness::HyperLearnerOptions opt;
  opt.depth_cap = 6;
  opt.guard_enum = 4;
  Word g = prefix(fx()->streams.at("full0"), 32);
  // the constant learner never changes, so the empty rho survives with any m
  CHECK(witness::hyper_guard_holds(m, psi, spine, full2, g, {}, 0, opt));
  // an undecomposable rho fails condition (1)
  CHECK(!witness::hyper_guard_holds(m, psi, spine, full2, g, {1}, 0, opt));
  // verdicts persist as the observation grows: survivors keep surviving and
  // a refuted guard stays refuted
  for (std::size_t n = 8; n <= 32; n += 8) {
    CHECK(witness::hyper_guard_holds(m, psi, spine, full2, prefix(g, n), {}, 0, opt));
    CHECK(!witness::hyper_guard_holds(m, fx()->learners.at("alternating"), spine, full2,
                                      prefix(g, n), {}, 0, opt));
  }
}

TEST_CASE("hyper learner reports exhaustion when every guard falls") {
  auto& m = fx()->machine();
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass full2 = fx()->classes.at("full2");
  auto st = std::make_shared<witness::HyperLearnerState>();
  witness::HyperLearnerOptions opt;
  opt.rho_cap = 4;
  opt.m_cap = 1;
  opt.depth_cap = 4;
  opt.guard_enum = 3;
  // a never-settling guesser refutes the locking condition everywhere
  learner::Learner psi = fx()->learners.at("alternating");
  learner::Learner L = witness::hyperconcat_learner(m, psi, spine, full2, opt, st);
  Word g = prefix(fx()->streams.at("full0"), 16);
  (void)L.guess(g);
  CHECK(st->exhausted);
}

TEST_CASE("hyper learner locks onto a constant correct functional") {
  auto& m = fx()->machine();
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass full2 = fx()->classes.at("full2");
  learner::Learner psi = learner::constant_learner(kernel::const_index(0));
  auto st = std::make_shared<witness::HyperLearnerState>();
  witness::HyperLearnerOptions opt;
  opt.depth_cap = 6;
  opt.guard_enum = 4;
  opt.extract.depth = 8;
  opt.extract.horizon = 12;
  learner::Learner L = witness::hyperconcat_learner(m, psi, spine, full2, opt, st);
  Word g = prefix(fx()->streams.at("full0"), 32);
  learner::SimulateOptions sopt;
  sopt.budget = 3'000'000;
  sopt.output_len = 8;
  auto tr = learner::simulate(m, L, g, spine, sopt);
  CHECK(tr.mind_changes() == 0);  // the first guard already survives
  CHECK(!st->exhausted);
  CHECK(tr.final_output.size() == 8);
  CHECK(spine.member(tr.final_output));
}
