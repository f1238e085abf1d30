#include "masslab/checks.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "masslab/concat.hpp"
#include "masslab/dsl.hpp"
#include "masslab/errors.hpp"
#include "masslab/export.hpp"
#include "masslab/oracles.hpp"
#include "masslab/tape.hpp"
#include "masslab/witness.hpp"

namespace masslab::checks {

namespace {

using kernel::Outcome;
using kernel::ProgramIndex;
using trees::ClosedClass;

struct Ctx {
  Fixtures& fx;
  std::mt19937_64 rng;
  std::ostringstream log;
  bool ok = true;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (log.str().size() < 4000) log << what << "; ";
    }
  }
};

CheckResult timed(const std::string& name, Fixtures& fx, nat seed,
                  const std::function<void(Ctx&)>& body) {
  Ctx ctx{fx, std::mt19937_64(seed), {}, true};
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(ctx);
  } catch (const std::exception& e) {
    ctx.ok = false;
    ctx.log << "exception: " << e.what();
  }
  auto t1 = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = name;
  r.pass = ctx.ok;
  r.seconds = std::chrono::duration<double>(t1 - t0).count();
  r.detail = ctx.log.str();
  return r;
}

Word random_word(std::mt19937_64& rng, std::size_t len, nat bound) {
  Word w(len);
  for (auto& s : w) s = rng() % bound;
  return w;
}

// Random member stream of a class, built by depth-first extension.
Word random_member(std::mt19937_64& rng, const ClosedClass& c, std::size_t len) {
  Word w;
  for (std::size_t i = 0; i < len; ++i) {
    nat bound = c.branch_bound(i);
    std::vector<nat> opts;
    for (nat j = 0; j < bound; ++j)
      if (c.member(cat(w, j))) opts.push_back(j);
    if (opts.empty()) break;
    w.push_back(opts[rng() % opts.size()]);
  }
  return w;
}

std::vector<Word> members_sorted(const trees::Frontier& f) { return f.members; }

bool same_words(const std::vector<Word>& a, const std::vector<Word>& b) { return a == b; }

// ---------------------------------------------------------------------------
// 1. kernel laws
// ---------------------------------------------------------------------------

void check_kernel(Ctx& c) {
  kernel::Machine& m = c.fx.machine();
  std::vector<ProgramIndex> pool;
  for (const auto& [name, idx] : c.fx.programs) pool.push_back(idx);
  for (nat k = 0; k < 6; ++k) pool.push_back(kernel::const_index(k));
  std::vector<Word> oracles = {{}, {3, 1, 4}, {0, 0, 0, 0, 0, 0}, {1, 2}};

  // budget monotonicity and oracle locality
  for (ProgramIndex e : pool) {
    for (const Word& o : oracles) {
      for (nat input = 0; input < 3; ++input) {
        Outcome prev;
        bool halted_seen = false;
        Outcome at_halt;
        for (nat s = 0; s <= 40; ++s) {
          Outcome r = m.phi(e, o, input, s);
          if (halted_seen)
            c.require(r.same(at_halt), "budget monotonicity broken at " + std::to_string(e));
          if (r.halted() && !halted_seen) {
            halted_seen = true;
            at_halt = r;
            Outcome big = m.phi(e, o, input, 100000);
            c.require(big.same(r), "halt changed at large budget");
            Word padded = o;
            padded.insert(padded.end(), {9, 9, 9, 9});
            Outcome pad = m.phi(e, padded, input, 100000);
            c.require(pad.same(r), "oracle locality broken (padding changed a halt)");
          }
          prev = r;
        }
        (void)prev;
      }
    }
  }

  // Godel and assembler round-trips on the fixture corpus
  for (const auto& entry : c.fx.corpus) {
    kernel::Program p = entry.program;
    c.require(kernel::godel_parse_hex(kernel::godel_hex(p)) == p,
              "godel round-trip failed for " + entry.name);
    c.require(kernel::assemble(kernel::disassemble(p)) == p,
              "assembler round-trip failed for " + entry.name);
  }
  std::string corpus_text = kernel::write_corpus(c.fx.corpus);
  auto parsed = kernel::parse_corpus(corpus_text);
  c.require(parsed.size() == c.fx.corpus.size(), "corpus round-trip lost records");

  // recursion theorem on the fixture builders
  for (const char* bname : {"identity_builder", "to_const42", "to_const_self"}) {
    ProgramIndex b = c.fx.programs.at(bname);
    ProgramIndex n = m.fixpoint(b, 10'000);
    Outcome target = m.phi(b, {}, n, 10'000);
    c.require(target.halted(), std::string("builder diverged: ") + bname);
    Word base = {0, 1, 1, 0, 1, 0, 0, 1, 1, 1};
    for (std::size_t ol = 0; ol < 10; ++ol) {
      for (nat x = 0; x < 10; ++x) {
        Outcome lhs = m.phi(n, prefix(base, ol), x, 10'000);
        Outcome rhs = m.phi(target.value, prefix(base, ol), x, 10'000);
        c.require(lhs.same(rhs), std::string("fixpoint law failed for ") + bname);
      }
    }
  }
  // the quine builder: the fixpoint reproduces its own index
  {
    ProgramIndex n = m.fixpoint(c.fx.programs.at("to_const_self"), 10'000);
    Outcome r = m.run(n, {}, 0, 100'000);
    c.require(r.halted() && r.value == n, "quine fixpoint did not output its own index");
  }

  // diagonal pairing: z identity on >= 50 halting pairs, injectivity on 100
  std::vector<ProgramIndex> halting;
  for (nat k = 0; k < 8; ++k) halting.push_back(kernel::const_index(k));
  halting.push_back(c.fx.programs.at("const1_fast"));
  halting.push_back(c.fx.programs.at("slow10_const0"));
  std::size_t checked = 0;
  for (ProgramIndex v : halting)
    for (ProgramIndex u : halting) {
      if (checked >= 60) break;
      ProgramIndex z = kernel::diag_pair(v, u);
      Outcome fv = m.phi(v, {}, v, 10'000);
      Outcome fu = m.phi(u, {}, u, 10'000);
      if (!fv.halted() || !fu.halted()) continue;
      Outcome r = m.run(z, {}, z, 100'000);
      c.require(r.halted() && r.value == pair(fv.value, fu.value),
                "diagonal identity failed at z(" + std::to_string(v) + "," +
                    std::to_string(u) + ")");
      ++checked;
    }
  c.require(checked >= 50, "too few halting diagonal pairs sampled");
  std::set<ProgramIndex> zs;
  std::set<std::pair<ProgramIndex, ProgramIndex>> seen;
  while (seen.size() < 100) {
    ProgramIndex v = c.rng() % 64, u = c.rng() % 64;
    if (!seen.insert({v, u}).second) continue;
    zs.insert(kernel::diag_pair(v, u));
  }
  c.require(zs.size() == 100, "diagonal pairing not injective on sampled pairs");

  // divergence propagates through z
  ProgramIndex zl = kernel::diag_pair(c.fx.programs.at("loop"), c.fx.programs.at("loop"));
  for (nat s : {10u, 1000u, 20000u})
    c.require(!m.run(zl, {}, zl, s).halted(), "divergence did not propagate through z");
}

// ---------------------------------------------------------------------------
// 2. operator/oracle equivalence
// ---------------------------------------------------------------------------

void check_operators(Ctx& c) {
  Fixtures& fx = c.fx;
  ClosedClass spine = fx.classes.at("spine");
  ClosedClass full2 = fx.classes.at("full2");
  ClosedClass evens0 = fx.classes.at("evens0");
  ClosedClass headone = fx.classes.at("headone");
  ClosedClass alt01 = fx.classes.at("alt01");
  ClosedClass zeros = fx.classes.at("zeros");

  std::vector<std::pair<ClosedClass, ClosedClass>> pairs = {
      {spine, full2}, {evens0, headone}, {full2, alt01}, {spine, evens0}};

  const std::size_t d = 8;
  std::size_t nonempty = 0;
  for (const auto& [P, Q] : pairs) {
    auto cmp = [&](const ClosedClass& impl, const std::vector<Word>& oracle,
                   const std::string& tag) {
      auto got = members_sorted(trees::frontier(impl, d));
      c.require(same_words(got, oracle),
                tag + " mismatch on (" + P.label + ", " + Q.label + ")");
      if (!got.empty()) ++nonempty;
    };
    cmp(trees::product(P, Q), oracles::product_layer(P, Q, d), "product");
    cmp(trees::coproduct(P, Q), oracles::coproduct_layer(P, Q, d), "coproduct");
    cmp(trees::union_class(P, Q), oracles::union_layer(P, Q, d), "union");
    cmp(concat::concat_op(P, Q), oracles::concat_layer(P, Q, d), "concat");
    cmp(concat::comm_concat(P, Q), oracles::comm_concat_layer(P, Q, d), "comm_concat");
    std::vector<ClosedClass> fam = {Q, zeros};
    cmp(concat::concat_family(P, concat::cyclic_family(fam)),
        oracles::concat_family_layer(P, fam, d), "concat_family");
    for (nat n : {2u, 3u})
      cmp(concat::derivative(P, n), oracles::derivative_layer(P, n, d),
          "derivative " + std::to_string(n));
    for (const Word& tau : {Word{2, 0}, Word{3}})
      cmp(concat::delayed_derivative(P, tau), oracles::delayed_layer(P, tau, d),
          "delayed " + show(tau));
    cmp(concat::sqcap_concat(P, Q), oracles::sqcap_layer(P, Q, d), "sqcap");
    {
      nat sharp = std::max(concat::max_bound_upto(P, 63), concat::max_bound_upto(Q, 63));
      cmp(concat::arrow_concat(P, Q), oracles::arrow_layer(P, Q, sharp, d), "arrow");
    }
  }
  c.require(nonempty >= pairs.size() * 8, "too many operator frontiers came out empty");

  // hyperconcatenation at depth 10
  for (const auto& [Q, P] : std::vector<std::pair<ClosedClass, ClosedClass>>{
           {full2, spine}, {alt01, spine}, {spine, spine}}) {
    auto got = members_sorted(trees::frontier(concat::hyperconcat(Q, P), 10));
    c.require(same_words(got, oracles::hyperconcat_layer(Q, P, 10)),
              "hyperconcat mismatch on (" + Q.label + ", " + P.label + ")");
  }

  // two-tape disjunctions at depth 6
  std::vector<ClosedClass> fam2 = {evens0, headone};
  for (nat n : {1u, 2u, 3u}) {
    auto got = members_sorted(trees::frontier(tape::tie(tape::TieMode::finite, n, fam2), 6));
    c.require(same_words(got, oracles::tie_layer(fam2, true, n, 6)),
              "tie " + std::to_string(n) + " mismatch");
  }
  {
    auto got = members_sorted(trees::frontier(tape::tie(tape::TieMode::infinity, 0, fam2), 6));
    c.require(same_words(got, oracles::tie_layer(fam2, false, 0, 6)), "tie inf mismatch");
  }
  {
    ClosedClass t2 = tape::tie(tape::TieMode::finite, 2, fam2);
    ClosedClass h = tape::heart_class(t2, 8);
    auto got = members_sorted(trees::frontier(h, 6));
    c.require(same_words(got, oracles::heart_layer(fam2, true, 2, 6, 8)), "heart mismatch");
  }

  // DNR approximations against plain re-evaluation of the defining condition
  kernel::Machine& m = fx.machine();
  for (std::size_t depth : {3u, 5u}) {
    ClosedClass dn = trees::dnr(m, 2, 1, {}, trees::constant_budget(depth));
    auto got = members_sorted(trees::frontier(dn, depth));
    std::vector<Word> expect;
    std::function<void(Word&)> gen = [&](Word& w) {
      if (w.size() == depth) {
        expect.push_back(w);
        return;
      }
      for (nat j = 0; j < 2; ++j) {
        bool ok = true;
        Outcome o = m.phi(w.size(), {}, w.size(), depth);
        if (o.halted() && o.value == j) ok = false;
        if (!ok) continue;
        w.push_back(j);
        gen(w);
        w.pop_back();
      }
    };
    Word w;
    gen(w);
    c.require(same_words(got, expect), "dnr mismatch at depth " + std::to_string(depth));
  }
}

// ---------------------------------------------------------------------------
// 3. definitional identities
// ---------------------------------------------------------------------------

void check_identities(Ctx& c) {
  // write/proj adjunction and the partition identity
  for (int round = 0; round < 200; ++round) {
    Word sigma = random_word(c.rng, c.rng() % 10, 4);
    nat i = c.rng() % 3;
    tape::TapeWord t = tape::write(i, sigma);
    c.require(tape::proj(i, t) == sigma, "proj(i, write(i,s)) != s");
    c.require(tape::proj(i + 1, t).empty(), "proj(j, write(i,s)) nonempty");
    c.require(t.size() == sigma.size(), "write changed the length");
  }
  for (int round = 0; round < 200; ++round) {
    tape::TapeWord t;
    std::size_t len = c.rng() % 12;
    for (std::size_t k = 0; k < len; ++k)
      t.push_back(tape::Entry{c.rng() % 3, c.rng() % 3});
    std::size_t total = 0;
    for (nat i = 0; i < 3; ++i) total += tape::proj(i, t).size();
    c.require(total == t.size(), "projection lengths do not partition |sigma|");
    nat mc = 0;
    for (std::size_t n = 0; n + 1 < t.size(); ++n)
      if (t[n].tape != t[n + 1].tape) ++mc;
    c.require(mc == tape::mind_changes(t), "mc formula mismatch");
  }

  // delayed derivative with zero delays equals the plain derivative
  ClosedClass spine = c.fx.classes.at("spine");
  ClosedClass evens0 = c.fx.classes.at("evens0");
  for (const ClosedClass& P : {spine, evens0}) {
    for (std::size_t tlen : {1u, 2u}) {
      Word tau(tlen, 0);
      auto lhs = trees::frontier(concat::delayed_derivative(P, tau), 8).members;
      auto rhs = trees::frontier(concat::derivative(P, tlen + 1), 8).members;
      c.require(lhs == rhs, "P^(0-vector) != P^(|tau|+1) on " + P.label);
    }
  }

  // tie_n monotone in n at every depth <= 8
  std::vector<ClosedClass> fam = {c.fx.classes.at("evens0"), c.fx.classes.at("headone")};
  for (std::size_t d = 0; d <= 8; ++d) {
    std::vector<std::vector<Word>> layers;
    for (nat n : {1u, 2u, 3u, 4u})
      layers.push_back(trees::frontier(tape::tie(tape::TieMode::finite, n, fam), d).members);
    auto inf_layer = trees::frontier(tape::tie(tape::TieMode::infinity, 0, fam), d).members;
    for (std::size_t k = 0; k + 1 < layers.size(); ++k)
      for (const Word& w : layers[k])
        c.require(std::binary_search(layers[k + 1].begin(), layers[k + 1].end(), w),
                  "tie monotonicity in n failed");
    for (const Word& w : layers.back())
      c.require(std::binary_search(inf_layer.begin(), inf_layer.end(), w),
                "tie_n not inside tie_inf");
    // every tie_inf member satisfies Con by construction: re-check directly
    for (const Word& w : inf_layer)
      c.require(tape::con(fam, tape::decode(w)), "tie_inf member violates Con");
  }

  // heart members are extendible in the tie tree (Def. 1 remark)
  {
    ClosedClass t2 = tape::tie(tape::TieMode::finite, 2, fam);
    for (std::size_t d = 0; d <= 5; ++d) {
      auto hearts = trees::frontier(tape::heart_class(t2, 6), d).members;
      for (const Word& w : hearts)
        c.require(trees::ext_approx(t2, w, 6), "heart member not extendible at depth 6");
    }
  }

  // downward closure: 10^4 random (word, extension) samples per class
  for (const auto& [name, cls] : c.fx.classes) {
    bool broken = false;
    for (int round = 0; round < 10'000 && !broken; ++round) {
      Word w = random_word(c.rng, c.rng() % 8, 4);
      if (cls.member(w)) {
        for (std::size_t l = 0; l <= w.size(); ++l)
          if (!cls.member(prefix(w, l))) broken = true;
      } else {
        Word ext = cat(w, c.rng() % 4);
        if (cls.member(ext)) broken = true;
      }
    }
    c.require(!broken, "downward closure broken in " + name);
  }
}

// ---------------------------------------------------------------------------
// 4. homogeneous collapse
// ---------------------------------------------------------------------------

void check_collapse(Ctx& c) {
  kernel::Machine& m = c.fx.machine();
  // candidate solver e: output 0^w if g(0) == e, else 1^w
  std::vector<ProgramIndex> candidates;
  for (nat e = 0; e < 4; ++e) {
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
    candidates.push_back(m.add(s.str()));
  }

  ClosedClass target = trees::homogeneous({{0}});
  for (nat b = 1; b <= 4; ++b) {
    witness::CollapseSetup setup;
    setup.programs.assign(candidates.begin(), candidates.begin() + b);
    setup.factor_approx = [](std::size_t, nat stage) {
      return stage < 3 ? std::vector<nat>{0, 1} : std::vector<nat>{0};
    };
    setup.refute_budget = 20'000;
    learner::Learner L = witness::homog_collapse_learner(m, setup);

    nat worst = 0;
    for (int round = 0; round < 100; ++round) {
      Word g = random_word(c.rng, 12, 2);
      g[0] = c.rng() % b;
      learner::SimulateOptions opt;
      opt.budget = 20'000;
      opt.output_len = 8;
      learner::RunTrace tr = learner::simulate(m, L, g, target, opt);
      worst = std::max<nat>(worst, tr.mind_changes());
      c.require(tr.mind_changes() <= b,
                "mind changes " + std::to_string(tr.mind_changes()) + " > b=" +
                    std::to_string(b));
      c.require(tr.converged, "collapse learner failed to converge (b=" + std::to_string(b) + ")");
      c.require(tr.final_output.size() >= 8, "converged output too short");
      c.require(target.member(tr.final_output), "converged output left the target");
      if (b == 1) c.require(tr.mind_changes() == 0, "b=1 learner changed its mind");
    }
    c.log << "b=" << b << " worst-mc=" << worst << "; ";
  }
}

// ---------------------------------------------------------------------------
// 5. DNR square reduction
// ---------------------------------------------------------------------------

void check_dnr_square(Ctx& c) {
  kernel::Machine& m = c.fx.machine();
  const nat budget = 64;
  const std::size_t depth = 9;
  const nat u_bound = 4;

  witness::DnrSquareSchedule sched = witness::dnr_square_reduction(m, 2, 3);
  ClosedClass dnr4 = trees::dnr(m, 4, 1, {}, trees::constant_budget(budget));
  ClosedClass dnr2 = trees::dnr(m, 2, 1, {}, trees::constant_budget(budget));

  trees::Frontier f = trees::frontier(dnr4, depth, 5'000'000);
  c.require(!f.members.empty(), "DNR_4 approximation empty at depth 9");

  // precompute halting diagonals for the dichotomy check
  std::vector<std::pair<nat, nat>> readable;  // (v,u) with z(v,u) < depth
  for (nat v = 0; v < 3; ++v)
    for (nat u = 0; u < u_bound; ++u)
      if (kernel::diag_pair(v, u) < depth) readable.emplace_back(v, u);

  std::size_t fallback_checked = 0, gamma_nonempty = 0;
  for (const Word& g : f.members) {
    // dichotomy at every readable pair
    for (auto [v, u] : readable) {
      Outcome fv = m.phi(v, {}, v, budget);
      Outcome fu = m.phi(u, {}, u, budget);
      nat z = kernel::diag_pair(v, u);
      nat g0 = unpair_first(g[z]), g1 = unpair_second(g[z]);
      bool lhs = !fv.halted() || g0 != fv.value;
      bool rhs = !fu.halted() || g1 != fu.value;
      c.require(lhs || rhs, "dichotomy failed at (v,u)=(" + std::to_string(v) + "," +
                                std::to_string(u) + ") on " + show(g));
    }
    // exactly one active piece; its output lands in DNR_2
    auto active = sched.active_piece(m, g, u_bound, budget);
    c.require(active.has_value(), "no active piece on " + show(g));
    Word out = sched.evaluate(m, g, u_bound, budget, 8);
    c.require(dnr2.member(out), "schedule output left DNR_2 on " + show(g));
    if (!out.empty()) ++gamma_nonempty;
    // when the first guard is refuted, the fallback value avoids Phi_v(v)
    if (active && *active != 0) {
      Outcome fb = m.run(sched.pieces[0].fallback, g, 0, 100'000);
      Outcome f0 = m.phi(0, {}, 0, budget);
      if (fb.halted() && f0.halted()) {
        c.require(fb.value != f0.value, "fallback collided with the diagonal on " + show(g));
        ++fallback_checked;
      }
    }
  }
  c.require(gamma_nonempty > 0, "no schedule output was ever nonempty");
  c.require(fallback_checked > 0, "fallback branch never exercised");
  c.log << f.members.size() << " members, " << fallback_checked << " fallback checks; ";
}

// ---------------------------------------------------------------------------
// 6. noncupping extraction
// ---------------------------------------------------------------------------

void check_noncup(Ctx& c) {
  kernel::Machine& m = c.fx.machine();
  ClosedClass spine = c.fx.classes.at("spine");
  ClosedClass full2 = c.fx.classes.at("full2");
  ClosedClass evens0 = c.fx.classes.at("evens0");

  ProgramIndex even_echo = m.add(
      "arity 1\n"
      "  add r1 r0 r0\n"
      "  oracle r0 r1\n"
      "  halt r0\n");
  ProgramIndex evens_reducer = m.add(
      "arity 1\n"
      "  half r1 r0\n"
      "  add r2 r1 r1\n"
      "  sub r3 r0 r2\n"
      "  jnz r3 odd\n"
      "  add r1 r0 r0\n"
      "  oracle r0 r1\n"
      "  halt r0\n"
      "odd:\n"
      "  loadi r0 0\n"
      "  halt r0\n");
  ProgramIndex const_path = kernel::const_index(0);

  struct Case {
    ProgramIndex phi;
    ClosedClass V_P;
    const char* name;
  };
  std::vector<Case> cases = {{even_echo, full2, "echo"},
                             {evens_reducer, evens0, "evens"},
                             {const_path, evens0, "const-path"}};
  Word g = prefix(c.fx.streams.at("full0"), 64);

  for (const Case& kase : cases) {
    witness::NoncupOptions opt;
    opt.rounds = 2;
    opt.depth = 8;
    opt.horizon = 20;
    witness::NoncupResult res = witness::noncup_extract(m, kase.phi, kase.V_P, spine, g, opt);
    c.require(res.violations.empty(),
              std::string("hypothesis violated for ") + kase.name);
    c.require(res.reached_depth, std::string("extraction stalled for ") + kase.name);
    c.require(kase.V_P.member(res.extracted),
              std::string("extracted prefix not a member for ") + kase.name);
    c.require(trees::ext_approx(kase.V_P, res.extracted, res.extracted.size() + 2),
              std::string("extracted prefix not extendible for ") + kase.name);
    for (const auto& D : res.D_trees)
      for (const Word& w : D)
        if (w.size() <= 8)
          c.require(trees::ext_approx(kase.V_P, w, std::max<std::size_t>(8, w.size())),
                    std::string("image word not extendible for ") + kase.name);
    // the oracle-side trees stay extendible in W = V_Q ^ V_P
    ClosedClass W = concat::concat_op(spine, kase.V_P);
    for (const auto& E : res.E_trees)
      for (const Word& w : E)
        if (w.size() <= 8)
          c.require(trees::ext_approx(W, w, std::max<std::size_t>(8, w.size())),
                    std::string("oracle-side word not extendible for ") + kase.name);
    if (kase.phi == const_path)
      c.require(res.extracted == Word(8, 0), "const-path extraction changed the path");
  }
}

// ---------------------------------------------------------------------------
// 7. forcing games
// ---------------------------------------------------------------------------

void check_forcing(Ctx& c) {
  kernel::Machine& m = c.fx.machine();
  std::vector<ClosedClass> fam = {c.fx.classes.at("fixtureA"), c.fx.classes.at("fixtureB")};
  std::vector<Word> streams = {c.fx.streams.at("zerosA"), c.fx.streams.at("onesB")};

  for (nat target = 1; target <= 6; ++target) {
    witness::ForcingOptions opt;
    opt.target_changes = target;
    witness::ForcingResult res = witness::force_mind_changes(
        m, {c.fx.learners.at("echo")}, fam, {}, streams, opt);
    c.require(res.achieved, "echo game did not reach m=" + std::to_string(target));
    c.require(res.mind_change_counts[0] == target,
              "echo game overshot m=" + std::to_string(target));
    // the play stays inside the tie_{m+1} tree
    ClosedClass tree = tape::tie(tape::TieMode::finite, target + 1, fam);
    c.require(tree.member(tape::encode(res.g)), "game word left tie_{m+1}");
  }

  // anti-Popperian stall: a constant guess whose program never answers
  {
    witness::ForcingOptions opt;
    opt.target_changes = 1;
    opt.stage_cap = 64;
    witness::ForcingResult res = witness::force_mind_changes(
        m, {c.fx.learners.at("stall")}, fam, {}, streams, opt);
    c.require(res.stalled && !res.achieved, "stall branch not reported");
  }

  // team variant: both members' counters move under the bit-flip schedule
  {
    std::vector<ClosedClass> fam4 = {c.fx.classes.at("fixtureA"), c.fx.classes.at("fixtureB"),
                                     c.fx.classes.at("full2"), c.fx.classes.at("spine")};
    std::vector<Word> streams4 = {c.fx.streams.at("zerosA"), c.fx.streams.at("onesB"),
                                  c.fx.streams.at("full0"), c.fx.streams.at("spine0")};
    witness::ForcingOptions opt;
    opt.target_changes = 3;
    witness::ForcingResult res = witness::force_mind_changes(
        m, {c.fx.learners.at("echo"), c.fx.learners.at("echo")}, fam4, {}, streams4, opt);
    c.require(res.achieved, "team game did not reach the target");
    c.require(res.mind_change_counts[0] >= 3 && res.mind_change_counts[1] >= 3,
              "team game left a member behind");
  }
}

// ---------------------------------------------------------------------------
// 8. stagewise constructions
// ---------------------------------------------------------------------------

void check_stagewise(Ctx& c) {
  kernel::Machine& m = c.fx.machine();
  ClosedClass spine = c.fx.classes.at("spine");
  ClosedClass full2 = c.fx.classes.at("full2");

  // timekeeper: determinism and the derivative bound
  std::vector<ProgramIndex> opponents = {c.fx.programs.at("echo"),
                                         c.fx.programs.at("loop")};
  witness::TimekeeperOptions topt;
  topt.stages = 8;
  topt.strategies = 3;
  witness::TimekeeperResult r1 = witness::timekeeper_build(m, spine, full2, opponents, topt);
  witness::TimekeeperResult r2 = witness::timekeeper_build(m, spine, full2, opponents, topt);
  c.require(r1.transcript == r2.transcript, "timekeeper transcript not deterministic");
  bool acted = false;
  for (const Word& t : r1.keeper.t) {
    acted = acted || !t.empty();
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
      c.require(t[i] <= t[i + 1], "timekeeper string not nondecreasing");
    auto lhs = trees::frontier(concat::delayed_derivative(spine, t), 7).members;
    auto rhs = trees::frontier(concat::derivative(spine, t.size() + 1), 7).members;
    for (const Word& w : lhs)
      c.require(std::binary_search(rhs.begin(), rhs.end(), w),
                "P^(t_n) escaped P^(|t_n|+1)");
  }
  c.require(acted, "no strategy ever acted");

  // priority construction: determinism, partition and structure flags
  std::vector<std::vector<learner::Learner>> teams = {
      {c.fx.learners.at("echo_guess"), c.fx.learners.at("alternating")}};
  witness::PriorityOptions popt;
  popt.stages = 7;
  witness::PriorityResult p1 = witness::priority_hat(m, spine, full2, teams, spine, popt);
  witness::PriorityResult p2 = witness::priority_hat(m, spine, full2, teams, spine, popt);
  c.require(p1.transcript == p2.transcript, "priority transcript not deterministic");
  c.require(p1.partition_ok, "partition invariant violated");
  c.require(p1.gamma_monotone_ok, "gamma not prefix-monotone");
  c.require(p1.gamma_injective_ok, "gamma not injective on incomparables");
  c.require(p1.tree_ok, "stage tree not prefix-closed");

  // empty team list: stabilizes immediately
  witness::PriorityResult pe = witness::priority_hat(m, spine, full2, {}, spine, popt);
  c.require(pe.transcript.empty(), "empty team list produced actions");
}

// ---------------------------------------------------------------------------
// 9. learner-class implications and the union learner
// ---------------------------------------------------------------------------

void check_classes(Ctx& c) {
  kernel::Machine& m = c.fx.machine();
  ClosedClass full2 = c.fx.classes.at("full2");

  std::vector<Word> sample;
  for (int i = 0; i < 24; ++i) sample.push_back(random_word(c.rng, 10, 2));

  learner::SimulateOptions opt;
  opt.budget = 2'000;
  opt.output_len = 8;

  // the echo program is a (1,1) witness full2 -> full2; the verdict chain
  // (1,1) => (1,<w) => (1,w|<w) => (1,w) must hold after coercion
  ProgramIndex echo = c.fx.programs.at("echo");
  auto r11 = learner::verify_class(m, learner::Kind::one_one, echo, sample, full2, full2,
                                   0, opt);
  c.require(r11.pass, "(1,1) echo witness failed");
  learner::Learner coerced = learner::constant_learner(echo);
  auto rb = learner::verify_class(m, learner::Kind::one_bounded_mc, coerced, sample, full2,
                                  full2, 0, opt);
  c.require(rb.pass, "(1,<w) coercion failed");
  auto ri = learner::verify_class(m, learner::Kind::one_bounded_indx, coerced, sample,
                                  full2, full2, 1, opt);
  c.require(ri.pass, "(1,w|<w) coercion failed");
  auto rw = learner::verify_class(m, learner::Kind::one_omega, coerced, sample, full2,
                                  full2, 0, opt);
  c.require(rw.pass, "(1,w) coercion failed");

  // the alternating learner fails the bounded kinds
  auto bad = learner::verify_class(m, learner::Kind::one_bounded_mc,
                                   c.fx.learners.at("alternating"), sample, full2, full2, 2,
                                   opt);
  c.require(!bad.pass, "alternating learner passed a small mind-change bound");

  // Sigma02 union learner: converges with the correct layer tag
  std::vector<ClosedClass> layers = {c.fx.classes.at("zeros"), c.fx.classes.at("evens0"),
                                     full2};
  learner::Learner UL = witness::sigma2_union_learner(m, layers);
  struct Probe {
    Word g;
    std::size_t expect_tag;
  };
  std::vector<Probe> probes = {{Word(12, 0), 0}};
  {
    Word g = {1, 0, 1, 0, 0, 0, 1, 0, 1, 0, 1, 0};
    probes.push_back({g, 1});
    Word h = {0, 1, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0};
    probes.push_back({h, 2});
  }
  // plus sampled members of each layer, tagged by their true least layer;
  // keep only streams whose least layer has settled before the horizon, so
  // convergence at margin K is observable
  for (int round = 0; round < 40; ++round) {
    Word g = random_member(c.rng, layers[c.rng() % layers.size()], 12);
    if (g.size() < 12) continue;
    std::size_t least = 0;
    while (!layers[least].member(g)) ++least;
    std::size_t early = 0;
    while (!layers[early].member(prefix(g, g.size() - 4))) ++early;
    if (early != least) continue;
    probes.push_back({g, least});
  }
  for (const Probe& pr : probes) {
    learner::RunTrace tr = learner::simulate(m, UL, pr.g, full2, opt);
    c.require(tr.converged, "union learner did not converge on " + show(pr.g));
    Word out = tr.final_output;
    c.require(!out.empty() && out[0] == pr.expect_tag,
              "union learner tagged " + show(pr.g) + " wrongly");
    c.require(layers[pr.expect_tag].member(prefix(pr.g, 8)), "probe not in its layer");
    if (pr.expect_tag > 0)
      c.require(!layers[pr.expect_tag - 1].member(pr.g), "probe also in the lower layer");
    // converged output is the tagged stream
    for (std::size_t i = 1; i < out.size(); ++i)
      c.require(out[i] == pr.g[i - 1], "tagged output diverged from the stream");
  }

  // popperian probe: echo guess never stalls, stall guess does
  {
    std::vector<Word> probes2 = {prefix(c.fx.streams.at("full0"), 12)};
    auto ok = learner::popperian_probe(m, c.fx.learners.at("echo_guess"), probes2, 1000);
    c.require(!ok.any_stall, "echo guess reported a stall");
    auto stall = learner::popperian_probe(m, c.fx.learners.at("stall"), probes2, 1000);
    c.require(stall.any_stall, "looping guess did not report a stall");
  }
}

// ---------------------------------------------------------------------------
// 10. determinism of seeded artifacts
// ---------------------------------------------------------------------------

void check_determinism(Ctx& c) {
  Fixtures& fx = c.fx;
  for (const char* expr : {"concat(spine, dnr 2)", "tie 2 (evens0, headone)",
                           "hyper(full2, spine)", "deriv 2 (spine)"}) {
    auto e = dsl::parse(expr);
    c.require(dsl::equal(*dsl::parse(dsl::print(*e)), *e), "print/parse identity failed");
    trees::ClosedClass c1 = dsl::elaborate_class(expr, fx);
    trees::ClosedClass c2 = dsl::elaborate_class(expr, fx);
    std::string j1 = exporter::frontier_json(c1, trees::frontier(c1, 6));
    std::string j2 = exporter::frontier_json(c2, trees::frontier(c2, 6));
    c.require(j1 == j2, std::string("frontier JSON differs across runs for ") + expr);
  }
  // witness transcripts byte-identical across repeated runs
  kernel::Machine& m = fx.machine();
  std::vector<ClosedClass> fam = {fx.classes.at("fixtureA"), fx.classes.at("fixtureB")};
  std::vector<Word> streams = {fx.streams.at("zerosA"), fx.streams.at("onesB")};
  witness::ForcingOptions fopt;
  fopt.target_changes = 4;
  auto g1 = witness::force_mind_changes(m, {fx.learners.at("echo")}, fam, {}, streams, fopt);
  auto g2 = witness::force_mind_changes(m, {fx.learners.at("echo")}, fam, {}, streams, fopt);
  c.require(g1.transcript == g2.transcript, "forcing transcript differs across runs");
}

}  // namespace

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

std::string render(const CheckResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%6.2fs", r.seconds);
  std::string line = std::string(r.pass ? "[PASS] " : "[FAIL] ") + r.name + " (" + buf + ")";
  if (!r.pass && !r.detail.empty()) line += "\n       " + r.detail;
  return line;
}

std::vector<CheckResult> run_suite(const std::string& suite, Fixtures& fx, nat seed) {
  struct Entry {
    const char* key;
    const char* name;
    void (*fn)(Ctx&);
    double budget_seconds;
  };
  static const Entry entries[] = {
      {"kernel", "1. kernel laws", check_kernel, 10.0},
      {"operators", "2. operator/oracle equivalence", check_operators, 60.0},
      {"identities", "3. definitional identities", check_identities, 10.0},
      {"collapse", "4. homogeneous collapse", check_collapse, 30.0},
      {"dnrsquare", "5. DNR square reduction", check_dnr_square, 60.0},
      {"noncup", "6. noncupping extraction", check_noncup, 30.0},
      {"forcing", "7. forcing games", check_forcing, 20.0},
      {"stagewise", "8. stagewise constructions", check_stagewise, 30.0},
      {"classes", "9. learner-class implications", check_classes, 20.0},
      {"determinism", "10. seeded determinism", check_determinism, 300.0},
  };
  std::vector<CheckResult> out;
  bool any = false;
  for (const Entry& e : entries) {
    if (suite != "all" && suite != e.key) continue;
    any = true;
    CheckResult r = timed(e.name, fx, seed, e.fn);
    if (r.seconds >= e.budget_seconds) {
      r.pass = false;
      r.detail += (r.detail.empty() ? "" : "; ") + std::string("exceeded the ") +
                  std::to_string(static_cast<int>(e.budget_seconds)) + "s budget";
    }
    out.push_back(std::move(r));
  }
  if (!any) throw parse_error("unknown check suite '" + suite + "'");
  return out;
}

}  // namespace masslab::checks
