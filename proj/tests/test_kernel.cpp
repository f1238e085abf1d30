#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "masslab/fixtures.hpp"
#include "masslab/kernel.hpp"
#include "masslab/pairing.hpp"

using namespace masslab;
using kernel::Machine;
using kernel::Outcome;
using kernel::Program;

namespace {

std::unique_ptr<Fixtures>& fx() {
  static std::unique_ptr<Fixtures> f = make_standard_fixtures();
  return f;
}

}  // namespace

TEST_CASE("square pairing bijects k x k onto k^2 for every k") {
  for (nat k = 1; k <= 9; ++k) {
    std::set<nat> codes;
    for (nat a = 0; a < k; ++a)
      for (nat b = 0; b < k; ++b) {
        nat c = pair(a, b);
        CHECK(c < k * k);
        codes.insert(c);
        auto [x, y] = unpair(c);
        CHECK(x == a);
        CHECK(y == b);
      }
    CHECK(codes.size() == k * k);
  }
}

TEST_CASE("tuple codes round-trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::size_t m = 1 + rng() % 3;
    std::vector<nat> es(m);
    for (auto& e : es) e = rng() % 50;
    CHECK(tuple_decode(tuple_code(es), m) == es);
  }
}

TEST_CASE("constant program halts with its value") {
  Machine& m = fx()->machine();
  Outcome o = m.run(kernel::const_index(7), {}, 0, 10);
  CHECK(o.halted());
  CHECK(o.value == 7);
}

TEST_CASE("echo reads the oracle at the input position") {
  Machine& m = fx()->machine();
  nat echo = fx()->programs.at("echo");
  Word oracle = {3, 1, 4};
  Outcome o = m.run(echo, oracle, 1, oracle.size());
  CHECK(o.halted());
  CHECK(o.value == 1);
  // out-of-range reads are observable, not divergence
  Outcome oor = m.run(echo, oracle, 9, 100);
  CHECK(oor.tag == Outcome::Tag::oracle_out_of_range);
}

TEST_CASE("the loop never halts") {
  Machine& m = fx()->machine();
  CHECK(!m.run(fx()->programs.at("loop"), {}, 0, 1'000'000).halted());
}

TEST_CASE("zero budget never halts anything") {
  Machine& m = fx()->machine();
  for (const auto& [name, idx] : fx()->programs)
    CHECK(!m.phi(idx, {1, 1}, 5, 0).halted());
  CHECK(m.phi_sigma(kernel::const_index(0), {1, 1}, 5).halted());
}

TEST_CASE("a program engineered to halt at step 10 needs |sigma| >= 10") {
  Machine& m = fx()->machine();
  nat slow = fx()->programs.at("slow10_const0");
  for (std::size_t len = 0; len <= 12; ++len) {
    Word sigma(len, 0);
    Outcome o = m.phi_sigma(slow, sigma, 0);
    CHECK(o.halted() == (len >= 10));
    if (o.halted()) CHECK(o.value == 0);
  }
}

TEST_CASE("budget monotonicity on the fixture corpus") {
  Machine& m = fx()->machine();
  for (const auto& [name, idx] : fx()->programs) {
    for (const Word& oracle : {Word{}, Word{2, 0, 1}}) {
      bool halted = false;
      Outcome first;
      for (nat s = 0; s <= 64; ++s) {
        Outcome o = m.phi(idx, oracle, 1, s);
        if (halted) {
          CHECK(o.same(first));
        } else if (o.halted()) {
          halted = true;
          first = o;
        }
      }
    }
  }
}

TEST_CASE("smn freezes arguments into registers") {
  Machine& m = fx()->machine();
  nat add = fx()->programs.at("add");
  nat frozen = m.smn(add, {2});
  Outcome o = m.run(frozen, {}, 3, 1000);
  CHECK(o.halted());
  CHECK(o.value == 5);
  // exhaustive check of add semantics under freezing
  for (nat a = 0; a < 6; ++a) {
    nat sp = m.smn(add, {a});
    for (nat b = 0; b < 6; ++b) {
      Outcome r = m.run(sp, {}, b, 1000);
      CHECK(r.halted());
      CHECK(r.value == a + b);
    }
  }
  CHECK(m.smn(add, {}) == add);
  CHECK(m.smn(add, {2}) == m.smn(add, {2}));
  CHECK(m.smn(add, {2}) != m.smn(add, {3}));
}

TEST_CASE("smn shifts jump targets past the prelude") {
  Machine& m = fx()->machine();
  // halts 5 when the frozen argument is zero, else echoes it
  nat branchy = m.add(
      "arity 2\n"
      "  jnz r1 nonzero\n"
      "  loadi r0 5\n"
      "  halt r0\n"
      "nonzero:\n"
      "  mov r0 r1\n"
      "  halt r0\n");
  Outcome a = m.run(m.smn(branchy, {0}), {}, 9, 100);
  CHECK(a.value == 5);
  Outcome b = m.run(m.smn(branchy, {7}), {}, 9, 100);
  CHECK(b.value == 7);
}

TEST_CASE("word codes round-trip within the desk envelope") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 100; ++i) {
    Word w(rng() % 4);
    for (auto& s : w) s = rng() % 30;
    CHECK(kernel::word_decode(kernel::word_code(w)) == w);
  }
  // iterated pairing grows fast; exceeding the index range is a reported
  // resource condition, not silent wraparound
  CHECK_THROWS_AS(kernel::word_code(Word{30, 30, 30, 30, 30}), resource_error);
}

TEST_CASE("fixpoint: builder to const42") {
  Machine& m = fx()->machine();
  nat n = m.fixpoint(fx()->programs.at("to_const42"), 10'000);
  Outcome o = m.run(n, {}, 0, 100'000);
  CHECK(o.halted());
  CHECK(o.value == 42);
}

TEST_CASE("fixpoint: quine builder reproduces its own index") {
  Machine& m = fx()->machine();
  nat n = m.fixpoint(fx()->programs.at("to_const_self"), 10'000);
  Outcome o = m.run(n, {}, 3, 100'000);
  CHECK(o.halted());
  CHECK(o.value == n);
}

TEST_CASE("fixpoint rejects diverging builders") {
  Machine& m = fx()->machine();
  CHECK_THROWS_AS(m.fixpoint(fx()->programs.at("loop"), 1000), construction_error);
}

TEST_CASE("diagonal pairing identity and divergence propagation") {
  Machine& m = fx()->machine();
  nat v = kernel::const_index(3);
  nat z = kernel::diag_pair(v, v);
  Outcome o = m.run(z, {}, z, 100'000);
  CHECK(o.halted());
  CHECK(o.value == pair(3, 3));

  nat zl = kernel::diag_pair(fx()->programs.at("loop"), v);
  CHECK(!m.run(zl, {}, zl, 50'000).halted());

  std::set<nat> seen;
  for (nat a = 0; a < 10; ++a)
    for (nat b = 0; b < 10; ++b) seen.insert(kernel::diag_pair(a, b));
  CHECK(seen.size() == 100);
}

TEST_CASE("malformed indices: run throws, phi denotes the empty function") {
  Machine& m = fx()->machine();
  nat bogus = 2 * (m.slot_count() + 50);  // unregistered slot
  CHECK_THROWS_AS(m.run(bogus, {}, 0, 10), decode_error);
  CHECK(!m.phi(bogus, {}, 0, 10).halted());
}

TEST_CASE("a huge probe window cannot burn more than the outer budget") {
  Machine& m = fx()->machine();
  std::string asmtext =
      "arity 1\n"
      "  loadi r1 " + std::to_string(fx()->programs.at("loop")) + "\n"
      "  loadi r2 0\n"
      "  loadi r3 1000000000\n"
      "  univb r1 r2 r3\n"
      "  halt r0\n";
  nat prog = m.add(asmtext);
  Outcome o = m.run(prog, {}, 0, 1000);
  CHECK(!o.halted());
  CHECK(o.steps == 1000);
  // and with an affordable window the probe reports non-convergence as 0
  std::string small =
      "arity 1\n"
      "  loadi r1 " + std::to_string(fx()->programs.at("loop")) + "\n"
      "  loadi r2 0\n"
      "  loadi r3 50\n"
      "  univb r1 r2 r3\n"
      "  halt r0\n";
  Outcome s = m.run(m.add(small), {}, 7, 1000);
  CHECK(s.halted());
  CHECK(s.value == 0);
}

TEST_CASE("godel code round-trips exactly") {
  for (const auto& entry : fx()->corpus) {
    std::string hex = kernel::godel_hex(entry.program);
    CHECK(kernel::godel_parse_hex(hex) == entry.program);
  }
  CHECK_THROWS_AS(kernel::godel_parse_hex("0x"), decode_error);
  CHECK_THROWS_AS(kernel::godel_parse_hex("zz"), decode_error);
}

TEST_CASE("assembler round-trips and reports errors with line numbers") {
  for (const auto& entry : fx()->corpus)
    CHECK(kernel::assemble(kernel::disassemble(entry.program)) == entry.program);
  CHECK_THROWS_AS(kernel::assemble("arity 1\n  frobnicate r0\n"), parse_error);
  CHECK_THROWS_AS(kernel::assemble("arity 1\n  jmp nowhere\n"), parse_error);
  CHECK_THROWS_AS(kernel::assemble("arity 1\n  loadi r9 0\n"), parse_error);
}

TEST_CASE("corpus files verify their canonical codes") {
  std::string text = kernel::write_corpus(fx()->corpus);
  auto back = kernel::parse_corpus(text);
  REQUIRE(back.size() == fx()->corpus.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].name == fx()->corpus[i].name);
    CHECK(back[i].program == fx()->corpus[i].program);
  }
  // tampering with the code is caught
  auto pos = text.find("0x");
  std::string bad = text;
  bad[pos + 2] = bad[pos + 2] == '1' ? '2' : '1';
  CHECK_THROWS_AS(kernel::parse_corpus(bad), parse_error);
}

TEST_CASE("oracle locality: padding beyond reads never changes a halt") {
  Machine& m = fx()->machine();
  std::mt19937_64 rng(11);
  std::vector<nat> pool;
  for (const auto& [name, idx] : fx()->programs) pool.push_back(idx);
  for (nat idx : pool) {
    for (int round = 0; round < 10; ++round) {
      Word oracle(rng() % 6, 0);
      for (auto& s : oracle) s = rng() % 4;
      nat input = rng() % 4;
      Outcome o = m.phi(idx, oracle, input, 500);
      if (!o.halted()) continue;
      Word padded = oracle;
      for (int k = 0; k < 5; ++k) padded.push_back(rng() % 9);
      CHECK(m.phi(idx, padded, input, 500).same(o));
    }
  }
}
