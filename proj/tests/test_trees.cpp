#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "masslab/fixtures.hpp"
#include "masslab/oracles.hpp"
#include "masslab/trees.hpp"

using namespace masslab;
using trees::ClosedClass;

namespace {

std::unique_ptr<Fixtures>& fx() {
  static std::unique_ptr<Fixtures> f = make_standard_fixtures();
  return f;
}

}  // namespace

TEST_CASE("interleave and deinterleave round-trip") {
  CHECK(interleave({1, 2}, {3, 4}) == Word{1, 3, 2, 4});
  CHECK(interleave({}, {}) == Word{});
  CHECK_THROWS_AS(interleave({1}, {2, 3, 4}), shape_error);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    std::size_t lg = rng() % 8;
    std::size_t lf = lg + rng() % 2;
    Word f(lf), g(lg);
    for (auto& s : f) s = rng() % 10;
    for (auto& s : g) s = rng() % 10;
    auto [f2, g2] = deinterleave(interleave(f, g));
    CHECK(f2 == f);
    CHECK(g2 == g);
  }
}

TEST_CASE("frontier of the full binary tree") {
  trees::Frontier f = trees::frontier(trees::full(2), 3);
  CHECK(f.members.size() == 8);
  CHECK(f.leaves.empty());
}

TEST_CASE("frontier of a single path") {
  trees::Frontier f = trees::frontier(trees::singleton({0}), 3);
  REQUIRE(f.members.size() == 1);
  CHECK(f.members[0] == Word{0, 0, 0});
}

TEST_CASE("frontier caps raise a resource error") {
  CHECK_THROWS_AS(trees::frontier(trees::full(3), 10, 100), resource_error);
}

TEST_CASE("frontier agrees with the reference enumeration on every fixture") {
  for (const auto& [name, cls] : fx()->classes) {
    for (std::size_t d : {0u, 1u, 4u, 6u, 8u}) {
      auto got = trees::frontier(cls, d).members;
      auto expect = oracles::layer(cls, d);
      CHECK_MESSAGE(got == expect, "fixture ", name, " depth ", d);
    }
  }
  // and to depth 10 on the cheap binary fixtures
  for (const char* name : {"spine", "evens0", "headone", "alt01"}) {
    const auto& cls = fx()->classes.at(name);
    CHECK(trees::frontier(cls, 10).members == oracles::layer(cls, 10));
  }
}

TEST_CASE("ext_approx matches the reference enumeration") {
  std::mt19937_64 rng(17);
  for (const auto& [name, cls] : fx()->classes) {
    auto all = oracles::words(cls, 6);
    auto deep = oracles::layer(cls, 6);
    for (const Word& w : all) {
      bool expect = false;
      for (const Word& m : deep)
        if (is_prefix(w, m)) expect = true;
      CHECK_MESSAGE(trees::ext_approx(cls, w, 6) == expect, "fixture ", name);
    }
  }
  // the empty word is extendible in any nonempty class
  CHECK(trees::ext_approx(trees::full(2), {}, 5));
  // a declared leaf is not extendible past its depth
  CHECK(!trees::ext_approx(fx()->classes.at("spine"), {1, 0}, 4));
}

TEST_CASE("homogeneous classes") {
  ClosedClass h = trees::homogeneous({{1}, {0, 2}});
  auto f = trees::frontier(h, 2);
  REQUIRE(f.members.size() == 2);
  CHECK(f.members[0] == Word{1, 0});
  CHECK(f.members[1] == Word{1, 2});
  // empty factor: declared-empty class
  ClosedClass e = trees::homogeneous({{0}, {}});
  CHECK(!e.member({}));
  // degree-isomorphic everywhere: suffix trees below equal-length members agree
  ClosedClass g = trees::homogeneous({{0, 1}, {0}});
  auto layer3 = oracles::layer(g, 3);
  for (const Word& a : layer3)
    for (const Word& b : layer3) {
      std::vector<Word> sa, sb;
      for (const Word& m : oracles::layer(g, 6))
        if (is_prefix(a, m)) sa.push_back(suffix_from(m, 3));
      for (const Word& m : oracles::layer(g, 6))
        if (is_prefix(b, m)) sb.push_back(suffix_from(m, 3));
      CHECK(sa == sb);
    }
}

TEST_CASE("product and coproduct shapes") {
  ClosedClass p0 = trees::singleton({0});
  ClosedClass p1 = trees::singleton({1});
  auto f = trees::frontier(trees::product(p0, p1), 4);
  REQUIRE(f.members.size() == 1);
  CHECK(f.members[0] == Word{0, 1, 0, 1});

  auto cf = trees::frontier(trees::coproduct(trees::full(2), trees::full(2)), 1);
  REQUIRE(cf.members.size() == 2);
  CHECK(cf.members[0] == Word{0});
  CHECK(cf.members[1] == Word{1});

  // empty x Q = empty
  auto ef = trees::frontier(trees::product(trees::empty_class(), trees::full(2)), 2);
  CHECK(ef.members.empty());
}

TEST_CASE("dnr example: a fast halting diagonal prunes one branch") {
  // slot 0 carries const1_fast, so Phi_0(0) = 1 within two steps
  kernel::Machine& m = fx()->machine();
  ClosedClass d2 = trees::dnr(m, 2, 1, {}, trees::constant_budget(2));
  auto f = trees::frontier(d2, 2);
  REQUIRE(f.members.size() == 2);
  CHECK(f.members[0] == Word{0, 0});
  CHECK(f.members[1] == Word{0, 1});
}

TEST_CASE("dnr shrinks as the budget grows and embeds into larger k") {
  kernel::Machine& m = fx()->machine();
  for (nat lo : {0u, 2u, 16u}) {
    ClosedClass small = trees::dnr(m, 2, 1, {}, trees::constant_budget(lo + 48));
    ClosedClass big = trees::dnr(m, 2, 1, {}, trees::constant_budget(lo));
    auto fs = trees::frontier(small, 6).members;
    auto fb = trees::frontier(big, 6).members;
    for (const Word& w : fs)
      CHECK(std::binary_search(fb.begin(), fb.end(), w));
  }
  ClosedClass d2 = trees::dnr(m, 2, 1, {}, trees::constant_budget(64));
  ClosedClass d3 = trees::dnr(m, 3, 1, {}, trees::constant_budget(64));
  for (const Word& w : trees::frontier(d2, 6).members) CHECK(d3.member(w));
}

TEST_CASE("dnr with an oracle parameter consults it") {
  kernel::Machine& m = fx()->machine();
  // echo sits at slot 2 (index 4): with oracle o, Phi_4(o; 4) = o[4]
  Word o = {9, 9, 9, 9, 1, 9};
  ClosedClass d = trees::dnr(m, 2, 1, o, trees::constant_budget(64));
  Word w(5, 0);
  CHECK(d.member(w));
  Word bad = w;
  bad[4] = 1;  // collides with Phi_4(o;4) = o[4] = 1
  CHECK(!d.member(bad));
}

TEST_CASE("dnr with m = 2 avoids both coordinates of each pair cell") {
  kernel::Machine& m = fx()->machine();
  ClosedClass d = trees::dnr(m, 4, 2, {}, trees::constant_budget(64));
  // cell x constrains against Phi_a(x) and Phi_b(x) for (a,b) = unpair(x)
  for (std::size_t depth = 1; depth <= 4; ++depth) {
    for (const Word& w : trees::frontier(d, depth).members) {
      for (std::size_t x = 0; x < w.size(); ++x) {
        auto [a, b] = unpair(x);
        for (nat e : {a, b}) {
          kernel::Outcome o = m.phi(e, {}, x, 64);
          if (o.halted()) CHECK(w[x] != o.value);
        }
      }
    }
  }
  // and conversely every unconstrained word is present
  Word probe = {0};
  auto [a0, b0] = unpair(0);
  kernel::Outcome o = m.phi(a0, {}, 0, 64);
  if (o.halted() && o.value == 0) probe[0] = (o.value + 1) % 4;
  CHECK(d.member(probe));
}

TEST_CASE("downward closure sampling across fixtures") {
  std::mt19937_64 rng(23);
  for (const auto& [name, cls] : fx()->classes) {
    for (int round = 0; round < 200; ++round) {
      Word w;
      for (std::size_t i = 0; i < rng() % 7; ++i) w.push_back(rng() % 3);
      if (cls.member(w)) continue;
      Word ext = w;
      ext.push_back(rng() % 3);
      CHECK_MESSAGE(!cls.member(ext), "fixture ", name, " not downward closed");
    }
  }
}
