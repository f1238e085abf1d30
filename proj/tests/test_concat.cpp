#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "masslab/concat.hpp"
#include "masslab/fixtures.hpp"
#include "masslab/oracles.hpp"

using namespace masslab;
using trees::ClosedClass;

namespace {

std::unique_ptr<Fixtures>& fx() {
  static std::unique_ptr<Fixtures> f = make_standard_fixtures();
  return f;
}

}  // namespace

TEST_CASE("leafless classes absorb concatenation") {
  ClosedClass full2 = trees::full(2);
  ClosedClass spine = fx()->classes.at("spine");
  auto lhs = trees::frontier(concat::concat_op(full2, spine), 6).members;
  auto rhs = trees::frontier(full2, 6).members;
  CHECK(lhs == rhs);
}

TEST_CASE("concatenation grafts below leaves") {
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass alt = fx()->classes.at("alt01");
  ClosedClass c = concat::concat_op(spine, alt);
  // below the leaf <1,0> the class looks like the shifted copy of alt01
  Word leaf = {1, 0};
  for (const Word& w : oracles::words(alt, 4)) {
    CHECK(c.member(cat(leaf, w)));
  }
  CHECK(!c.member(cat(leaf, Word{1, 1})));
  // frontier equality with the defining formula
  for (std::size_t d : {4u, 6u})
    CHECK(trees::frontier(c, d).members == oracles::concat_layer(spine, alt, d));
}

TEST_CASE("commutative concatenation is symmetric under the half swap") {
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass ev = fx()->classes.at("evens0");
  auto ab = trees::frontier(concat::comm_concat(spine, ev), 8).members;
  auto ba = trees::frontier(concat::comm_concat(ev, spine), 8).members;
  REQUIRE(ab.size() == ba.size());
  for (const Word& w : ab) {
    auto [f, g] = deinterleave(w);
    CHECK(std::binary_search(ba.begin(), ba.end(), interleave(g, f)));
  }
  CHECK(trees::frontier(concat::comm_concat(spine, ev), 6).members ==
        oracles::comm_concat_layer(spine, ev, 6));
}

TEST_CASE("family concatenation routes the n-th leaf to Q_n") {
  ClosedClass spine = fx()->classes.at("spine");
  // distinct singletons below distinct leaves
  std::vector<ClosedClass> qs = {trees::singleton({0}), trees::singleton({1})};
  ClosedClass c = concat::concat_family(spine, concat::cyclic_family(qs));
  // leaves of spine in length-lex order: <1,0>, <1,1>, <0,1,0>, <0,1,1>, ...
  CHECK(c.member({1, 0, 0, 0, 0}));
  CHECK(!c.member({1, 0, 1}));
  CHECK(c.member({1, 1, 1, 1}));
  CHECK(!c.member({1, 1, 0}));
  CHECK(c.member({0, 1, 0, 0, 0}));
  CHECK(c.member({0, 1, 1, 1, 1}));
  for (std::size_t d : {5u, 6u})
    CHECK(trees::frontier(c, d).members == oracles::concat_family_layer(spine, qs, d));
  // constant family coincides with plain concatenation
  ClosedClass single = concat::concat_family(spine, concat::constant_family(qs[0]));
  ClosedClass plain = concat::concat_op(spine, qs[0]);
  for (std::size_t d = 0; d <= 6; ++d)
    CHECK(trees::frontier(single, d).members == trees::frontier(plain, d).members);
}

TEST_CASE("recursive meet routes through the base class") {
  ClosedClass base = fx()->base;
  std::vector<ClosedClass> qs = {trees::singleton({0}), trees::singleton({1})};
  ClosedClass meet = concat::recursive_meet(base, concat::cyclic_family(qs));
  CHECK(trees::frontier(meet, 5).members == oracles::concat_family_layer(base, qs, 5));
}

TEST_CASE("derivatives iterate concatenation") {
  ClosedClass spine = fx()->classes.at("spine");
  auto d1 = trees::frontier(concat::derivative(spine, 1), 8).members;
  CHECK(d1 == trees::frontier(spine, 8).members);
  auto d2 = trees::frontier(concat::derivative(spine, 2), 8).members;
  CHECK(d2 == trees::frontier(concat::concat_op(spine, spine), 8).members);
  auto d3 = trees::frontier(concat::derivative(spine, 3), 8).members;
  CHECK(d3 == oracles::derivative_layer(spine, 3, 8));
}

TEST_CASE("zero delays reduce to the plain derivative") {
  ClosedClass spine = fx()->classes.at("spine");
  for (std::size_t n : {1u, 2u}) {
    Word tau(n, 0);
    auto lhs = trees::frontier(concat::delayed_derivative(spine, tau), 8).members;
    auto rhs = trees::frontier(concat::derivative(spine, n + 1), 8).members;
    CHECK(lhs == rhs);
  }
}

TEST_CASE("a huge first delay freezes the derivative at desk depth") {
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass d = concat::delayed_derivative(spine, {100});
  for (std::size_t depth = 0; depth <= 7; ++depth)
    CHECK(trees::frontier(d, depth).members == trees::frontier(spine, depth).members);
}

TEST_CASE("mixed delays agree with the decomposition grammar") {
  ClosedClass spine = fx()->classes.at("spine");
  for (const Word& tau : {Word{2}, Word{3, 0}, Word{2, 5}})
    CHECK(trees::frontier(concat::delayed_derivative(spine, tau), 8).members ==
          oracles::delayed_layer(spine, tau, 8));
}

TEST_CASE("btie layers are the derivative powers and nest") {
  ClosedClass spine = fx()->classes.at("spine");
  concat::LayeredClass lc = concat::btie(spine, 3);
  REQUIRE(lc.layers.size() == 4);
  CHECK(trees::frontier(lc.layers[0], 6).members == trees::frontier(spine, 6).members);
  for (std::size_t n = 0; n + 1 < lc.layers.size(); ++n) {
    auto cur = trees::frontier(lc.layers[n], 8).members;
    auto nxt = trees::frontier(lc.layers[n + 1], 8).members;
    for (const Word& w : cur) CHECK(std::binary_search(nxt.begin(), nxt.end(), w));
    CHECK(cur.size() < nxt.size());  // strict: spine has leaves above depth 1
  }
  CHECK(lc.least_layer(Word{1, 0, 1, 0}) == 1);
  CHECK(lc.least_layer(Word{0, 0}) == 0);
  CHECK(!lc.least_layer(Word{2}).has_value());
}

TEST_CASE("the sharp presentation meets every clopen set") {
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass s = concat::sharp_presentation(concat::constant_family(spine), 2);
  // every word over {0,1,#} extends into the presentation by writing a sharp
  for (const Word& w : oracles::layer(trees::full(3), 6)) {
    Word ext = cat(w, nat{2});
    CHECK(s.member(ext));
  }
}

TEST_CASE("hyperconcatenation matches the defining union") {
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass full2 = fx()->classes.at("full2");
  ClosedClass alt = fx()->classes.at("alt01");
  for (std::size_t d : {6u, 8u, 10u}) {
    CHECK(trees::frontier(concat::hyperconcat(full2, spine), d).members ==
          oracles::hyperconcat_layer(full2, spine, d));
  }
  CHECK(trees::frontier(concat::hyperconcat(alt, spine), 10).members ==
        oracles::hyperconcat_layer(alt, spine, 10));
  // singleton Q: blocks separated by Q's fixed symbols
  ClosedClass zq = trees::singleton({0});
  ClosedClass h = concat::hyperconcat(zq, spine);
  // <1,0> is a spine leaf; following it with 0 (Q's symbol) re-enters spine
  CHECK(h.member({1, 0, 0, 1, 1}));
  CHECK(!h.member({1, 0, 1, 1, 1}));  // separator must spell Q's branch
  CHECK(trees::frontier(h, 10).members == oracles::hyperconcat_layer(zq, spine, 10));
}

TEST_CASE("arrow words carry exactly one separator past the split") {
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass ev = fx()->classes.at("evens0");
  ClosedClass a = concat::arrow_concat(spine, ev);
  nat sharp = 2;
  for (const Word& w : trees::frontier(a, 6).members) {
    std::size_t sharps = 0;
    for (nat s : w) sharps += s == sharp;
    CHECK(sharps <= 1);
  }
  CHECK(trees::frontier(a, 6).members == oracles::arrow_layer(spine, ev, sharp, 6));
}

TEST_CASE("sqcap over a full head is everything") {
  ClosedClass full2 = fx()->classes.at("full2");
  ClosedClass ev = fx()->classes.at("evens0");
  auto f = trees::frontier(concat::sqcap_concat(full2, ev), 6).members;
  CHECK(f == trees::frontier(full2, 6).members);
  ClosedClass spine = fx()->classes.at("spine");
  CHECK(trees::frontier(concat::sqcap_concat(spine, ev), 6).members ==
        oracles::sqcap_layer(spine, ev, 6));
}

TEST_CASE("degenerate operands") {
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass empty = trees::empty_class();
  // an empty tail contributes nothing; the head keeps its leaf-free part
  auto ce = trees::frontier(concat::concat_op(spine, empty), 6).members;
  CHECK(ce == oracles::concat_layer(spine, empty, 6));
  // an empty factor collapses the commutative concatenation entirely
  CHECK(trees::frontier(concat::comm_concat(spine, empty), 6).members.empty());
  // a root-dead Q admits no separators: Q diamond P is P's own tree
  auto hd = trees::frontier(concat::hyperconcat(empty, spine), 6).members;
  CHECK(hd.empty());
  ClosedClass root_only = trees::homogeneous({{}});
  CHECK(!root_only.member({}));
}

TEST_CASE("concat below a leaf is the shifted copy") {
  ClosedClass spine = fx()->classes.at("spine");
  ClosedClass ev = fx()->classes.at("evens0");
  ClosedClass c = concat::concat_op(spine, ev);
  Word leaf = {1, 1};
  for (std::size_t d = 0; d <= 4; ++d)
    for (const Word& w : oracles::layer(ev, d))
      CHECK(c.member(cat(leaf, w)));
}
