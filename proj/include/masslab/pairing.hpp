#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "masslab/errors.hpp"

namespace masslab {

using nat = std::uint64_t;

// The shared pairing <a,b> is the square-shell pairing
//
//   <a,b> = b*b + a       if a < b
//   <a,b> = a*a + a + b   otherwise,
//
// which restricts to a bijection k x k -> {0,...,k^2-1} for every k.  That
// restriction property is load-bearing: k^2-valued words must decompose into
// two k-valued coordinate words exactly.
inline nat pair(nat a, nat b) {
  nat m = a < b ? b : a;
  if (m > 0xFFFFFFFFull) throw resource_error("pair: argument exceeds 32-bit range");
  return a < b ? b * b + a : a * a + a + b;
}

inline std::pair<nat, nat> unpair(nat c) {
  nat m = 0;
  while ((m + 1) * (m + 1) <= c) ++m;  // m = floor(sqrt(c)), c < 2^64 so m < 2^32
  nat r = c - m * m;
  if (r < m) return {r, m};
  return {m, r - m};
}

inline nat unpair_first(nat c) { return unpair(c).first; }
inline nat unpair_second(nat c) { return unpair(c).second; }

// Tuple code for m-tuples: <e0> = e0, <e0,...,em> = pair(<e0,...,e_{m-1}>, em).
inline nat tuple_code(const std::vector<nat>& es) {
  if (es.empty()) throw shape_error("tuple_code: empty tuple");
  nat c = es[0];
  for (std::size_t i = 1; i < es.size(); ++i) c = pair(c, es[i]);
  return c;
}

inline std::vector<nat> tuple_decode(nat code, std::size_t m) {
  if (m == 0) throw shape_error("tuple_decode: empty tuple");
  std::vector<nat> es(m);
  for (std::size_t i = m; i-- > 1;) {
    auto [hd, tl] = unpair(code);
    es[i] = tl;
    code = hd;
  }
  es[0] = code;
  return es;
}

}  // namespace masslab
