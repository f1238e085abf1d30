#include "masslab/witness.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "masslab/errors.hpp"
#include "masslab/pairing.hpp"

namespace masslab::witness {

using json = nlohmann::ordered_json;

// =============================================================================
// Homogeneous collapse
// =============================================================================

namespace {

// Challenge program for a surviving candidate set: dovetails the least
// <e,t> (in shared-pairing order) with e alive, probing candidate e on the
// oracle truncated to t with budget t.
std::string collapse_asm(const std::vector<ProgramIndex>& programs,
                         const std::vector<std::size_t>& alive) {
  std::ostringstream s;
  s << "arity 1\n";
  s << "  mov r5 r0\n";       // x
  s << "  loadi r1 0\n";      // c
  s << "  loadi r4 1\n";      // one
  s << "cloop:\n";
  s << "  loadi r2 0\n";      // m := 0
  s << "isq:\n";
  s << "  add r6 r2 r4\n";
  s << "  mul r7 r6 r6\n";
  s << "  sub r7 r7 r1\n";
  s << "  jnz r7 idone\n";
  s << "  mov r2 r6\n";
  s << "  jmp isq\n";
  s << "idone:\n";
  s << "  mul r6 r2 r2\n";
  s << "  sub r6 r1 r6\n";    // rr := c - m*m
  s << "  sub r7 r2 r6\n";    // m - rr
  s << "  jnz r7 lt\n";
  s << "  sub r3 r6 r2\n";    // e := m (in r2), t := rr - m
  s << "  jmp memb\n";
  s << "lt:\n";
  s << "  mov r3 r2\n";       // t := m
  s << "  mov r2 r6\n";       // e := rr
  s << "memb:\n";
  for (std::size_t a : alive) {
    s << "  loadi r6 " << a << "\n";
    s << "  sub r7 r2 r6\n";
    s << "  jnz r7 skip" << a << "\n";
    s << "  sub r7 r6 r2\n";
    s << "  jnz r7 skip" << a << "\n";
    s << "  loadi r6 " << programs.at(a) << "\n";
    s << "  univb r6 r5 r3\n";
    s << "  jnz r0 found\n";
    s << "skip" << a << ":\n";
  }
  s << "  add r1 r1 r4\n";
  s << "  jmp cloop\n";
  s << "found:\n";
  s << "  sub r0 r0 r4\n";
  s << "  halt r0\n";
  return s.str();
}

}  // namespace

std::optional<std::pair<std::size_t, nat>> collapse_search(
    const kernel::Machine& m, const std::vector<ProgramIndex>& programs,
    const std::vector<std::size_t>& alive, const Word& g, nat x, nat pair_cap) {
  for (nat c = 0; c < pair_cap; ++c) {
    auto [e, t] = unpair(c);
    if (std::find(alive.begin(), alive.end(), e) == alive.end()) continue;
    kernel::Outcome o = m.phi(programs.at(e), prefix(g, t), x, t);
    if (o.halted()) return std::make_pair(static_cast<std::size_t>(e), t);
  }
  return std::nullopt;
}

Learner homog_collapse_learner(kernel::Machine& m, const CollapseSetup& setup) {
  struct Snapshot {
    std::vector<std::size_t> alive;
    ProgramIndex guess = 0;
  };
  struct State {
    kernel::Machine* machine;
    CollapseSetup setup;
    std::map<std::vector<std::size_t>, ProgramIndex> delta_cache;
    std::map<Word, Snapshot> snapshots;  // challenge state per observed prefix
    ProgramIndex delta(const std::vector<std::size_t>& alive) {
      auto it = delta_cache.find(alive);
      if (it != delta_cache.end()) return it->second;
      ProgramIndex idx = machine->add(collapse_asm(setup.programs, alive));
      delta_cache.emplace(alive, idx);
      return idx;
    }
  };
  auto st = std::make_shared<State>();
  st->machine = &m;
  st->setup = setup;

  Learner L;
  L.descriptor = "homog-collapse(b=" + std::to_string(setup.programs.size()) + ")";
  L.guess = [st](const Word& gv) -> ProgramIndex {
    const auto& setup = st->setup;
    const kernel::Machine& m = *st->machine;
    // the dovetail's t component never exceeds the shell index, so capping
    // the shell bounds the mirror search
    const nat tcap = 96;
    const nat pair_cap = (tcap + 1) * (tcap + 1);

    // resume from the longest cached prefix of the observation
    Snapshot snap;
    std::size_t from = 0;
    {
      snap.alive.resize(setup.programs.size());
      for (std::size_t i = 0; i < snap.alive.size(); ++i) snap.alive[i] = i;
      snap.guess = st->delta(snap.alive);
      for (std::size_t l = gv.size(); l > 0; --l) {
        auto it = st->snapshots.find(prefix(gv, l));
        if (it != st->snapshots.end()) {
          snap = it->second;
          from = l;
          break;
        }
      }
    }
    for (std::size_t u = from + 1; u <= gv.size(); ++u) {
      Word gu = prefix(gv, u);
      if (!snap.alive.empty()) {
        Word out = m.output_prefix(snap.guess, gu, setup.refute_budget, u);
        for (std::size_t x = 0; x < out.size(); ++x) {
          auto fx = setup.factor_approx(x, static_cast<nat>(u));
          if (std::find(fx.begin(), fx.end(), out[x]) != fx.end()) continue;
          // refuted at the least such x: retire the responsible candidate
          auto found = collapse_search(m, setup.programs, snap.alive, gu,
                                       static_cast<nat>(x), pair_cap);
          if (!found) break;  // cannot attribute; keep the guess
          snap.alive.erase(
              std::remove(snap.alive.begin(), snap.alive.end(), found->first),
              snap.alive.end());
          if (!snap.alive.empty()) snap.guess = st->delta(snap.alive);
          break;
        }
      }
      st->snapshots.emplace(gu, snap);
    }
    return snap.guess;
  };
  return L;
}

// =============================================================================
// DNR square reduction
// =============================================================================

namespace {

std::string gamma_piece_asm(nat v) {
  std::ostringstream s;
  s << "arity 1\n";
  s << "  loadi r1 " << v << "\n";
  s << "  sub r3 r0 r1\n";   // u - v
  s << "  jnz r3 xlty\n";
  s << "  mul r2 r1 r1\n";   // v >= u: p = v*v + v + u
  s << "  add r2 r2 r1\n";
  s << "  add r2 r2 r0\n";
  s << "  jmp zcomp\n";
  s << "xlty:\n";
  s << "  mul r2 r0 r0\n";   // v < u: p = u*u + v
  s << "  add r2 r2 r1\n";
  s << "zcomp:\n";
  s << "  mul r2 r2 r2\n";   // z = 2*p*p + 1
  s << "  add r2 r2 r2\n";
  s << "  loadi r4 1\n";
  s << "  add r2 r2 r4\n";
  s << "  oracle r5 r2\n";   // y := g(z)
  s << "  loadi r2 0\n";     // m := isqrt(y)
  s << "isq:\n";
  s << "  add r6 r2 r4\n";
  s << "  mul r7 r6 r6\n";
  s << "  sub r7 r7 r5\n";
  s << "  jnz r7 idone\n";
  s << "  mov r2 r6\n";
  s << "  jmp isq\n";
  s << "idone:\n";
  s << "  mul r6 r2 r2\n";
  s << "  sub r6 r5 r6\n";   // rr := y - m*m
  s << "  sub r7 r2 r6\n";   // m - rr
  s << "  jnz r7 rless\n";
  s << "  sub r0 r6 r2\n";   // rr >= m: second = rr - m
  s << "  halt r0\n";
  s << "rless:\n";
  s << "  mov r0 r2\n";      // rr < m: second = m
  s << "  halt r0\n";
  return s.str();
}

std::string fallback_asm(nat v) {
  std::ostringstream s;
  s << "arity 1\n";
  s << "  loadi r4 1\n";
  s << "  loadi r1 0\n";     // t
  s << "tloop:\n";
  s << "  loadi r2 0\n";     // u
  s << "uloop:\n";
  s << "  mov r6 r2\n";
  s << "  univz r6 r6 r1\n"; // r0 := 1 + Phi_u(u) within t steps, or 0
  s << "  jz r0 nextu\n";
  s << "  mov r5 r0\n";
  s << "  loadi r3 " << v << "\n";
  s << "  sub r7 r2 r3\n";   // u - v
  s << "  jnz r7 dlty\n";
  s << "  mul r6 r3 r3\n";
  s << "  add r6 r6 r3\n";
  s << "  add r6 r6 r2\n";
  s << "  jmp dz\n";
  s << "dlty:\n";
  s << "  mul r6 r2 r2\n";
  s << "  add r6 r6 r3\n";
  s << "dz:\n";
  s << "  mul r6 r6 r6\n";
  s << "  add r6 r6 r6\n";
  s << "  add r6 r6 r4\n";   // z(v,u)
  s << "  oracle r7 r6\n";   // y := g(z)
  s << "  loadi r3 0\n";     // m := isqrt(y)
  s << "disq:\n";
  s << "  add r6 r3 r4\n";
  s << "  mul r0 r6 r6\n";
  s << "  sub r0 r0 r7\n";
  s << "  jnz r0 ddone\n";
  s << "  mov r3 r6\n";
  s << "  jmp disq\n";
  s << "ddone:\n";
  s << "  mul r6 r3 r3\n";
  s << "  sub r6 r7 r6\n";   // rr := y - m*m
  s << "  sub r0 r3 r6\n";   // m - rr
  s << "  jnz r0 drless\n";
  s << "  sub r0 r6 r3\n";   // rr >= m: first = m, second = rr - m
  s << "  add r0 r0 r4\n";
  s << "  sub r7 r0 r5\n";
  s << "  jnz r7 nextu\n";
  s << "  sub r7 r5 r0\n";
  s << "  jnz r7 nextu\n";
  s << "  mov r0 r3\n";      // matched falsifier: halt with g_0(z(v,u))
  s << "  halt r0\n";
  s << "drless:\n";
  s << "  add r0 r3 r4\n";   // rr < m: first = rr, second = m
  s << "  sub r7 r0 r5\n";
  s << "  jnz r7 nextu\n";
  s << "  sub r7 r5 r0\n";
  s << "  jnz r7 nextu\n";
  s << "  mov r0 r6\n";
  s << "  halt r0\n";
  s << "nextu:\n";
  s << "  add r2 r2 r4\n";
  s << "  sub r6 r2 r1\n";   // u - t
  s << "  jz r6 uloop\n";
  s << "  add r1 r1 r4\n";
  s << "  jmp tloop\n";
  return s.str();
}

}  // namespace

bool DnrSquareSchedule::guard_refuted(const kernel::Machine& m, const Word& g,
                                      nat v, nat u_bound, nat budget) const {
  for (nat u = 0; u < u_bound; ++u) {
    kernel::Outcome o = m.phi(u, {}, u, budget);
    if (!o.halted()) continue;
    nat z = kernel::diag_pair(v, u);
    if (z >= g.size()) continue;  // unreadable: not yet refuted at this depth
    if (unpair_second(g[z]) == o.value) return true;
  }
  return false;
}

std::optional<nat> DnrSquareSchedule::active_piece(const kernel::Machine& m,
                                                   const Word& g, nat u_bound,
                                                   nat budget) const {
  for (const DnrSquarePiece& p : pieces)
    if (!guard_refuted(m, g, p.v, u_bound, budget)) return p.v;
  return std::nullopt;
}

Word DnrSquareSchedule::evaluate(const kernel::Machine& m, const Word& g,
                                 nat u_bound, nat budget, std::size_t out_cap) const {
  auto v = active_piece(m, g, u_bound, budget);
  if (!v) return {};
  return m.output_prefix(pieces.at(*v).gamma, g, budget, out_cap);
}

DnrSquareSchedule dnr_square_reduction(kernel::Machine& m, nat k, nat piece_cap) {
  DnrSquareSchedule sched;
  sched.k = k;
  for (nat v = 0; v < piece_cap; ++v) {
    DnrSquarePiece piece;
    piece.v = v;
    piece.gamma = m.add(gamma_piece_asm(v));
    piece.fallback = m.add(fallback_asm(v));
    sched.pieces.push_back(piece);
  }
  return sched;
}

// =============================================================================
// Noncupping extraction
// =============================================================================

namespace {

// Enumerates the words of a class-tree up to `depth` (all lengths), sorted.
std::vector<Word> tree_words(const ClosedClass& P, std::size_t depth, std::size_t cap) {
  std::vector<Word> out;
  if (!P.member({})) return out;
  out.push_back({});
  std::size_t begin = 0;
  for (std::size_t d = 0; d < depth; ++d) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      nat bound = P.branch_bound(d);
      for (nat j = 0; j < bound; ++j) {
        Word child = cat(out[i], j);
        if (!P.member(child)) continue;
        if (out.size() >= cap) throw resource_error("tree enumeration cap exceeded");
        out.push_back(std::move(child));
      }
    }
    begin = end;
  }
  std::sort(out.begin(), out.end(), length_lex_less);
  return out;
}

std::vector<Word> word_set_leaves(const std::vector<Word>& tree) {
  std::set<Word> nodes(tree.begin(), tree.end());
  std::vector<Word> leaves;
  for (const Word& w : tree) {
    bool extended = false;
    for (const Word& v : tree)
      if (v.size() == w.size() + 1 && is_prefix(w, v)) {
        extended = true;
        break;
      }
    if (!extended) leaves.push_back(w);
  }
  std::sort(leaves.begin(), leaves.end(), length_lex_less);
  return leaves;
}

struct ExtractCore {
  std::vector<std::vector<Word>> E_trees, D_trees;
  std::vector<std::pair<Word, std::size_t>> lengths;
  std::vector<Word> violations;
  std::vector<Word> D_union;
};

// The D/E rounds shared by the anticupping extraction and its uniformization:
// E_0 is the base tree; D_{i+1} is the image of (base ^ D_i); the image of a
// word sigma is taken at step |sigma interleaved with g|.
ExtractCore extract_rounds(const std::function<Word(const Word&)>& apply,
                           const ClosedClass& base, const ClosedClass& V_P,
                           std::size_t rounds, std::size_t horizon, std::size_t cap) {
  ExtractCore core;
  std::vector<Word> base_tree = tree_words(base, horizon, cap);
  std::vector<Word> base_leaves = word_set_leaves(base_tree);
  std::set<Word> d_union;
  std::vector<Word> E = base_tree;
  for (std::size_t i = 0; i <= rounds; ++i) {
    core.E_trees.push_back(E);
    std::set<Word> D;
    for (const Word& sigma : E) {
      Word img = apply(sigma);
      core.lengths.emplace_back(sigma, img.size());
      if (!V_P.member(img)) {
        core.violations.push_back(sigma);
        continue;
      }
      for (std::size_t l = 0; l <= img.size(); ++l) D.insert(prefix(img, l));
    }
    std::vector<Word> Dv(D.begin(), D.end());
    std::sort(Dv.begin(), Dv.end(), length_lex_less);
    core.D_trees.push_back(Dv);
    d_union.insert(Dv.begin(), Dv.end());
    if (i == rounds) break;
    // E_{i+1} = base ^ D_i
    std::set<Word> nextE(base_tree.begin(), base_tree.end());
    for (const Word& rho : base_leaves)
      for (const Word& d : Dv) {
        if (rho.size() + d.size() > horizon) continue;
        nextE.insert(cat(rho, d));
        if (nextE.size() > cap) throw resource_error("extraction tree cap exceeded");
      }
    E.assign(nextE.begin(), nextE.end());
    std::sort(E.begin(), E.end(), length_lex_less);
  }
  core.D_union.assign(d_union.begin(), d_union.end());
  std::sort(core.D_union.begin(), core.D_union.end(), length_lex_less);
  return core;
}

// Dead-end-free extension: repeatedly jump to the length-lex least strict
// extension inside D.
Word extract_path(const std::vector<Word>& D, std::size_t depth, bool* reached) {
  Word cur;
  bool progress = true;
  while (cur.size() < depth && progress) {
    progress = false;
    for (const Word& w : D) {
      if (w.size() <= cur.size()) continue;
      if (!is_prefix(cur, w)) continue;
      cur = prefix(w, std::min(depth, w.size()));
      progress = true;
      break;
    }
  }
  if (reached) *reached = cur.size() >= depth;
  return cur;
}

}  // namespace

NoncupResult noncup_extract(const kernel::Machine& m, ProgramIndex phi,
                            const ClosedClass& V_P, const ClosedClass& V_Q,
                            const Word& g, const NoncupOptions& opt) {
  if (g.size() < opt.horizon)
    throw shape_error("noncup_extract: g shorter than the enumeration horizon");
  auto apply = [&m, phi, &g, &opt](const Word& sigma) {
    Word w = interleave(sigma, prefix(g, sigma.size()));
    return m.output_prefix(phi, w, w.size(), opt.out_cap);
  };
  ExtractCore core =
      extract_rounds(apply, V_Q, V_P, opt.rounds, opt.horizon, opt.tree_cap);
  NoncupResult res;
  res.E_trees = std::move(core.E_trees);
  res.D_trees = std::move(core.D_trees);
  res.lengths = std::move(core.lengths);
  res.violations = std::move(core.violations);
  res.extracted = extract_path(core.D_union, opt.depth, &res.reached_depth);
  return res;
}

// =============================================================================
// Locking-sequence learner over hyperconcatenation
// =============================================================================

namespace {

// rho must consist of complete leaf blocks of P separated by symbols spelling
// tau; returns tau if the decomposition exists with tau extendible in Q.
std::optional<Word> full_block_decomposition(const ClosedClass& P, const ClosedClass& Q,
                                             const Word& rho, std::size_t depth_cap) {
  std::function<std::optional<Word>(std::size_t, const Word&)> go =
      [&](std::size_t pos, const Word& q) -> std::optional<Word> {
    if (pos == rho.size()) return q;
    for (std::size_t l = rho.size() - pos; l >= 1; --l) {
      if (pos + l >= rho.size() + 1) continue;
      Word blk(rho.begin() + pos, rho.begin() + pos + l);
      if (!trees::is_leaf(P, blk)) continue;
      if (pos + l >= rho.size()) continue;  // block must be followed by a separator
      Word q2 = cat(q, rho[pos + l]);
      if (!Q.member(q2)) continue;
      if (auto r = go(pos + l + 1, q2)) return r;
    }
    return std::nullopt;
  };
  auto tau = go(0, {});
  if (!tau) return std::nullopt;
  std::size_t d = std::max(depth_cap, tau->size());
  if (!trees::ext_approx(Q, *tau, d)) return std::nullopt;
  return tau;
}

// rho ^ T_P ^ <sep> ^ T_P as a class (for the guard's stability condition).
ClosedClass guard_block_class(const ClosedClass& P, const Word& rho, nat sep) {
  ClosedClass one;  // T_P ^ <sep>: P's tree with the separator glued below leaves
  one.member = [P, sep](const Word& w) {
    if (P.member(w)) return true;
    if (w.empty() || w.back() != sep) return false;
    return trees::is_leaf(P, pred(w));
  };
  auto bp = P.branch_bound;
  one.branch_bound = [bp, sep](std::size_t d) { return std::max(bp(d), sep + 1); };
  one.label = "block";
  ClosedClass two = concat::concat_op(one, P);
  return trees::shift(rho, two);
}

}  // namespace

bool hyper_guard_holds(const kernel::Machine&, const Learner& psi,
                       const ClosedClass& P, const ClosedClass& Q, const Word& g,
                       const Word& rho, nat sep, const HyperLearnerOptions& opt) {
  // (1) rho decomposes into complete leaf blocks spelling tau in T_Q^ext
  auto tau = full_block_decomposition(P, Q, rho, opt.depth_cap);
  if (!tau) return false;
  // (2) tau ^ <sep> stays extendible
  Word tau2 = cat(*tau, sep);
  if (!trees::ext_approx(Q, tau2, std::max(opt.depth_cap, tau2.size()))) return false;
  // (3) the guess is locked on (rho ^ T_P ^ <sep> ^ T_P) interleaved with g
  ProgramIndex locked = psi.guess(interleave(rho, prefix(g, rho.size())));
  ClosedClass blocks = guard_block_class(P, rho, sep);
  std::size_t max_len = std::min(opt.guard_enum + rho.size(), g.size());
  std::vector<Word> words = tree_words(blocks, max_len, 100'000);
  for (const Word& sigma : words) {
    if (psi.guess(interleave(sigma, prefix(g, sigma.size()))) != locked) return false;
    if (sigma.size() > 0 && sigma.size() <= g.size()) {
      Word odd = interleave(sigma, prefix(g, sigma.size() - 1));
      if (psi.guess(odd) != locked) return false;
    }
  }
  return true;
}

Learner hyperconcat_learner(kernel::Machine& m, const Learner& psi,
                            const ClosedClass& P, const ClosedClass& Q,
                            const HyperLearnerOptions& opt,
                            std::shared_ptr<HyperLearnerState> state) {
  struct Shared {
    kernel::Machine* machine;
    Learner psi;
    ClosedClass P, Q;
    HyperLearnerOptions opt;
    std::shared_ptr<HyperLearnerState> st;
    std::map<std::pair<Word, nat>, ProgramIndex> theta_cache;
    std::vector<Word> rho_pool;

    // The uniformized extraction: a native functional computing, from oracle
    // g, the path pulled out of the D-trees for the locked functional at
    // (rho, sep).
    ProgramIndex theta(const Word& rho, nat sep) {
      auto key = std::make_pair(rho, sep);
      auto it = theta_cache.find(key);
      if (it != theta_cache.end()) return it->second;
      kernel::Machine* mach = machine;
      Learner psi_ = psi;
      ClosedClass P_ = P;
      nat sep_ = sep;
      Word rho_ = rho;
      NoncupOptions xopt = opt.extract;
      kernel::NativeFn fn = [mach, psi_, P_, rho_, sep_, xopt](
                                const Word& oracle, nat input,
                                nat budget) -> kernel::Outcome {
        kernel::Outcome out;
        nat meter = 0;
        auto charge = [&](nat c) {
          meter += c;
          return meter <= budget;
        };
        if (!charge(1) || oracle.size() < xopt.horizon) {
          out.steps = budget;
          return out;
        }
        ProgramIndex locked = psi_.guess(interleave(rho_, prefix(oracle, rho_.size())));
        // V_P^sep: P's tree with the separator glued below its leaves
        ClosedClass base;
        base.member = [P_, sep_](const Word& w) {
          if (P_.member(w)) return true;
          if (w.empty() || w.back() != sep_) return false;
          return trees::is_leaf(P_, pred(w));
        };
        auto bp = P_.branch_bound;
        base.branch_bound = [bp, sep_](std::size_t d) { return std::max(bp(d), sep_ + 1); };
        base.label = "V_P^m";
        bool ok = true;
        auto apply = [&](const Word& sigma) -> Word {
          Word shifted = cat(rho_, sigma);
          if (shifted.size() > oracle.size()) return {};
          Word w = interleave(shifted, prefix(oracle, shifted.size()));
          Word img;
          for (std::size_t x = 0; x < xopt.out_cap; ++x) {
            kernel::Outcome o = mach->phi(locked, w, x, w.size());
            if (!charge(o.steps + 1)) {
              ok = false;
              break;
            }
            if (!o.halted()) break;
            img.push_back(o.value);
          }
          return img;
        };
        ExtractCore core;
        try {
          core = extract_rounds(apply, base, P_, xopt.rounds, xopt.horizon, xopt.tree_cap);
        } catch (const resource_error&) {
          out.steps = budget;
          return out;
        }
        if (!ok) {  // budget exhausted mid-extraction
          out.steps = budget;
          return out;
        }
        Word path = extract_path(core.D_union, xopt.depth, nullptr);
        if (input >= path.size()) {
          out.steps = budget;
          return out;
        }
        out.tag = kernel::Outcome::Tag::halted;
        out.value = path[input];
        out.steps = std::min<nat>(meter, budget);
        // the extraction considers oracle cells up to the interleaved horizon
        out.touched = 2 * (rho_.size() + xopt.horizon);
        return out;
      };
      ProgramIndex idx = machine->add_native(fn);
      theta_cache.emplace(key, idx);
      return idx;
    }

    const Word& rho_at(std::size_t rank) {
      while (rho_pool.size() <= rank) {
        // length-lex enumeration of binary words
        Word next;
        std::size_t n = rho_pool.size();
        std::size_t len = 0, count = 1, acc = 0;
        while (acc + count <= n) {
          acc += count;
          ++len;
          count <<= 1;
        }
        std::size_t off = n - acc;
        for (std::size_t i = 0; i < len; ++i)
          next.push_back((off >> (len - 1 - i)) & 1);
        rho_pool.push_back(next);
      }
      return rho_pool[rank];
    }
  };

  auto sh = std::make_shared<Shared>();
  sh->machine = &m;
  sh->psi = psi;
  sh->P = P;
  sh->Q = Q;
  sh->opt = opt;
  sh->st = state;

  Learner L;
  L.descriptor = "hyperconcat-learner";
  L.guess = [sh](const Word& gv) -> ProgramIndex {
    const HyperLearnerOptions& opt = sh->opt;
    std::size_t challenges = 0;
    // lexicographic enumeration: length-lex on rho, then the separator
    for (std::size_t r = 0; r < opt.rho_cap; ++r) {
      const Word& rho = sh->rho_at(r);
      for (nat mm = 0; mm < opt.m_cap; ++mm) {
        if (hyper_guard_holds(*sh->machine, sh->psi, sh->P, sh->Q, gv, rho, mm, opt)) {
          if (sh->st) {
            sh->st->challenges = std::max(sh->st->challenges, challenges + 1);
            sh->st->exhausted = false;
          }
          return sh->theta(rho, mm);
        }
        ++challenges;
      }
    }
    if (sh->st) sh->st->exhausted = true;
    return kernel::const_index(0);  // inconclusive: every guard refuted at cap
  };
  return L;
}

// =============================================================================
// Sigma02 union learner
// =============================================================================

Learner sigma2_union_learner(kernel::Machine& m, const std::vector<ClosedClass>& Ps) {
  if (Ps.empty()) throw shape_error("sigma2_union_learner: empty family");
  std::vector<ProgramIndex> tag_progs;
  for (std::size_t i = 0; i <= Ps.size(); ++i) {
    std::ostringstream s;
    s << "arity 1\n";
    s << "  jnz r0 tail\n";
    s << "  loadi r0 " << i << "\n";
    s << "  halt r0\n";
    s << "tail:\n";
    s << "  loadi r1 1\n";
    s << "  sub r2 r0 r1\n";
    s << "  oracle r0 r2\n";
    s << "  halt r0\n";
    tag_progs.push_back(m.add(s.str()));
  }
  Learner L;
  L.descriptor = "sigma2-union";
  std::vector<ClosedClass> fam = Ps;
  L.guess = [fam, tag_progs](const Word& fn) -> ProgramIndex {
    for (std::size_t i = 0; i < fam.size(); ++i)
      if (fam[i].member(fn)) return tag_progs[i];
    return tag_progs[fam.size()];  // outside every layer at this depth
  };
  return L;
}

// =============================================================================
// Timekeeper construction
// =============================================================================

TimekeeperResult timekeeper_build(const kernel::Machine& m, const ClosedClass& P,
                                  const ClosedClass& Q,
                                  const std::vector<ProgramIndex>& opponents,
                                  const TimekeeperOptions& opt) {
  std::vector<Word> leaves = trees::leaves_upto(P, opt.leaf_depth);
  if (leaves.size() < opt.strategies)
    throw hypothesis_violation("timekeeper_build: base class has too few leaves");

  TimekeeperResult res;
  std::string transcript;
  std::vector<Word> tau(opt.strategies);
  std::vector<Word> tn(opt.strategies);
  res.tau.assign(opt.strategies, {});
  for (std::size_t n = 0; n < opt.strategies; ++n) {
    tau[n] = leaves[n];
    res.tau[n].push_back(tau[n]);
  }

  auto phi_out = [&](ProgramIndex e, const Word& sigma) {
    return m.output_prefix(e, sigma, sigma.size(), opt.out_cap);
  };

  for (nat s = 0; s < opt.stages; ++s) {
    for (std::size_t n = 0; n < opt.strategies; ++n) {
      // R_n acts if some opponent e < n extends its output inside T_Q below
      // a stage-bounded extension of tau_n
      bool acted = false;
      std::vector<Word> probes = tree_words(P, std::min<std::size_t>(s + 1, opt.leaf_depth),
                                            200'000);
      for (std::size_t e = 0; e < std::min<std::size_t>(n, opponents.size()) && !acted; ++e) {
        Word base_out = phi_out(opponents[e], tau[n]);
        for (const Word& rho : probes) {
          Word ext = cat(tau[n], rho);
          Word out = phi_out(opponents[e], ext);
          if (out.size() <= base_out.size() || !is_prefix(base_out, out)) continue;
          if (!Q.member(out)) continue;
          // act: extend through a full leaf block containing the witness
          std::optional<Word> leaf_ext;
          for (const Word& lf : trees::leaves_upto(P, opt.leaf_depth))
            if (is_prefix(rho, lf)) {
              leaf_ext = lf;
              break;
            }
          if (!leaf_ext) continue;
          Word old = tau[n];
          tau[n] = cat(tau[n], *leaf_ext);
          // the timekeeper records lengths in the grafted copy's own
          // coordinates (below the n-th leaf), keeping tau inside P^(t_n)
          tn[n].push_back(tau[n].size() - leaves[n].size());
          res.tau[n].push_back(tau[n]);
          json j;
          j["stage"] = s + 1;
          j["actor"] = "R" + std::to_string(n);
          j["action"] = "extend";
          j["opponent"] = e;
          j["tau_old"] = show(old);
          j["tau_new"] = show(tau[n]);
          j["t_n"] = show(tn[n]);
          transcript += j.dump() + "\n";
          acted = true;
          break;
        }
      }
      if (!acted) {
        json j;
        j["stage"] = s + 1;
        j["actor"] = "R" + std::to_string(n);
        j["action"] = "idle";
        transcript += j.dump() + "\n";
      }
    }
  }

  res.keeper.t = tn;
  res.keeper.provenance = "timekeeper over " + P.label + " vs " + Q.label;
  std::vector<ClosedClass> delayed;
  for (std::size_t n = 0; n < opt.strategies; ++n)
    delayed.push_back(concat::delayed_derivative(P, tn[n]));
  res.hat = concat::concat_family(
      P, [delayed](std::size_t n) { return delayed[std::min(n, delayed.size() - 1)]; },
      "hat(" + P.label + ")");
  res.transcript = std::move(transcript);
  return res;
}

// =============================================================================
// Priority construction
// =============================================================================

PriorityResult priority_hat(const kernel::Machine& m, const ClosedClass& P,
                            const ClosedClass& Q,
                            const std::vector<std::vector<Learner>>& teams,
                            const ClosedClass& base, const PriorityOptions& opt) {
  PriorityResult res;
  std::string transcript;

  std::vector<Word> base_leaves = trees::leaves_upto(base, 8);
  if (base_leaves.size() < teams.size())
    throw hypothesis_violation("priority_hat: base class has too few leaves");

  // T_s as an explicit prefix-closed word set
  std::set<Word> T{{Word{}}};
  nat h = 0;

  struct Strategy {
    std::map<Word, Word> gamma;              // alpha in T_P -> node
    std::map<Word, std::set<std::size_t>> M; // partition cells
  };
  std::vector<Strategy> strat(teams.size());
  for (std::size_t e = 0; e < teams.size(); ++e) {
    strat[e].gamma[{}] = base_leaves[e];
    std::set<std::size_t> all;
    for (std::size_t i = 0; i < teams[e].size(); ++i) all.insert(i);
    strat[e].M[{}] = all;
    for (std::size_t l = 0; l <= base_leaves[e].size(); ++l) T.insert(prefix(base_leaves[e], l));
    h = std::max<nat>(h, base_leaves[e].size());
  }

  auto loa = [&](const std::vector<Learner>& team, std::size_t i, const Word& tau) {
    ProgramIndex e = team[i].guess(tau);
    Word out = m.output_prefix(e, tau, tau.size(), opt.out_cap);
    std::size_t l = out.size();
    while (l > 0 && !Q.member(prefix(out, l))) --l;
    return l;
  };

  auto changes_on = [&](const std::vector<Learner>& team, std::size_t i,
                        const Word& lo, const Word& hi) {
    // a mind change strictly inside (lo, hi]
    for (std::size_t n = lo.size() + 1; n <= hi.size(); ++n)
      if (team[i].guess(prefix(hi, n)) != team[i].guess(prefix(hi, n - 1))) return true;
    return false;
  };

  auto record = [&](nat stage, std::size_t e, const std::string& action, json extra) {
    json j;
    j["stage"] = stage;
    j["actor"] = "team" + std::to_string(e);
    j["action"] = action;
    for (auto& [k, v] : extra.items()) j[k] = v;
    transcript += j.dump() + "\n";
  };

  auto tp_nodes = [&](std::size_t depth) { return tree_words(P, depth, opt.cap_nodes); };

  for (nat s = 0; s + 1 <= opt.stages; ++s) {
    std::size_t alpha_depth = s;
    std::vector<Word> nodes = tp_nodes(std::min<std::size_t>(alpha_depth, 30));
    std::vector<Word> length_s;
    for (const Word& a : nodes)
      if (a.size() == alpha_depth) length_s.push_back(a);

    std::vector<Word> Ts_at_h;
    for (const Word& w : T)
      if (w.size() == h) Ts_at_h.push_back(w);
    std::sort(Ts_at_h.begin(), Ts_at_h.end());

    for (std::size_t e = 0; e < teams.size(); ++e) {
      Strategy& st = strat[e];
      const auto& team = teams[e];
      if (team.empty()) continue;

      // attention detection
      struct Attn {
        Word beta;
        std::size_t learner;
        Word tau;
        bool change;
      };
      std::vector<Attn> acts;
      std::set<Word> R_star;
      for (const Word& alpha : length_s) {
        std::optional<std::size_t> m_alpha;
        for (std::size_t mlen = 0; mlen <= alpha.size(); ++mlen) {
          Word beta = prefix(alpha, mlen);
          auto mit = st.M.find(beta);
          if (mit == st.M.end() || mit->second.empty()) continue;
          auto git = st.gamma.find(beta);
          if (git == st.gamma.end()) continue;
          const Word& gb = git->second;
          bool needs_attn = false;
          for (std::size_t i : mit->second) {
            for (const Word& tau : Ts_at_h) {
              if (!is_prefix(gb, tau)) continue;
              std::size_t prev = 0;
              for (std::size_t l = 0; l <= gb.size(); ++l)
                prev = std::max(prev, loa(team, i, prefix(gb, l)));
              if (changes_on(team, i, gb, tau) || loa(team, i, tau) > prev) {
                needs_attn = true;
                break;
              }
            }
            if (needs_attn) break;
          }
          if (needs_attn) {
            m_alpha = mlen;
            break;
          }
        }
        if (m_alpha) R_star.insert(prefix(alpha, *m_alpha));
      }

      // for each beta in R_s^*: pick the least acting learner and its witness
      for (const Word& beta : R_star) {
        const Word& gb = st.gamma.at(beta);
        std::optional<std::size_t> chosen;
        for (std::size_t i : st.M.at(beta)) {
          bool req = false;
          for (const Word& tau : Ts_at_h) {
            if (!is_prefix(gb, tau)) continue;
            std::size_t prev = 0;
            for (std::size_t l = 0; l <= gb.size(); ++l)
              prev = std::max(prev, loa(team, i, prefix(gb, l)));
            if (changes_on(team, i, gb, tau) || loa(team, i, tau) > prev) {
              req = true;
              break;
            }
          }
          if (req) {
            chosen = i;
            break;
          }
        }
        if (!chosen) continue;
        Word tau_beta;
        bool change = false;
        for (const Word& tau : Ts_at_h) {
          if (!is_prefix(gb, tau)) continue;
          std::size_t prev = 0;
          for (std::size_t l = 0; l <= gb.size(); ++l)
            prev = std::max(prev, loa(team, *chosen, prefix(gb, l)));
          if (changes_on(team, *chosen, gb, tau) || loa(team, *chosen, tau) > prev) {
            tau_beta = tau;
            change = changes_on(team, *chosen, gb, tau);
            break;  // lexicographically least (Ts_at_h is sorted)
          }
        }
        acts.push_back({beta, *chosen, tau_beta, change});
      }

      // apply M and gamma updates
      for (const Attn& a : acts) {
        if (a.change) {
          st.M[a.beta].erase(a.learner);
          for (nat i = 0; i < P.branch_bound(a.beta.size()); ++i) {
            Word child = cat(a.beta, i);
            if (!P.member(child)) continue;
            st.M[child].insert(a.learner);
          }
          record(s + 1, e, "mind-change",
                 {{"beta", show(a.beta)}, {"learner", a.learner}, {"tau", show(a.tau)}});
        } else {
          record(s + 1, e, "expansionary",
                 {{"beta", show(a.beta)}, {"learner", a.learner}, {"tau", show(a.tau)}});
        }
        // rebase every descendant of beta onto tau(beta)
        for (const Word& alpha : nodes) {
          if (!is_prefix(a.beta, alpha)) continue;
          Word sfx = suffix_from(alpha, a.beta.size());
          st.gamma[alpha] = cat(a.tau, sfx);
        }
      }

      // pad gamma at the active height and seed the next level
      for (const Word& alpha : length_s) {
        Word galpha = st.gamma.count(alpha) ? st.gamma.at(alpha) : Word{};
        if (galpha.empty()) continue;
        Word gstar = galpha;
        if (gstar.size() < h) {
          // lexicographically least T_s node of length h extending it
          for (const Word& tau : Ts_at_h)
            if (is_prefix(gstar, tau)) {
              gstar = tau;
              break;
            }
        }
        for (nat i = 0; i < P.branch_bound(alpha.size()); ++i) {
          Word child = cat(alpha, i);
          if (!P.member(child)) continue;
          st.gamma[child] = cat(gstar, i);
          if (!st.M.count(child)) st.M[child] = {};
        }
      }
    }

    // new active height and the padded stage tree
    nat h_next = h;
    std::vector<Word> next_level = tp_nodes(std::min<std::size_t>(alpha_depth + 1, 30));
    for (std::size_t e = 0; e < teams.size(); ++e)
      for (const Word& alpha : next_level)
        if (alpha.size() == alpha_depth + 1 && strat[e].gamma.count(alpha))
          h_next = std::max<nat>(h_next, strat[e].gamma.at(alpha).size());
    for (std::size_t e = 0; e < teams.size(); ++e)
      for (const Word& alpha : next_level) {
        if (alpha.size() != alpha_depth + 1 || !strat[e].gamma.count(alpha)) continue;
        Word g = strat[e].gamma.at(alpha);
        Word padded = g;
        while (padded.size() < h_next) padded.push_back(0);
        for (std::size_t l = 0; l <= padded.size(); ++l) T.insert(prefix(padded, l));
        if (T.size() > opt.cap_nodes) throw resource_error("priority_hat: tree cap");
      }
    h = h_next;
    res.heights.push_back(h);
    res.tree_sizes.push_back(T.size());

    // structural checks
    for (std::size_t e = 0; e < teams.size(); ++e) {
      const Strategy& st = strat[e];
      for (const Word& alpha : next_level) {
        if (alpha.size() != std::min<std::size_t>(alpha_depth + 1, 30)) continue;
        std::set<std::size_t> seen;
        std::size_t total = 0;
        for (std::size_t l = 0; l <= alpha.size(); ++l) {
          auto it = st.M.find(prefix(alpha, l));
          if (it == st.M.end()) continue;
          for (std::size_t i : it->second) {
            if (seen.count(i)) res.partition_ok = false;
            seen.insert(i);
            ++total;
          }
        }
        if (total != teams[e].size()) res.partition_ok = false;
      }
      for (const auto& [a1, g1] : st.gamma)
        for (const auto& [a2, g2] : st.gamma) {
          if (is_prefix(a1, a2) && !is_prefix(g1, g2)) res.gamma_monotone_ok = false;
          bool incomp = !is_prefix(a1, a2) && !is_prefix(a2, a1);
          if (incomp && (is_prefix(g1, g2) || is_prefix(g2, g1)))
            res.gamma_injective_ok = false;
        }
    }
  }

  // prefix closure check on the final tree
  for (const Word& w : T)
    if (!w.empty() && !T.count(pred(w))) res.tree_ok = false;

  res.transcript = std::move(transcript);
  return res;
}

// =============================================================================
// Forcing games
// =============================================================================

ForcingResult force_mind_changes(const kernel::Machine& m,
                                 const std::vector<Learner>& team,
                                 const std::vector<ClosedClass>& Ps,
                                 const tape::TapeWord& rho,
                                 const std::vector<Word>& extension_streams,
                                 const ForcingOptions& opt) {
  std::size_t t = team.size();
  std::size_t tapes = std::size_t{1} << t;
  if (Ps.size() != tapes)
    throw shape_error("force_mind_changes: need exactly 2^t factor classes");
  if (extension_streams.size() != tapes)
    throw shape_error("force_mind_changes: need one extension stream per tape");

  ForcingResult res;
  std::string transcript;
  res.mind_change_counts.assign(t, 0);

  tape::TapeWord g = rho;
  std::vector<std::size_t> pos(tapes);
  for (std::size_t i = 0; i < tapes; ++i) {
    Word pi = tape::proj(i, rho);
    if (!is_prefix(pi, extension_streams[i]))
      throw hypothesis_violation("force_mind_changes: stream " + std::to_string(i) +
                                 " does not extend the initial projection");
    pos[i] = pi.size();
  }

  nat j = g.empty() ? 0 : g.back().tape;
  std::vector<ProgramIndex> last_guess(t);
  std::vector<bool> have_guess(t, false);

  auto min_count = [&]() {
    nat mn = res.mind_change_counts.empty() ? 0 : res.mind_change_counts[0];
    for (nat c : res.mind_change_counts) mn = std::min(mn, c);
    return mn;
  };

  bool fired_ever = false;
  nat stage = 0;
  for (; stage < opt.stage_cap; ++stage) {
    if (min_count() >= opt.target_changes) break;
    if (pos[j] >= extension_streams[j].size())
      throw resource_error("force_mind_changes: extension stream exhausted on tape " +
                           std::to_string(j));
    g.push_back(tape::Entry{j, extension_streams[j][pos[j]++]});
    Word enc = tape::encode(g);

    // track learner mind changes as the observation grows
    for (std::size_t i = 0; i < t; ++i) {
      ProgramIndex cur = team[i].guess(enc);
      if (have_guess[i] && cur != last_guess[i]) ++res.mind_change_counts[i];
      last_guess[i] = cur;
      have_guess[i] = true;
    }
    if (min_count() >= opt.target_changes) break;  // done; no further switch

    // wait condition: some learner's current program commits to a tape index
    // whose bit agrees with the current declaration
    std::vector<std::size_t> committed;
    for (std::size_t i = 0; i < t; ++i) {
      kernel::Outcome o = m.phi(last_guess[i], enc, 0, opt.guess_budget);
      if (!o.halted()) continue;
      if (o.value >= tapes) continue;
      bool bit_cur = (j >> i) & 1;
      bool bit_out = (o.value >> i) & 1;
      if (bit_cur == bit_out) committed.push_back(i);
    }
    if (!committed.empty()) {
      fired_ever = true;
      nat j_next = j;
      for (std::size_t i : committed) j_next ^= (nat{1} << i);
      json rec;
      rec["stage"] = stage + 1;
      rec["actor"] = "adversary";
      rec["action"] = "switch";
      rec["committed"] = committed;
      rec["tape_from"] = j;
      rec["tape_to"] = j_next;
      transcript += rec.dump() + "\n";
      ++res.switches;
      j = j_next;
    }
  }

  res.g = g;
  res.achieved = min_count() >= opt.target_changes;
  res.stalled = !res.achieved && !fired_ever;
  res.stall_stage = res.stalled ? stage : 0;
  json fin;
  fin["stage"] = stage;
  fin["actor"] = "adversary";
  fin["action"] = res.achieved ? "achieved" : (res.stalled ? "stall" : "cap");
  fin["counts"] = res.mind_change_counts;
  fin["g"] = json::array();  // tape words travel as [tape, symbol] pairs
  for (const tape::Entry& e : g) fin["g"].push_back({e.tape, e.symbol});
  transcript += fin.dump() + "\n";
  res.transcript = std::move(transcript);
  return res;
}

}  // namespace masslab::witness
