#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "masslab/errors.hpp"
#include "masslab/pairing.hpp"
#include "masslab/word.hpp"

namespace masslab::kernel {

// ---------------------------------------------------------------------------
// A deterministic register machine with an oracle tape.
//
// Eight registers R0..R7 holding naturals; the input is placed in R0. Every
// executed instruction costs one step, including halt.  A computation
// "halts within budget s" iff its halt instruction executes as step <= s.
//
// The index space interleaves a registry of explicitly added programs with
// closed-form virtual families (diagonal pairing, constants, recursion-
// theorem fixpoints, s-m-n specializations, and native functionals), so that
// index arithmetic such as z(v,u) is computable both here and inside machine
// programs.
// ---------------------------------------------------------------------------

using ProgramIndex = nat;

enum class Op : std::uint8_t {
  nop = 0,
  loadi,   // loadi r k     R[r] := k
  mov,     // mov r s       R[r] := R[s]
  add,     // add r s t     R[r] := R[s] + R[t]
  sub,     // sub r s t     R[r] := R[s] - R[t], truncated at 0
  mul,     // mul r s t     R[r] := R[s] * R[t]
  half,    // half r s      R[r] := R[s] / 2
  jz,      // jz r n        if R[r] == 0 jump to instruction n
  jnz,     // jnz r n       if R[r] != 0 jump to instruction n
  jmp,     // jmp n         jump to instruction n
  oracle,  // oracle r s    R[r] := oracle[R[s]]; out-of-range read stops the run
  univ,    // univ r e x    R[r] := Phi_{R[e]}(oracle; R[x]) with the remaining budget
  univb,   // univb e x b   R0 := 1 + Phi_{R[e]}(oracle|R[b]; R[x]) if it halts
           //               within R[b] steps, else 0 (an atomic, budgeted probe)
  univz,   // univz e x b   as univb but the inner run gets the empty oracle
  halt,    // halt r        halt with value R[r]
};

constexpr int kRegisters = 8;

struct Instr {
  Op op = Op::nop;
  nat a = 0, b = 0, c = 0;
  friend bool operator==(const Instr&, const Instr&) = default;
  friend auto operator<=>(const Instr&, const Instr&) = default;
};

struct Program {
  nat arity = 1;
  std::vector<Instr> code;
  friend bool operator==(const Program&, const Program&) = default;
  friend auto operator<=>(const Program&, const Program&) = default;
};

struct Outcome {
  enum class Tag { halted, still_running, oracle_out_of_range };
  Tag tag = Tag::still_running;
  nat value = 0;       // meaningful only when halted
  nat steps = 0;       // instrumentation: steps consumed
  nat touched = 0;     // instrumentation: 1 + highest oracle position attempted

  bool halted() const { return tag == Tag::halted; }
  // Semantic equality: instrumentation fields are not part of the outcome.
  bool same(const Outcome& o) const {
    return tag == o.tag && (tag != Tag::halted || value == o.value);
  }
};

std::string show(const Outcome& o);

// --- Godel numbering --------------------------------------------------------
// Canonical integer code for a program, as a self-delimiting bit stream
// rendered in hexadecimal ("0x...").  decode(encode(p)) == p exactly.
std::string godel_hex(const Program& p);
Program godel_parse_hex(const std::string& hex);  // throws decode_error

// --- Assembler --------------------------------------------------------------
// Deterministic two-way translation between Program and assembly text.
// Accepts labels ("loop:" / "jmp loop"); canonical output uses numeric
// targets.  Throws parse_error with line information.
Program assemble(const std::string& text);
std::string disassemble(const Program& p);

// --- Word <-> natural code (used by the s-m-n index family) ----------------
nat word_code(const Word& w);
Word word_decode(nat code);

// --- Virtual index families -------------------------------------------------
// Index layout:  2*slot            -> registry slot
//                2*pair(fam,pl)+1  -> virtual family fam with payload pl
enum class Family : nat { diag = 0, constant = 1, fix = 2, smn = 3, native = 4 };

nat family_index(Family f, nat payload);
std::optional<std::pair<Family, nat>> family_split(nat index);

// z(v,u): total, injective, computed without executing v or u.
// Phi_{z(v,u)}(z(v,u)) = <Phi_v(v), Phi_u(u)> whenever both sides halt.
inline ProgramIndex diag_pair(ProgramIndex v, ProgramIndex u) {
  return family_index(Family::diag, pair(v, u));
}

// Index of the program that ignores its input and halts with k.
inline ProgramIndex const_index(nat k) { return family_index(Family::constant, k); }

// A natively implemented functional (used for derived functionals whose
// step-level code would be unreasonable to hand-assemble).  It must be
// deterministic and respect its budget; `touched` reporting is its duty.
using NativeFn = std::function<Outcome(const Word& oracle, nat input, nat budget)>;

class Machine {
 public:
  // Registers a program; structurally identical programs get the same index.
  ProgramIndex add(const Program& p);
  ProgramIndex add(const std::string& assembly) { return add(assemble(assembly)); }
  ProgramIndex add_native(NativeFn fn);

  std::size_t slot_count() const { return slots_.size(); }
  const Program& slot(std::size_t i) const { return slots_.at(i); }

  // Synthesizes the program behind an index; nullopt for unregistered or
  // native/ill-formed indices.
  std::optional<Program> decode_index(ProgramIndex e) const;
  bool index_valid(ProgramIndex e) const;

  // Strict execution: throws decode_error on a malformed index.
  Outcome run(ProgramIndex e, const Word& oracle, nat input, nat budget) const;

  // The partial map Phi_e: a malformed index denotes the empty function, so
  // tree predicates built from Phi stay total.
  Outcome phi(ProgramIndex e, const Word& oracle, nat input, nat budget) const;

  // Phi(sigma; n): the canonical step-|sigma| convention.
  Outcome phi_sigma(ProgramIndex e, const Word& sigma, nat input) const {
    return phi(e, sigma, input, sigma.size());
  }

  // Longest output prefix <Phi_e(oracle;0),...> with every cell halting
  // within `budget`; stops at the first non-halting cell or at max_len.
  Word output_prefix(ProgramIndex e, const Word& oracle, nat budget,
                     std::size_t max_len) const;

  // s-m-n: freezes `frozen` into registers R1.. of e.  Total, fast, no
  // execution of e.  At most kRegisters-1 frozen values.
  ProgramIndex smn(ProgramIndex e, const Word& frozen) const;

  // Kleene fixpoint: n with Phi_n = Phi_{Phi_builder(n)}.  Validates that the
  // builder halts on n within harness_budget (construction_error otherwise).
  ProgramIndex fixpoint(ProgramIndex builder, nat harness_budget) const;

  static ProgramIndex diag_pair(ProgramIndex v, ProgramIndex u) {
    return kernel::diag_pair(v, u);
  }

 private:
  Outcome exec(const Program& p, const Word& oracle, nat input, nat budget) const;

  std::vector<Program> slots_;
  std::map<Program, nat> dedup_;
  std::vector<NativeFn> natives_;
};

// --- Program corpus ---------------------------------------------------------
// One program per record: name, canonical integer index, assembly text.
struct CorpusEntry {
  std::string name;
  Program program;
};

std::string write_corpus(const std::vector<CorpusEntry>& entries);
std::vector<CorpusEntry> parse_corpus(const std::string& text);  // verifies codes

}  // namespace masslab::kernel
