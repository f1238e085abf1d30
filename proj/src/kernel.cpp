#include "masslab/kernel.hpp"

#include <array>
#include <cctype>
#include <sstream>

namespace masslab::kernel {

namespace {

struct OpInfo {
  const char* name;
  int regs;      // leading register operands
  int extras;    // trailing literal/target operands
};

// Operand shape per opcode, in field order a,b,c.
const std::array<OpInfo, 15> kOps = {{
    {"nop", 0, 0},
    {"loadi", 1, 1},
    {"mov", 2, 0},
    {"add", 3, 0},
    {"sub", 3, 0},
    {"mul", 3, 0},
    {"half", 2, 0},
    {"jz", 1, 1},
    {"jnz", 1, 1},
    {"jmp", 0, 1},
    {"oracle", 2, 0},
    {"univ", 3, 0},
    {"univb", 3, 0},
    {"univz", 3, 0},
    {"halt", 1, 0},
}};

nat field(const Instr& ins, int i) { return i == 0 ? ins.a : i == 1 ? ins.b : ins.c; }
void set_field(Instr& ins, int i, nat v) { (i == 0 ? ins.a : i == 1 ? ins.b : ins.c) = v; }

bool mul_ok(nat a, nat b, nat& out) { return !__builtin_mul_overflow(a, b, &out); }
bool add_ok(nat a, nat b, nat& out) { return !__builtin_add_overflow(a, b, &out); }

}  // namespace

std::string show(const Outcome& o) {
  switch (o.tag) {
    case Outcome::Tag::halted: return "halted(" + std::to_string(o.value) + ")";
    case Outcome::Tag::still_running: return "still-running";
    case Outcome::Tag::oracle_out_of_range: return "oracle-out-of-range";
  }
  return "?";
}

// --- bit-stream Godel code ---------------------------------------------------

namespace {

struct BitWriter {
  std::vector<bool> bits;
  void bit(bool b) { bits.push_back(b); }
  // Elias gamma of v+1: (N-1) zeros, then the N bits of v+1.
  void gamma(nat v) {
    nat n = v + 1;
    if (n == 0) throw resource_error("godel: value too large");
    int len = 64 - __builtin_clzll(n);
    for (int i = 0; i < len - 1; ++i) bit(false);
    for (int i = len - 1; i >= 0; --i) bit((n >> i) & 1);
  }
  void fixed(nat v, int width) {
    for (int i = width - 1; i >= 0; --i) bit((v >> i) & 1);
  }
};

struct BitReader {
  const std::vector<bool>& bits;
  std::size_t pos = 0;
  bool bit() {
    if (pos >= bits.size()) throw decode_error("godel: truncated bit stream");
    return bits[pos++];
  }
  nat gamma() {
    int zeros = 0;
    while (!bit()) {
      if (++zeros > 63) throw decode_error("godel: gamma overflow");
    }
    nat n = 1;
    for (int i = 0; i < zeros; ++i) n = (n << 1) | (bit() ? 1 : 0);
    return n - 1;
  }
  nat fixed(int width) {
    nat v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | (bit() ? 1 : 0);
    return v;
  }
  bool done() const { return pos == bits.size(); }
};

}  // namespace

std::string godel_hex(const Program& p) {
  BitWriter w;
  w.gamma(p.arity);
  w.gamma(p.code.size());
  for (const Instr& ins : p.code) {
    auto op = static_cast<nat>(ins.op);
    if (op >= kOps.size()) throw decode_error("godel: bad opcode");
    w.fixed(op, 4);
    const OpInfo& info = kOps[op];
    for (int i = 0; i < info.regs; ++i) w.fixed(field(ins, i), 3);
    for (int i = 0; i < info.extras; ++i) w.gamma(field(ins, info.regs + i));
  }
  // Leading 1 keeps leading zero bits of the stream significant.
  std::vector<bool> all;
  all.push_back(true);
  all.insert(all.end(), w.bits.begin(), w.bits.end());
  // Pack MSB-first into hex.
  std::string hex = "0x";
  std::size_t i = 0;
  std::size_t lead = (4 - all.size() % 4) % 4;
  nat nib = 0;
  std::size_t filled = lead;
  static const char* digits = "0123456789abcdef";
  for (; i < all.size(); ++i) {
    nib = (nib << 1) | (all[i] ? 1 : 0);
    if (++filled == 4) {
      hex += digits[nib];
      nib = 0;
      filled = 0;
    }
  }
  return hex;
}

Program godel_parse_hex(const std::string& hex) {
  if (hex.size() < 3 || hex[0] != '0' || hex[1] != 'x')
    throw decode_error("godel: expected 0x-prefixed hex");
  std::vector<bool> all;
  for (std::size_t i = 2; i < hex.size(); ++i) {
    char ch = static_cast<char>(std::tolower(hex[i]));
    int v;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
    else throw decode_error("godel: bad hex digit");
    for (int b = 3; b >= 0; --b) all.push_back((v >> b) & 1);
  }
  // Strip leading zeros then the sentinel 1.
  std::size_t start = 0;
  while (start < all.size() && !all[start]) ++start;
  if (start == all.size()) throw decode_error("godel: empty code");
  std::vector<bool> bits(all.begin() + start + 1, all.end());
  BitReader r{bits};
  Program p;
  p.arity = r.gamma();
  nat count = r.gamma();
  if (count > 100000) throw resource_error("godel: program too large");
  for (nat k = 0; k < count; ++k) {
    Instr ins;
    nat op = r.fixed(4);
    if (op >= kOps.size()) throw decode_error("godel: bad opcode");
    ins.op = static_cast<Op>(op);
    const OpInfo& info = kOps[op];
    for (int i = 0; i < info.regs; ++i) {
      nat reg = r.fixed(3);
      set_field(ins, i, reg);
    }
    for (int i = 0; i < info.extras; ++i) set_field(ins, info.regs + i, r.gamma());
    p.code.push_back(ins);
  }
  if (!r.done()) throw decode_error("godel: trailing bits");
  return p;
}

// --- assembler ---------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == ';' || c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) toks.push_back(cur), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

nat parse_reg(const std::string& tok, int lineno) {
  if (tok.size() < 2 || (tok[0] != 'r' && tok[0] != 'R'))
    throw parse_error("asm line " + std::to_string(lineno) + ": expected register, got '" + tok + "'");
  nat v = 0;
  for (std::size_t i = 1; i < tok.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(tok[i])))
      throw parse_error("asm line " + std::to_string(lineno) + ": bad register '" + tok + "'");
    v = v * 10 + (tok[i] - '0');
  }
  if (v >= kRegisters)
    throw parse_error("asm line " + std::to_string(lineno) + ": register out of range '" + tok + "'");
  return v;
}

}  // namespace

Program assemble(const std::string& text) {
  struct Pending {
    std::size_t instr;
    int fieldno;
    std::string label;
    int lineno;
  };
  Program p;
  std::map<std::string, nat> labels;
  std::vector<Pending> pend;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool arity_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks.size() == 1 && toks[0].back() == ':') {
      std::string lbl = toks[0].substr(0, toks[0].size() - 1);
      if (labels.count(lbl)) throw parse_error("asm line " + std::to_string(lineno) + ": duplicate label " + lbl);
      labels[lbl] = p.code.size();
      continue;
    }
    if (toks[0] == "arity") {
      if (arity_seen || toks.size() != 2)
        throw parse_error("asm line " + std::to_string(lineno) + ": bad arity directive");
      p.arity = std::stoull(toks[1]);
      arity_seen = true;
      continue;
    }
    int op = -1;
    for (std::size_t i = 0; i < kOps.size(); ++i)
      if (toks[0] == kOps[i].name) op = static_cast<int>(i);
    if (op < 0) throw parse_error("asm line " + std::to_string(lineno) + ": unknown op '" + toks[0] + "'");
    const OpInfo& info = kOps[op];
    if (static_cast<int>(toks.size()) != 1 + info.regs + info.extras)
      throw parse_error("asm line " + std::to_string(lineno) + ": " + std::string(info.name) + " expects " +
                        std::to_string(info.regs + info.extras) + " operands");
    Instr ins;
    ins.op = static_cast<Op>(op);
    for (int i = 0; i < info.regs; ++i) set_field(ins, i, parse_reg(toks[1 + i], lineno));
    for (int i = 0; i < info.extras; ++i) {
      const std::string& tok = toks[1 + info.regs + i];
      if (std::isdigit(static_cast<unsigned char>(tok[0]))) {
        set_field(ins, info.regs + i, std::stoull(tok));
      } else {
        pend.push_back({p.code.size(), info.regs + i, tok, lineno});
      }
    }
    p.code.push_back(ins);
  }
  for (const Pending& pd : pend) {
    auto it = labels.find(pd.label);
    if (it == labels.end())
      throw parse_error("asm line " + std::to_string(pd.lineno) + ": undefined label '" + pd.label + "'");
    set_field(p.code[pd.instr], pd.fieldno, it->second);
  }
  return p;
}

std::string disassemble(const Program& p) {
  std::string out = "arity " + std::to_string(p.arity) + "\n";
  for (const Instr& ins : p.code) {
    auto op = static_cast<nat>(ins.op);
    const OpInfo& info = kOps.at(op);
    out += info.name;
    for (int i = 0; i < info.regs; ++i) out += " r" + std::to_string(field(ins, i));
    for (int i = 0; i < info.extras; ++i) out += " " + std::to_string(field(ins, info.regs + i));
    out += "\n";
  }
  return out;
}

// --- word codes --------------------------------------------------------------

nat word_code(const Word& w) {
  nat c = 0;
  for (nat sym : w) c = pair(c, sym) + 1;
  return c;
}

Word word_decode(nat code) {
  Word rev;
  while (code != 0) {
    auto [hd, sym] = unpair(code - 1);
    rev.push_back(sym);
    code = hd;
  }
  Word w(rev.rbegin(), rev.rend());
  return w;
}

// --- index families ----------------------------------------------------------

nat family_index(Family f, nat payload) {
  nat p = pair(static_cast<nat>(f), payload);
  nat idx;
  if (!add_ok(p, p, idx) || !add_ok(idx, 1, idx))
    throw resource_error("family_index: index overflow");
  return idx;
}

std::optional<std::pair<Family, nat>> family_split(nat index) {
  if (index % 2 == 0) return std::nullopt;
  auto [fam, payload] = unpair((index - 1) / 2);
  if (fam > static_cast<nat>(Family::native)) return std::nullopt;
  return std::make_pair(static_cast<Family>(fam), payload);
}

// --- virtual program synthesis -------------------------------------------------

namespace {

Instr mk(Op op, nat a = 0, nat b = 0, nat c = 0) { return Instr{op, a, b, c}; }

// Emits r[dst] := pair(r[x], r[y]) using scratch registers s1,s2.
void emit_pair(std::vector<Instr>& code, nat dst, nat x, nat y, nat s1, nat s2) {
  nat base = code.size();
  // if r[y] - r[x] != 0 then x < y
  code.push_back(mk(Op::sub, s1, y, x));
  code.push_back(mk(Op::jz, s1, base + 5));      // ge branch
  code.push_back(mk(Op::mul, s2, y, y));         // y*y
  code.push_back(mk(Op::add, dst, s2, x));       // + x
  code.push_back(mk(Op::jmp, base + 8));
  code.push_back(mk(Op::mul, s2, x, x));         // x*x
  code.push_back(mk(Op::add, s2, s2, x));        // + x
  code.push_back(mk(Op::add, dst, s2, y));       // + y
}

// The diagonal program for (v,u): ignores its input and halts with
// <Phi_v(v), Phi_u(u)>; diverges if either inner run diverges.
Program make_diag_program(nat v, nat u) {
  Program p;
  p.arity = 1;
  auto& c = p.code;
  c.push_back(mk(Op::loadi, 1, v));
  c.push_back(mk(Op::univ, 2, 1, 1));  // r2 := Phi_v(v)
  c.push_back(mk(Op::loadi, 3, u));
  c.push_back(mk(Op::univ, 4, 3, 3));  // r4 := Phi_u(u)
  emit_pair(c, 0, 2, 4, 5, 6);
  c.push_back(mk(Op::halt, 0));
  return p;
}

Program make_const_program(nat k) {
  Program p;
  p.arity = 1;
  p.code.push_back(mk(Op::loadi, 0, k));
  p.code.push_back(mk(Op::halt, 0));
  return p;
}

// x |-> Phi_{Phi_builder(self)}(x), self being this program's own index.
Program make_fix_program(nat builder, nat self) {
  Program p;
  p.arity = 1;
  auto& c = p.code;
  c.push_back(mk(Op::loadi, 1, builder));
  c.push_back(mk(Op::loadi, 2, self));
  c.push_back(mk(Op::univ, 3, 1, 2));  // r3 := Phi_builder(self)
  c.push_back(mk(Op::univ, 0, 3, 0));  // r0 := Phi_{r3}(input)
  c.push_back(mk(Op::halt, 0));
  return p;
}

Program make_smn_program(const Program& base, const Word& frozen) {
  if (frozen.size() + 1 > kRegisters)
    throw construction_error("smn: too many frozen arguments");
  Program p;
  p.arity = base.arity > frozen.size() ? base.arity - frozen.size() : 1;
  nat shift = frozen.size();
  for (std::size_t i = 0; i < frozen.size(); ++i)
    p.code.push_back(mk(Op::loadi, static_cast<nat>(i + 1), frozen[i]));
  for (Instr ins : base.code) {
    auto op = static_cast<nat>(ins.op);
    const OpInfo& info = kOps.at(op);
    for (int i = 0; i < info.extras; ++i) {
      // jump targets are absolute instruction indices
      if (ins.op == Op::jz || ins.op == Op::jnz || ins.op == Op::jmp)
        set_field(ins, info.regs + i, field(ins, info.regs + i) + shift);
    }
    p.code.push_back(ins);
  }
  return p;
}

}  // namespace

// --- Machine -----------------------------------------------------------------

ProgramIndex Machine::add(const Program& p) {
  auto it = dedup_.find(p);
  if (it != dedup_.end()) return 2 * it->second;
  nat slot = slots_.size();
  slots_.push_back(p);
  dedup_.emplace(p, slot);
  return 2 * slot;
}

ProgramIndex Machine::add_native(NativeFn fn) {
  natives_.push_back(std::move(fn));
  return family_index(Family::native, natives_.size() - 1);
}

std::optional<Program> Machine::decode_index(ProgramIndex e) const {
  if (e % 2 == 0) {
    nat slot = e / 2;
    if (slot >= slots_.size()) return std::nullopt;
    return slots_[slot];
  }
  auto fam = family_split(e);
  if (!fam) return std::nullopt;
  auto [f, payload] = *fam;
  switch (f) {
    case Family::diag: {
      auto [v, u] = unpair(payload);
      return make_diag_program(v, u);
    }
    case Family::constant:
      return make_const_program(payload);
    case Family::fix:
      return make_fix_program(payload, e);
    case Family::smn: {
      auto [base, wcode] = unpair(payload);
      auto bp = decode_index(base);
      if (!bp) return std::nullopt;
      return make_smn_program(*bp, word_decode(wcode));
    }
    case Family::native:
      return std::nullopt;  // no instruction-level code
  }
  return std::nullopt;
}

bool Machine::index_valid(ProgramIndex e) const {
  if (auto fam = family_split(e); fam && fam->first == Family::native)
    return fam->second < natives_.size();
  return decode_index(e).has_value();
}

Outcome Machine::run(ProgramIndex e, const Word& oracle, nat input, nat budget) const {
  if (auto fam = family_split(e); fam && fam->first == Family::native) {
    if (fam->second >= natives_.size())
      throw decode_error("run: unregistered native functional " + std::to_string(e));
    return natives_[fam->second](oracle, input, budget);
  }
  auto p = decode_index(e);
  if (!p) throw decode_error("run: malformed program index " + std::to_string(e));
  return exec(*p, oracle, input, budget);
}

Outcome Machine::phi(ProgramIndex e, const Word& oracle, nat input, nat budget) const {
  if (!index_valid(e)) {
    Outcome o;
    o.tag = Outcome::Tag::still_running;
    o.steps = budget;
    return o;
  }
  return run(e, oracle, input, budget);
}

Word Machine::output_prefix(ProgramIndex e, const Word& oracle, nat budget,
                            std::size_t max_len) const {
  Word out;
  for (std::size_t x = 0; x < max_len; ++x) {
    Outcome o = phi(e, oracle, x, budget);
    if (!o.halted()) break;
    out.push_back(o.value);
  }
  return out;
}

ProgramIndex Machine::smn(ProgramIndex e, const Word& frozen) const {
  if (!decode_index(e)) throw decode_error("smn: malformed program index");
  if (frozen.empty()) return e;
  if (frozen.size() + 1 > kRegisters) throw construction_error("smn: too many frozen arguments");
  return family_index(Family::smn, pair(e, word_code(frozen)));
}

ProgramIndex Machine::fixpoint(ProgramIndex builder, nat harness_budget) const {
  if (!index_valid(builder)) throw decode_error("fixpoint: malformed builder index");
  ProgramIndex n = family_index(Family::fix, builder);
  Outcome probe = phi(builder, {}, n, harness_budget);
  if (!probe.halted())
    throw construction_error("fixpoint: builder diverges on its fixpoint within harness budget");
  return n;
}

// --- interpreter ---------------------------------------------------------------

Outcome Machine::exec(const Program& p, const Word& oracle, nat input, nat budget) const {
  std::array<nat, kRegisters> reg{};
  reg[0] = input;
  nat pc = 0;
  Outcome out;
  nat steps = 0;
  nat touched = 0;

  auto diverge = [&]() {
    out.tag = Outcome::Tag::still_running;
    out.steps = budget;
    out.touched = touched;
    return out;
  };

  while (true) {
    if (steps >= budget) return diverge();
    if (pc >= p.code.size()) return diverge();  // fell off the end: stuck
    const Instr& ins = p.code[pc];
    ++steps;
    switch (ins.op) {
      case Op::nop:
        ++pc;
        break;
      case Op::loadi:
        reg[ins.a] = ins.b;
        ++pc;
        break;
      case Op::mov:
        reg[ins.a] = reg[ins.b];
        ++pc;
        break;
      case Op::add: {
        nat v;
        if (!add_ok(reg[ins.b], reg[ins.c], v)) return diverge();
        reg[ins.a] = v;
        ++pc;
        break;
      }
      case Op::sub:
        reg[ins.a] = reg[ins.b] >= reg[ins.c] ? reg[ins.b] - reg[ins.c] : 0;
        ++pc;
        break;
      case Op::mul: {
        nat v;
        if (!mul_ok(reg[ins.b], reg[ins.c], v)) return diverge();
        reg[ins.a] = v;
        ++pc;
        break;
      }
      case Op::half:
        reg[ins.a] = reg[ins.b] / 2;
        ++pc;
        break;
      case Op::jz:
        pc = reg[ins.a] == 0 ? ins.b : pc + 1;
        break;
      case Op::jnz:
        pc = reg[ins.a] != 0 ? ins.b : pc + 1;
        break;
      case Op::jmp:
        pc = ins.a;
        break;
      case Op::oracle: {
        nat pos = reg[ins.b];
        if (pos + 1 > touched) touched = pos + 1;
        if (pos >= oracle.size()) {
          out.tag = Outcome::Tag::oracle_out_of_range;
          out.steps = steps;
          out.touched = touched;
          return out;
        }
        reg[ins.a] = oracle[pos];
        ++pc;
        break;
      }
      case Op::univ: {
        // Inner run shares the oracle; gets whatever budget remains.
        nat remaining = budget - steps;
        if (!index_valid(reg[ins.b])) return diverge();
        Outcome inner = run(reg[ins.b], oracle, reg[ins.c], remaining);
        if (inner.touched > touched) touched = inner.touched;
        steps += inner.steps;
        if (inner.tag == Outcome::Tag::oracle_out_of_range) {
          out = inner;
          out.steps = steps;
          out.touched = touched;
          return out;
        }
        if (!inner.halted()) return diverge();
        reg[ins.a] = inner.value;
        ++pc;
        break;
      }
      case Op::univb:
      case Op::univz: {
        // Atomic budgeted probe of Phi_{R[a]}(sigma; R[b]) where sigma is the
        // oracle truncated to R[c] symbols (univb) or empty (univz).  The
        // probe is only taken if the full R[c]-step observation is
        // affordable, so its result cannot depend on the remaining outer
        // budget.  An out-of-window read counts as non-convergence.
        nat window = reg[ins.c];
        nat remaining = budget - steps;
        // the inner budget can be clamped to remaining+1 without changing
        // the observable outcome: any probe needing more than that is
        // unaffordable anyway, and the oracle window stays at R[c]
        nat inner_budget = remaining < window ? remaining + 1 : window;
        Word trunc = ins.op == Op::univb ? prefix(oracle, window) : Word{};
        Outcome inner;
        if (index_valid(reg[ins.a])) {
          inner = run(reg[ins.a], trunc, reg[ins.b], inner_budget);
        } else {
          inner.tag = Outcome::Tag::still_running;
          inner.steps = inner_budget;
        }
        nat charge = inner.steps;
        if (charge > remaining) return diverge();
        steps += charge;
        if (ins.op == Op::univb && inner.touched > touched) touched = inner.touched;
        if (inner.halted()) {
          nat v;
          if (!add_ok(inner.value, 1, v)) return diverge();
          reg[0] = v;
        } else {
          reg[0] = 0;
        }
        ++pc;
        break;
      }
      case Op::halt:
        out.tag = Outcome::Tag::halted;
        out.value = reg[ins.a];
        out.steps = steps;
        out.touched = touched;
        return out;
    }
  }
}

// --- corpus --------------------------------------------------------------------

std::string write_corpus(const std::vector<CorpusEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += "program " + e.name + " " + godel_hex(e.program) + "\n";
    std::istringstream body(disassemble(e.program));
    std::string line;
    while (std::getline(body, line)) out += "  " + line + "\n";
    out += "end\n";
  }
  return out;
}

std::vector<CorpusEntry> parse_corpus(const std::string& text) {
  std::vector<CorpusEntry> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::optional<CorpusEntry> cur;
  std::optional<std::string> cur_hex;
  std::string body;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "program") {
      if (cur) throw parse_error("corpus line " + std::to_string(lineno) + ": nested program record");
      if (toks.size() != 3) throw parse_error("corpus line " + std::to_string(lineno) + ": expected 'program NAME 0x..'");
      cur = CorpusEntry{toks[1], {}};
      cur_hex = toks[2];
      body.clear();
    } else if (toks[0] == "end") {
      if (!cur) throw parse_error("corpus line " + std::to_string(lineno) + ": stray 'end'");
      cur->program = assemble(body);
      if (godel_hex(cur->program) != *cur_hex)
        throw parse_error("corpus: code mismatch for program " + cur->name +
                          " (expected " + *cur_hex + ", assembled " + godel_hex(cur->program) + ")");
      entries.push_back(std::move(*cur));
      cur.reset();
    } else {
      if (!cur) throw parse_error("corpus line " + std::to_string(lineno) + ": text outside record");
      body += line + "\n";
    }
  }
  if (cur) throw parse_error("corpus: unterminated program record");
  return entries;
}

}  // namespace masslab::kernel
