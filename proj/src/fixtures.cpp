#include "masslab/fixtures.hpp"

#include <sstream>

#include "masslab/dsl.hpp"
#include "masslab/errors.hpp"
#include "masslab/tape.hpp"

namespace masslab {

trees::ClosedClass spine_class() {
  trees::ClosedClass c;
  c.member = [](const Word& w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] == 0) continue;
      if (w[i] != 1) return false;
      // committed at i: at most one further symbol, anything binary
      if (w.size() > i + 2) return false;
      for (std::size_t j = i + 1; j < w.size(); ++j)
        if (w[j] >= 2) return false;
      return true;
    }
    return true;  // all zeros
  };
  c.branch_bound = [](std::size_t) -> nat { return 2; };
  c.label = "spine";
  return c;
}

namespace {

void add_named(Fixtures& fx, const std::string& name, const std::string& assembly) {
  kernel::Program p = kernel::assemble(assembly);
  fx.programs[name] = fx.machine().add(p);
  fx.corpus.push_back({name, p});
}

}  // namespace

std::unique_ptr<Fixtures> make_standard_fixtures(nat default_budget) {
  auto fx = std::make_unique<Fixtures>();
  fx->default_budget = default_budget;

  // Registry slots (indices 0,2,4,...).  Slot order is part of the fixture
  // contract: the DNR classes read the diagonal straight off it.
  add_named(*fx, "const1_fast",
            "arity 1\n"
            "  loadi r0 1\n"
            "  halt r0\n");
  add_named(*fx, "loop",
            "arity 1\n"
            "loop:\n"
            "  jmp loop\n");
  add_named(*fx, "echo",
            "arity 1\n"
            "  oracle r0 r0\n"
            "  halt r0\n");
  add_named(*fx, "slow10_const0",
            "arity 1\n"
            "  nop\n  nop\n  nop\n  nop\n  nop\n  nop\n  nop\n  nop\n"
            "  loadi r0 0\n"
            "  halt r0\n");
  add_named(*fx, "add",
            "arity 2\n"
            "  add r0 r0 r1\n"
            "  halt r0\n");
  add_named(*fx, "double",
            "arity 1\n"
            "  add r0 r0 r0\n"
            "  halt r0\n");
  // maps any index to the constant-42 program's index (a builder fixture)
  add_named(*fx, "to_const42",
            "arity 1\n"
            "  loadi r1 42\n"
            "  mul r2 r1 r1\n"
            "  loadi r3 1\n"
            "  add r2 r2 r3\n"      // pair(1,42) = 42*42 + 1
            "  add r2 r2 r2\n"
            "  add r2 r2 r3\n"      // const_index(42) = 2*pair(1,42) + 1
            "  halt r2\n");
  // maps any index n to const_index(n): the quine builder
  add_named(*fx, "to_const_self",
            "arity 1\n"
            "  loadi r3 1\n"
            "  jnz r0 n_ge1\n"
            "  loadi r2 2\n"        // pair(1,0) = 2
            "  jmp fin\n"
            "n_ge1:\n"
            "  sub r4 r0 r3\n"
            "  jnz r4 n_ge2\n"
            "  loadi r2 3\n"        // pair(1,1) = 3
            "  jmp fin\n"
            "n_ge2:\n"
            "  mul r2 r0 r0\n"      // pair(1,n) = n*n+1 for n >= 2
            "  add r2 r2 r3\n"
            "fin:\n"
            "  add r2 r2 r2\n"
            "  add r2 r2 r3\n"      // 2*pair(1,n)+1
            "  halt r2\n");
  add_named(*fx, "identity_builder",
            "arity 1\n"
            "  halt r0\n");

  fx->programs["const7"] = kernel::const_index(7);
  fx->programs["const0"] = kernel::const_index(0);
  fx->programs["const42"] = kernel::const_index(42);
  fx->programs["diverge"] = fx->programs["loop"];

  // classes
  fx->base = spine_class();
  fx->classes["spine"] = fx->base;
  fx->classes["full2"] = trees::full(2);
  fx->classes["full3"] = trees::full(3);
  fx->classes["zeros"] = trees::singleton({0});
  fx->classes["alt01"] = trees::singleton({0, 1});
  fx->classes["evens0"] = trees::homogeneous({{0, 1}, {0}});
  fx->classes["headone"] = trees::homogeneous({{1}, {0, 1}});
  fx->classes["fixtureA"] = trees::homogeneous({{0, 1}, {0}});
  fx->classes["fixtureB"] = trees::homogeneous({{1}, {0, 1}});
  fx->classes["dnr2"] =
      trees::dnr(fx->machine(), 2, 1, {}, trees::constant_budget(default_budget), "dnr 2");
  fx->classes["dnr4"] =
      trees::dnr(fx->machine(), 4, 1, {}, trees::constant_budget(default_budget), "dnr 4");

  // streams (long enough for every desk game)
  auto fill = [](const trees::ClosedClass& c, std::size_t len) {
    Word w;
    for (std::size_t i = 0; i < len; ++i) {
      bool placed = false;
      for (nat j = 0; j < c.branch_bound(i) && !placed; ++j) {
        Word cand = cat(w, j);
        if (c.member(cand)) {
          w = cand;
          placed = true;
        }
      }
      if (!placed) break;
    }
    return w;
  };
  fx->streams["zerosA"] = fill(fx->classes["fixtureA"], 512);
  fx->streams["onesB"] = fill(fx->classes["fixtureB"], 512);
  fx->streams["full0"] = fill(fx->classes["full2"], 512);
  fx->streams["spine0"] = fill(fx->base, 512);

  // learners
  fx->learners["stall"] = learner::constant_learner(fx->programs["loop"], "stall");
  fx->learners["echo_guess"] = learner::constant_learner(fx->programs["echo"], "echo_guess");
  {
    // alternates from the second observation on: a length-2k prefix shows
    // exactly 2k-1 mind changes
    learner::Learner L;
    L.descriptor = "alternating";
    L.guess = [](const Word& w) {
      return kernel::const_index(w.empty() ? 0 : (w.size() - 1) % 2);
    };
    fx->learners["alternating"] = L;
  }
  {
    // Echo learner for tape games: guesses the constant program announcing
    // the tape of the last declaration.
    learner::Learner L;
    L.descriptor = "echo";
    L.guess = [](const Word& w) -> kernel::ProgramIndex {
      if (w.empty()) return kernel::const_index(0);
      return kernel::const_index(unpair_first(w.back()));
    };
    fx->learners["echo"] = L;
  }

  return fx;
}

void load_fixture_file(Fixtures& fx, const std::string& text) {
  // program records use the corpus format; classes are single lines
  std::istringstream in(text);
  std::string line;
  std::string corpus_text;
  std::vector<std::pair<std::string, std::string>> class_lines;
  bool in_program = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = line;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front())))
      trimmed.erase(trimmed.begin());
    if (!in_program && trimmed.rfind("class ", 0) == 0) {
      auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw parse_error("fixture file line " + std::to_string(lineno) +
                          ": class line needs '='");
      std::string name = trimmed.substr(6, eq - 6);
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back())))
        name.pop_back();
      class_lines.emplace_back(name, trimmed.substr(eq + 1));
      continue;
    }
    if (trimmed.rfind("budget ", 0) == 0 && !in_program) {
      fx.default_budget = std::stoull(trimmed.substr(7));
      continue;
    }
    if (trimmed.rfind("program ", 0) == 0) in_program = true;
    if (trimmed == "end") {
      corpus_text += line + "\n";
      in_program = false;
      continue;
    }
    corpus_text += line + "\n";
  }
  for (const auto& entry : kernel::parse_corpus(corpus_text)) {
    fx.programs[entry.name] = fx.machine().add(entry.program);
    fx.corpus.push_back(entry);
  }
  for (const auto& [name, expr] : class_lines)
    fx.classes[name] = dsl::elaborate_class(expr, fx);
}

}  // namespace masslab
