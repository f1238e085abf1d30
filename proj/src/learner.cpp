#include "masslab/learner.hpp"

#include <algorithm>

#include "masslab/errors.hpp"

#include <nlohmann/json.hpp>

namespace masslab::learner {

using json = nlohmann::ordered_json;

Learner constant_learner(ProgramIndex e, std::string descriptor) {
  Learner L;
  L.guess = [e](const Word&) { return e; };
  L.descriptor = descriptor.empty() ? "const-guess(" + std::to_string(e) + ")" : std::move(descriptor);
  return L;
}

RunTrace simulate(const kernel::Machine& m, const Learner& L, const Word& g,
                  const ClosedClass& target, const SimulateOptions& opt) {
  RunTrace t;
  t.margin_K = opt.margin_K;
  for (std::size_t n = 0; n <= g.size(); ++n) {
    ProgramIndex e = L.guess(prefix(g, n));
    t.guesses.push_back(e);
    if (n > 0 && t.guesses[n] != t.guesses[n - 1]) t.mcl.push_back(n - 1);
    if (std::find(t.indx.begin(), t.indx.end(), e) == t.indx.end()) t.indx.push_back(e);
    Word out = m.output_prefix(e, prefix(g, n), opt.budget, opt.output_len);
    StageRecord rec;
    rec.stage = n;
    rec.guess = e;
    rec.mc_count = t.mcl.size();
    rec.output_len = out.size();
    rec.refuted = !target.member(out);
    t.stages.push_back(rec);
    if (n == g.size()) {
      t.final_output = out;
      t.refuted = rec.refuted;
    }
  }
  if (t.mcl.empty()) {
    t.converged = true;
  } else {
    std::size_t last = t.mcl.back() + 1;  // stage of the last change
    t.converged = g.size() >= last + opt.margin_K;
  }
  return t;
}

std::string trace_jsonl(const RunTrace& t) {
  std::string out;
  for (const StageRecord& r : t.stages) {
    json j;
    j["stage"] = r.stage;
    j["guess"] = r.guess;
    j["mc"] = r.mc_count;
    j["output_len"] = r.output_len;
    j["verdict"] = r.refuted ? "refuted" : "consistent";
    out += j.dump() + "\n";
  }
  return out;
}

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::one_one: return "(1,1)";
    case Kind::one_bounded_mc: return "(1,<w)";
    case Kind::one_bounded_indx: return "(1,w|<w)";
    case Kind::one_omega: return "(1,w)";
    case Kind::team_programs: return "(<w,1)";
    case Kind::team_learners: return "(<w,w)";
  }
  return "?";
}

namespace {

bool consistent_program(const kernel::Machine& m, ProgramIndex e, const Word& g,
                        const ClosedClass& target, const SimulateOptions& opt) {
  Word out = m.output_prefix(e, g, opt.budget, opt.output_len);
  return target.member(out);
}

}  // namespace

ClassReport verify_class(const kernel::Machine& m, Kind kind, const Witness& w,
                         const std::vector<Word>& sample, const ClosedClass& source,
                         const ClosedClass& target, nat bound,
                         const SimulateOptions& opt) {
  ClassReport rep;
  rep.kind = kind;
  rep.bound = bound;
  rep.margin_K = opt.margin_K;
  for (const Word& g : sample)
    if (!source.member(g))
      throw shape_error("verify_class: sampled stream " + show(g) + " is not in the source class");

  auto fail = [&](const Word& g, const std::string& why) {
    rep.failures.push_back({g, why});
  };

  for (const Word& g : sample) {
    ++rep.checked;
    switch (kind) {
      case Kind::one_one: {
        const auto* e = std::get_if<ProgramIndex>(&w);
        if (!e) throw shape_error("verify_class: (1,1) expects a single program index");
        if (!consistent_program(m, *e, g, target, opt)) fail(g, "output refuted");
        break;
      }
      case Kind::one_bounded_mc:
      case Kind::one_bounded_indx:
      case Kind::one_omega: {
        const auto* L = std::get_if<Learner>(&w);
        if (!L) throw shape_error("verify_class: learner kinds expect a learner witness");
        RunTrace t = simulate(m, *L, g, target, opt);
        if (kind == Kind::one_bounded_mc && t.mind_changes() > bound) {
          fail(g, "mind changes " + std::to_string(t.mind_changes()) + " > " + std::to_string(bound));
          break;
        }
        if (kind == Kind::one_bounded_indx && t.indx.size() > bound) {
          fail(g, "predicted indices " + std::to_string(t.indx.size()) + " > " + std::to_string(bound));
          break;
        }
        if (!t.converged) {
          fail(g, "not converged at horizon");
          break;
        }
        if (t.refuted) fail(g, "converged output refuted");
        break;
      }
      case Kind::team_programs: {
        const auto* es = std::get_if<std::vector<ProgramIndex>>(&w);
        if (!es) throw shape_error("verify_class: (<w,1) expects a program list");
        if (es->size() > bound)
          throw shape_error("verify_class: program list exceeds the bound");
        bool any = false;
        for (ProgramIndex e : *es)
          if (consistent_program(m, e, g, target, opt)) {
            any = true;
            break;
          }
        if (!any) fail(g, "no listed program consistent");
        break;
      }
      case Kind::team_learners: {
        const auto* ls = std::get_if<std::vector<Learner>>(&w);
        if (!ls) throw shape_error("verify_class: (<w,w) expects a learner team");
        if (ls->size() > bound)
          throw shape_error("verify_class: team exceeds the bound");
        bool any = false;
        for (const Learner& L : *ls) {
          RunTrace t = simulate(m, L, g, target, opt);
          if (t.converged && !t.refuted) {
            any = true;
            break;
          }
        }
        if (!any) fail(g, "no team member converged and consistent");
        break;
      }
    }
  }
  rep.pass = rep.failures.empty();
  return rep;
}

StallReport popperian_probe(const kernel::Machine& m, const Learner& L,
                            const std::vector<Word>& sample, nat horizon,
                            std::size_t cells) {
  StallReport rep;
  for (const Word& g : sample) {
    ProgramIndex e = L.guess(g);  // the guess at the end of the observation
    StallReport::Item item;
    item.g = g;
    // minimal halting budgets per output cell; a gap >= horizon between
    // consecutive cells (or divergence) counts as a stall
    nat prev = 0;
    for (std::size_t x = 0; x < cells; ++x) {
      kernel::Outcome o = m.phi(e, g, x, horizon + prev);
      if (o.tag == kernel::Outcome::Tag::oracle_out_of_range) break;  // wants more input
      if (!o.halted()) {
        item.stall = true;
        item.at_cell = x;
        break;
      }
      if (o.steps >= prev + horizon) {
        item.stall = true;
        item.at_cell = x;
        break;
      }
      prev = std::max(prev, o.steps);
    }
    rep.any_stall = rep.any_stall || item.stall;
    rep.items.push_back(item);
  }
  return rep;
}

}  // namespace masslab::learner
