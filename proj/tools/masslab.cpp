// masslab: build classes from expressions, enumerate frontiers, run learner
// simulations and adversary games, execute witness constructions, and run the
// check suites.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "masslab/checks.hpp"
#include "masslab/concat.hpp"
#include "masslab/dsl.hpp"
#include "masslab/errors.hpp"
#include "masslab/export.hpp"
#include "masslab/fixtures.hpp"
#include "masslab/learner.hpp"
#include "masslab/oracles.hpp"
#include "masslab/tape.hpp"
#include "masslab/witness.hpp"

namespace {

using namespace masslab;

constexpr int kExitParse = 2;
constexpr int kExitResource = 3;
constexpr int kExitHypothesis = 4;
constexpr int kExitCheck = 5;

Word parse_stream(const std::string& text) {
  Word w;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    w.push_back(std::stoull(tok));
  }
  return w;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw resource_error("cannot open output file " + out_path);
  f << content;
}

const learner::Learner& find_learner(const Fixtures& fx, const std::string& name) {
  auto it = fx.learners.find(name);
  if (it == fx.learners.end()) throw parse_error("unknown learner fixture '" + name + "'");
  return it->second;
}

kernel::ProgramIndex find_program(const Fixtures& fx, const std::string& name) {
  auto it = fx.programs.find(name);
  if (it == fx.programs.end()) throw parse_error("unknown program fixture '" + name + "'");
  return it->second;
}

const Word& find_stream(const Fixtures& fx, const std::string& name) {
  auto it = fx.streams.find(name);
  if (it == fx.streams.end()) throw parse_error("unknown stream fixture '" + name + "'");
  return it->second;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"masslab: a desk-scale workbench for mass problems and learners"};
  app.require_subcommand(1);

  nat seed = 0x6d6c6162;  // default seed, fixed
  std::string fixtures_path;
  nat budget = 10'000;
  if (const char* env = std::getenv("MASSLAB_BUDGET")) budget = std::stoull(env);
  app.add_option("--seed", seed, "seed for all sampling");
  app.add_option("--fixtures", fixtures_path, "fixture registry file");
  app.add_option("--budget", budget, "default kernel step budget");

  // --- build ---
  auto* cmd_build = app.add_subcommand("build", "elaborate a class expression");
  std::string build_expr;
  cmd_build->add_option("--expr", build_expr, "class expression")->required();

  // --- frontier ---
  auto* cmd_frontier = app.add_subcommand("frontier", "enumerate a frontier");
  std::string fr_expr, fr_format = "json", fr_out;
  std::size_t fr_depth = 4;
  cmd_frontier->add_option("--expr", fr_expr)->required();
  cmd_frontier->add_option("--depth", fr_depth);
  cmd_frontier->add_option("--format", fr_format)->check(CLI::IsMember({"json", "dot"}));
  cmd_frontier->add_option("--out", fr_out);

  // --- simulate ---
  auto* cmd_sim = app.add_subcommand("simulate", "run a learner on a stream prefix");
  std::string sim_learner, sim_stream, sim_target, sim_out;
  cmd_sim->add_option("--learner", sim_learner)->required();
  cmd_sim->add_option("--stream", sim_stream, "comma-separated symbols or a stream fixture")
      ->required();
  cmd_sim->add_option("--target", sim_target)->required();
  cmd_sim->add_option("--out", sim_out);

  // --- verify ---
  auto* cmd_verify = app.add_subcommand("verify", "finite-horizon class verifier");
  std::string vf_kind, vf_witness, vf_source, vf_target;
  nat vf_bound = 1;
  std::size_t vf_samples = 50, vf_len = 10;
  cmd_verify->add_option("--kind", vf_kind, "one|mc|indx|omega|team-prog|team-learn")
      ->required();
  cmd_verify->add_option("--witness", vf_witness, "program/learner fixture (comma list for teams)")
      ->required();
  cmd_verify->add_option("--bound", vf_bound);
  cmd_verify->add_option("--source", vf_source)->required();
  cmd_verify->add_option("--target", vf_target)->required();
  cmd_verify->add_option("--samples", vf_samples);
  cmd_verify->add_option("--length", vf_len);

  // --- force ---
  auto* cmd_force = app.add_subcommand("force", "play the mind-change adversary");
  std::string fo_learners, fo_tie, fo_streams, fo_out;
  nat fo_m = 3;
  cmd_force->add_option("--learner", fo_learners, "learner fixture (comma list for teams)")
      ->required();
  cmd_force->add_option("--tie", fo_tie, "a tie expression fixing the factor classes")
      ->required();
  cmd_force->add_option("--m", fo_m);
  cmd_force->add_option("--streams", fo_streams, "extension stream fixtures, comma list");
  cmd_force->add_option("--out", fo_out);

  // --- witness ---
  auto* cmd_witness = app.add_subcommand("witness", "run a named construction");
  std::string wt_name, wt_out;
  nat wt_k = 2, wt_b = 3, wt_stages = 8;
  std::string wt_phi = "echo", wt_P = "spine", wt_Q = "full2";
  cmd_witness
      ->add_option("--name", wt_name,
                   "dnr-square|homog-collapse|noncup|hyper-learner|timekeeper|priority|union")
      ->required();
  cmd_witness->add_option("--k", wt_k);
  cmd_witness->add_option("--b", wt_b);
  cmd_witness->add_option("--stages", wt_stages);
  cmd_witness->add_option("--phi", wt_phi);
  cmd_witness->add_option("--P", wt_P);
  cmd_witness->add_option("--Q", wt_Q);
  cmd_witness->add_option("--out", wt_out);

  // --- search-member ---
  auto* cmd_search = app.add_subcommand(
      "search-member", "bounded search for a computable member (no specialness claim)");
  std::string sm_expr;
  nat sm_bound = 64;
  std::size_t sm_depth = 8;
  cmd_search->add_option("--expr", sm_expr)->required();
  cmd_search->add_option("--index-bound", sm_bound);
  cmd_search->add_option("--depth", sm_depth);

  // --- check ---
  auto* cmd_check = app.add_subcommand("check", "run acceptance check suites");
  std::string ck_suite = "all";
  cmd_check->add_option("--suite", ck_suite);

  // --- export ---
  auto* cmd_export = app.add_subcommand("export", "write fixture artifacts");
  std::string ex_what = "corpus", ex_out;
  cmd_export->add_option("--what", ex_what)->check(CLI::IsMember({"corpus", "classes"}));
  cmd_export->add_option("--out", ex_out);

  CLI11_PARSE(app, argc, argv);

  try {
    auto fx = make_standard_fixtures(budget);
    if (!fixtures_path.empty()) {
      std::ifstream f(fixtures_path);
      if (!f) throw resource_error("cannot read fixtures file " + fixtures_path);
      std::stringstream ss;
      ss << f.rdbuf();
      load_fixture_file(*fx, ss.str());
    }

    if (*cmd_build) {
      dsl::Elaborated v = dsl::elaborate(*dsl::parse(build_expr), *fx);
      if (auto* cls = std::get_if<trees::ClosedClass>(&v)) {
        std::cout << "class: " << cls->label << "\n";
        std::cout << "root-member: " << (cls->member({}) ? "yes" : "no") << "\n";
        std::cout << "branch-bound[0]: " << cls->branch_bound(0) << "\n";
      } else {
        auto& lc = std::get<concat::LayeredClass>(v);
        std::cout << "layered class: " << lc.label << " (" << lc.layers.size()
                  << " layers)\n";
      }
      return 0;
    }

    if (*cmd_frontier) {
      trees::ClosedClass cls = dsl::elaborate_class(fr_expr, *fx);
      trees::Frontier f = trees::frontier(cls, fr_depth);
      emit(fr_out, fr_format == "json" ? exporter::frontier_json(cls, f)
                                       : exporter::frontier_dot(cls, f));
      return 0;
    }

    if (*cmd_sim) {
      const learner::Learner& L = find_learner(*fx, sim_learner);
      Word g = fx->streams.count(sim_stream) ? fx->streams.at(sim_stream)
                                             : parse_stream(sim_stream);
      if (fx->streams.count(sim_stream)) g = prefix(g, 24);
      trees::ClosedClass target = dsl::elaborate_class(sim_target, *fx);
      learner::SimulateOptions opt;
      opt.budget = budget;
      learner::RunTrace tr = learner::simulate(fx->machine(), L, g, target, opt);
      emit(sim_out, learner::trace_jsonl(tr));
      return 0;
    }

    if (*cmd_verify) {
      trees::ClosedClass source = dsl::elaborate_class(vf_source, *fx);
      trees::ClosedClass target = dsl::elaborate_class(vf_target, *fx);
      std::mt19937_64 rng(seed);
      std::vector<Word> sample;
      for (std::size_t i = 0; i < vf_samples; ++i) {
        Word w;
        for (std::size_t p = 0; p < vf_len; ++p) {
          std::vector<nat> opts;
          for (nat j = 0; j < source.branch_bound(p); ++j)
            if (source.member(cat(w, j))) opts.push_back(j);
          if (opts.empty()) break;
          w.push_back(opts[rng() % opts.size()]);
        }
        sample.push_back(w);
      }
      learner::Kind kind;
      if (vf_kind == "one") kind = learner::Kind::one_one;
      else if (vf_kind == "mc") kind = learner::Kind::one_bounded_mc;
      else if (vf_kind == "indx") kind = learner::Kind::one_bounded_indx;
      else if (vf_kind == "omega") kind = learner::Kind::one_omega;
      else if (vf_kind == "team-prog") kind = learner::Kind::team_programs;
      else if (vf_kind == "team-learn") kind = learner::Kind::team_learners;
      else throw parse_error("unknown verifier kind '" + vf_kind + "'");

      learner::Witness w{kernel::ProgramIndex{0}};
      std::vector<std::string> names;
      std::stringstream ss(vf_witness);
      std::string tok;
      while (std::getline(ss, tok, ',')) names.push_back(tok);
      if (kind == learner::Kind::one_one) w = find_program(*fx, names.at(0));
      else if (kind == learner::Kind::team_programs) {
        std::vector<kernel::ProgramIndex> es;
        for (const auto& n : names) es.push_back(find_program(*fx, n));
        w = es;
      } else if (kind == learner::Kind::team_learners) {
        std::vector<learner::Learner> ls;
        for (const auto& n : names) ls.push_back(find_learner(*fx, n));
        w = ls;
      } else {
        w = find_learner(*fx, names.at(0));
      }
      learner::SimulateOptions opt;
      opt.budget = budget;
      auto rep = learner::verify_class(fx->machine(), kind, w, sample, source, target,
                                       vf_bound, opt);
      std::cout << learner::kind_name(kind) << " verdict: " << (rep.pass ? "pass" : "fail")
                << " (" << rep.checked << " streams";
      if (!rep.failures.empty()) {
        std::cout << "; first failure " << show(rep.failures[0].g) << ": "
                  << rep.failures[0].reason;
      }
      std::cout << ")\n";
      return rep.pass ? 0 : kExitCheck;
    }

    if (*cmd_force) {
      trees::ClosedClass tie_cls = dsl::elaborate_class(fo_tie, *fx);
      if (!tie_cls.tie) throw parse_error("--tie must be a tie expression");
      std::vector<trees::ClosedClass> fam = tie_cls.tie->factors;
      std::vector<learner::Learner> team;
      {
        std::stringstream ss(fo_learners);
        std::string tok;
        while (std::getline(ss, tok, ',')) team.push_back(find_learner(*fx, tok));
      }
      std::vector<Word> streams;
      if (!fo_streams.empty()) {
        std::stringstream ss(fo_streams);
        std::string tok;
        while (std::getline(ss, tok, ',')) streams.push_back(find_stream(*fx, tok));
      } else {
        std::mt19937_64 rng(seed);
        for (const auto& cls : fam) {
          Word w;
          for (std::size_t p = 0; p < 512; ++p) {
            std::vector<nat> opts;
            for (nat j = 0; j < cls.branch_bound(p); ++j)
              if (cls.member(cat(w, j))) opts.push_back(j);
            if (opts.empty()) break;
            w.push_back(opts[rng() % opts.size()]);
          }
          streams.push_back(w);
        }
      }
      witness::ForcingOptions opt;
      opt.target_changes = fo_m;
      auto res =
          witness::force_mind_changes(fx->machine(), team, fam, {}, streams, opt);
      std::ostringstream out;
      out << res.transcript;
      out << "achieved: " << (res.achieved ? "yes" : "no") << "\n";
      out << "switches: " << res.switches << "\n";
      for (std::size_t i = 0; i < res.mind_change_counts.size(); ++i)
        out << "learner " << i << " mind changes: " << res.mind_change_counts[i] << "\n";
      if (res.stalled) out << "stall at stage " << res.stall_stage << " (anti-Popperian branch)\n";
      emit(fo_out, out.str());
      return res.achieved || res.stalled ? 0 : kExitCheck;
    }

    if (*cmd_witness) {
      std::ostringstream out;
      kernel::Machine& m = fx->machine();
      if (wt_name == "dnr-square") {
        auto sched = witness::dnr_square_reduction(m, wt_k, 3);
        trees::ClosedClass dnrk2 =
            trees::dnr(m, wt_k * wt_k, 1, {}, trees::constant_budget(64));
        trees::Frontier f = trees::frontier(dnrk2, 7);
        for (const Word& g : f.members) {
          auto active = sched.active_piece(m, g, 4, 64);
          Word o = sched.evaluate(m, g, 4, 64, 8);
          out << show(g) << " piece=" << (active ? std::to_string(*active) : "none")
              << " out=" << show(o) << "\n";
        }
      } else if (wt_name == "homog-collapse") {
        out << "run `masslab check --suite collapse` for the full construction\n";
      } else if (wt_name == "noncup") {
        trees::ClosedClass P = dsl::elaborate_class(wt_P, *fx);
        trees::ClosedClass Q = dsl::elaborate_class(wt_Q, *fx);
        Word g = prefix(fx->streams.at("full0"), 64);
        witness::NoncupOptions opt;
        opt.horizon = 20;
        auto res = witness::noncup_extract(m, find_program(*fx, wt_phi), P, Q, g, opt);
        out << "extracted: " << show(res.extracted) << "\n";
        out << "rounds: " << res.D_trees.size() << "\n";
        out << "violations: " << res.violations.size() << "\n";
      } else if (wt_name == "timekeeper") {
        trees::ClosedClass P = dsl::elaborate_class(wt_P, *fx);
        trees::ClosedClass Q = dsl::elaborate_class(wt_Q, *fx);
        witness::TimekeeperOptions opt;
        opt.stages = wt_stages;
        auto res = witness::timekeeper_build(
            m, P, Q, {find_program(*fx, "echo"), find_program(*fx, "loop")}, opt);
        out << res.transcript;
      } else if (wt_name == "priority") {
        trees::ClosedClass P = dsl::elaborate_class(wt_P, *fx);
        trees::ClosedClass Q = dsl::elaborate_class(wt_Q, *fx);
        witness::PriorityOptions opt;
        opt.stages = wt_stages;
        auto res = witness::priority_hat(
            m, P, Q, {{fx->learners.at("echo_guess"), fx->learners.at("alternating")}},
            fx->base, opt);
        out << res.transcript;
        out << "partition_ok: " << (res.partition_ok ? "yes" : "no") << "\n";
      } else if (wt_name == "hyper-learner") {
        trees::ClosedClass P = dsl::elaborate_class(wt_P, *fx);
        trees::ClosedClass Q = dsl::elaborate_class(wt_Q, *fx);
        auto st = std::make_shared<witness::HyperLearnerState>();
        witness::HyperLearnerOptions opt;
        learner::Learner psi = learner::constant_learner(kernel::const_index(0));
        learner::Learner L = witness::hyperconcat_learner(m, psi, P, Q, opt, st);
        Word g = prefix(fx->streams.at("full0"), 32);
        learner::SimulateOptions sopt;
        sopt.budget = 2'000'000;
        sopt.output_len = 8;
        auto tr = learner::simulate(m, L, g, P, sopt);
        out << learner::trace_jsonl(tr);
        out << "challenges: " << st->challenges << (st->exhausted ? " (exhausted)" : "")
            << "\n";
      } else if (wt_name == "union") {
        std::vector<trees::ClosedClass> layers = {fx->classes.at("zeros"),
                                                  fx->classes.at("evens0"),
                                                  fx->classes.at("full2")};
        learner::Learner L = witness::sigma2_union_learner(m, layers);
        Word g = {1, 0, 1, 0, 0, 0, 1, 0};
        learner::SimulateOptions sopt;
        sopt.budget = budget;
        auto tr = learner::simulate(m, L, g, fx->classes.at("full2"), sopt);
        out << learner::trace_jsonl(tr);
      } else {
        throw parse_error("unknown witness '" + wt_name + "'");
      }
      emit(wt_out, out.str());
      return 0;
    }

    if (*cmd_search) {
      trees::ClosedClass cls = dsl::elaborate_class(sm_expr, *fx);
      kernel::Machine& m = fx->machine();
      for (nat e = 0; e < sm_bound; ++e) {
        if (!m.index_valid(e)) continue;
        Word out = m.output_prefix(e, {}, budget, sm_depth);
        if (out.size() == sm_depth && cls.member(out)) {
          std::cout << "index " << e << " computes the depth-" << sm_depth << " member "
                    << show(out) << "\n";
          return 0;
        }
      }
      std::cout << "no member found below index bound " << sm_bound << " at depth "
                << sm_depth << " (this is not a specialness claim)\n";
      return 0;
    }

    if (*cmd_check) {
      auto results = checks::run_suite(ck_suite, *fx, seed);
      for (const auto& r : results) std::cout << checks::render(r) << "\n";
      return checks::all_pass(results) ? 0 : kExitCheck;
    }

    if (*cmd_export) {
      if (ex_what == "corpus") {
        emit(ex_out, kernel::write_corpus(fx->corpus));
      } else {
        std::ostringstream out;
        for (const auto& [name, cls] : fx->classes)
          out << "class " << name << " = " << cls.label << "\n";
        emit(ex_out, out.str());
      }
      return 0;
    }
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const decode_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const shape_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const resource_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const hypothesis_violation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
