#include "masslab/export.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "masslab/pairing.hpp"

namespace masslab::exporter {

using json = nlohmann::ordered_json;

std::string frontier_json(const trees::ClosedClass& cls, const trees::Frontier& f) {
  json j;
  j["expr"] = cls.label;
  j["depth"] = f.depth;
  j["members"] = json::array();
  for (const Word& w : f.members) j["members"].push_back(w);
  j["leaves"] = json::array();
  for (const Word& w : f.leaves) j["leaves"].push_back(w);
  return j.dump(2) + "\n";
}

std::string frontier_dot(const trees::ClosedClass& cls, const trees::Frontier& f) {
  static const char* palette[] = {"lightblue", "lightsalmon", "palegreen",
                                  "khaki", "plum", "lightgray"};
  std::set<Word> nodes;
  auto add_with_prefixes = [&nodes](const Word& w) {
    for (std::size_t l = 0; l <= w.size(); ++l) nodes.insert(prefix(w, l));
  };
  for (const Word& w : f.members) add_with_prefixes(w);
  for (const Word& w : f.leaves) add_with_prefixes(w);

  auto id = [](const Word& w) {
    std::string s = "n";
    for (nat x : w) s += "_" + std::to_string(x);
    return s;
  };
  std::string out = "digraph tree {\n  rankdir=TB;\n  node [shape=circle, fontsize=9];\n";
  out += "  label=\"" + cls.label + "\";\n";
  for (const Word& w : nodes) {
    std::string fill;
    if (cls.tie && !w.empty()) {
      nat tape = unpair_first(w.back());
      fill = palette[tape % 6];
    }
    std::string lbl = w.empty() ? "<>" : std::to_string(w.back());
    out += "  " + id(w) + " [label=\"" + lbl + "\"";
    if (!fill.empty()) out += ", style=filled, fillcolor=" + fill;
    out += "];\n";
  }
  for (const Word& w : nodes) {
    if (w.empty()) continue;
    out += "  " + id(pred(w)) + " -> " + id(w) + ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace masslab::exporter
