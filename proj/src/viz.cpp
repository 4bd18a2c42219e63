#include "sbmltk/viz.hpp"

#include <array>
#include <cstdio>

#include "sbmltk/text.hpp"

namespace sbmltk {

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string node_id(std::string_view text) { return is_identifier(text) ? std::string(text) : quote(text); }

std::string species_node(const Species& s) {
  return "s_" + s.id + " [shape=ellipse, label=" + quote(s.name.empty() ? s.id : s.name) + "];";
}

std::string stoich_attr(double n) { return n == 1.0 ? "" : " [label=" + quote(format_real(n)) + "]"; }

}  // namespace

std::string model_to_dot(const ModelDocument& doc, const DotOptions& opts) {
  require_valid(doc);
  if (doc.species.empty() && doc.reactions.empty()) return "digraph model { }\n";
  std::string out = "digraph model {\n";
  if (opts.compartment_clusters) {
    for (const auto& c : doc.compartments) {
      std::vector<const Species*> members;
      for (const auto& s : doc.species) {
        if (s.compartment == c.id) members.push_back(&s);
      }
      if (members.empty()) continue;
      out += "  subgraph cluster_" + c.id + " {\n";
      out += "    label=" + quote(c.name.empty() ? c.id : c.name) + ";\n";
      for (const auto* s : members) out += "    " + species_node(*s) + "\n";
      out += "  }\n";
    }
  } else {
    for (const auto& s : doc.species) out += "  " + species_node(s) + "\n";
  }
  for (const auto& r : doc.reactions) {
    out += "  r_" + r.id + " [shape=box, label=" + quote(r.name.empty() ? r.id : r.name) + "];\n";
  }
  for (const auto& r : doc.reactions) {
    for (const auto& ref : r.reactants) out += "  s_" + ref.species + " -> r_" + r.id + stoich_attr(ref.stoichiometry) + ";\n";
    for (const auto& ref : r.products) out += "  r_" + r.id + " -> s_" + ref.species + stoich_attr(ref.stoichiometry) + ";\n";
    if (opts.show_modifiers) {
      for (const auto& m : r.modifiers) out += "  s_" + m + " -> r_" + r.id + " [style=dashed, arrowhead=odot];\n";
    }
  }
  return out + "}\n";
}

std::string similarity_to_dot(const SimilarityGraph& g) {
  static constexpr std::array<const char*, 8> palette = {"#8dd3c7", "#ffffb3", "#bebada", "#fb8072",
                                                         "#80b1d3", "#fdb462", "#b3de69", "#fccde5"};
  if (g.nodes.empty()) return "graph similarity { }\n";
  std::string out = "graph similarity {\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out += "  " + node_id(g.nodes[i]) + " [style=filled, fillcolor=" + quote(palette[g.cluster[i] % palette.size()]) +
           "];\n";
  }
  for (const auto& e : g.edges) {
    char weight[32];
    std::snprintf(weight, sizeof weight, "%.2f", e.weight);
    out += "  " + node_id(g.nodes[e.a]) + " -- " + node_id(g.nodes[e.b]) + " [label=" + quote(weight) + "];\n";
  }
  return out + "}\n";
}

}  // namespace sbmltk
