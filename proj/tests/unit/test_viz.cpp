#include <doctest.h>

#include <regex>
#include <set>

#include "fixtures.hpp"
#include "random_model.hpp"
#include "sbmltk/shorthand.hpp"
#include "sbmltk/text.hpp"
#include "sbmltk/viz.hpp"

using namespace sbmltk;
using namespace sbmltk::testing;

namespace {

struct DotShape {
  std::set<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  bool balanced = true;
};

// Line-oriented reader for the DOT subset emitted here.
DotShape read_dot(const std::string& dot, const std::string& arrow) {
  static const std::regex node(R"(^\s*("(?:[^"\\]|\\.)*"|[A-Za-z_][A-Za-z0-9_]*) \[[^\]]*\];$)");
  static const std::regex edge(R"(^\s*("(?:[^"\\]|\\.)*"|[A-Za-z_][A-Za-z0-9_]*) (->|--) ("(?:[^"\\]|\\.)*"|[A-Za-z_][A-Za-z0-9_]*)( \[[^\]]*\])?;$)");
  DotShape shape;
  int depth = 0;
  for (const auto& line : split_lines(dot)) {
    std::smatch m;
    if (line.find('{') != std::string::npos) ++depth;
    if (line.find('}') != std::string::npos) --depth;
    if (std::regex_match(line, m, edge)) {
      if (m[2] != arrow) shape.balanced = false;
      shape.edges.emplace_back(m[1], m[3]);
    } else if (std::regex_match(line, m, node)) {
      shape.nodes.insert(m[1]);
    }
    if (depth < 0) shape.balanced = false;
  }
  if (depth != 0) shape.balanced = false;
  return shape;
}

}  // namespace

TEST_CASE("model networks") {
  SUBCASE("empty model") {
    ModelDocument doc;
    CHECK(model_to_dot(doc) == "digraph model { }\n");
  }
  SUBCASE("MyModel") {
    auto dot = model_to_dot(parse_shorthand(fixture("mymodel.shs")));
    auto shape = read_dot(dot, "->");
    CHECK(shape.balanced);
    CHECK(shape.nodes == std::set<std::string>{"s_A", "s_B", "r_reaction1"});
    CHECK(shape.edges == std::vector<std::pair<std::string, std::string>>{{"s_A", "r_reaction1"}, {"r_reaction1", "s_B"}});
    CHECK(dot.find("r_reaction1 [shape=box") != std::string::npos);
    CHECK(dot.find("s_A [shape=ellipse") != std::string::npos);
  }
  SUBCASE("stoichiometry label") {
    auto doc = parse_shorthand("@model:2.4.1=m\n@compartments\n  c=1\n@species\n  c:A=1\n  c:B=1\n@reactions\n@rxn=r\n  2 A -> B\n  A\n");
    auto dot = model_to_dot(doc);
    CHECK(dot.find("  s_A -> r_r [label=\"2\"];\n") != std::string::npos);
    CHECK(dot.find("  r_r -> s_B;\n") != std::string::npos);
  }
  SUBCASE("modifiers and clusters") {
    auto doc = parse_shorthand(fixture("corpus/07_regulation.shs"));
    auto with = model_to_dot(doc);
    auto without = model_to_dot(doc, {false, false});
    CHECK(with.find("style=dashed") != std::string::npos);
    CHECK(without.find("style=dashed") == std::string::npos);
    CHECK(with.find("subgraph cluster_cell") != std::string::npos);
    CHECK(without.find("subgraph") == std::string::npos);
  }
  SUBCASE("counts and determinism over random models") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
      auto doc = random_model(rng);
      auto dot = model_to_dot(doc);
      CHECK(dot == model_to_dot(doc));
      if (doc.species.empty() && doc.reactions.empty()) continue;
      auto shape = read_dot(dot, "->");
      CHECK(shape.balanced);
      CHECK(shape.nodes.size() == doc.species.size() + doc.reactions.size());
      std::size_t edges = 0;
      for (const auto& r : doc.reactions) edges += r.reactants.size() + r.products.size() + r.modifiers.size();
      CHECK(shape.edges.size() == edges);
      for (const auto& [a, b] : shape.edges) {
        CHECK(shape.nodes.count(a) == 1);
        CHECK(shape.nodes.count(b) == 1);
      }
    }
  }
}

TEST_CASE("similarity graphs") {
  CHECK(similarity_to_dot(SimilarityGraph{}) == "graph similarity { }\n");
  auto g = cluster_models({{"a", {"1", "2"}}, {"b", {"2", "3", "4", "5", "1"}}});
  CHECK(similarity_to_dot(g).find("  a -- b [label=\"0.40\"];\n") != std::string::npos);

  std::vector<Fingerprint> five = {
      {"glycolysis", {"u1", "u2", "u3"}}, {"gluconeogenesis", {"u1", "u2", "u4"}}, {"tca cycle", {"u5", "u6"}},
      {"tca_short", {"u5", "u6", "u7"}},  {"mapk", {"u9"}}};
  auto dot = similarity_to_dot(cluster_models(five, 0.3));
  CHECK(dot == read_file(std::filesystem::path(SBMLTK_GOLDEN_DIR) / "similarity_five.dot"));
  auto shape = read_dot(dot, "--");
  CHECK(shape.balanced);
  CHECK(shape.nodes.size() == 5);
}
