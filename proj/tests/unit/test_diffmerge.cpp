#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "random_model.hpp"
#include "sbmltk/diffmerge.hpp"
#include "sbmltk/shorthand.hpp"

using namespace sbmltk;

namespace {

ModelDocument shs(const std::string& name) { return parse_shorthand(testing::fixture(name)); }

bool merges_to(const ModelDocument& a, const ModelDocument& b, const ModelDocument& expected) {
  try {
    return merge_models({a, b}).document == expected;
  } catch (const MergeConflictError&) {
    return false;
  }
}

}  // namespace

TEST_CASE("diff of a model with itself is empty") {
  for (const auto& m : testing::load_corpus()) {
    auto report = diff_models(m.doc, m.doc);
    CHECK_MESSAGE(report.empty(), m.name);
  }
}

TEST_CASE("renamed species name shows as one attribute delta") {
  auto a = shs("corpus/02_upper_glycolysis.shs");
  auto b = a;
  b.species[1].name = "G6P";
  auto report = diff_models(a, b);
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].path == "species/g6p");
  CHECK(report.entries[0].kind == DiffKind::Changed);
  REQUIRE(report.entries[0].deltas.size() == 1);
  CHECK(report.entries[0].deltas[0] == AttributeDelta{"name", "glucose 6-phosphate", "G6P"});
}

TEST_CASE("five-element fixtures: one addition, one removal, one value change") {
  auto report = diff_models(shs("diff/five_a.shs"), shs("diff/five_b.shs"));
  std::vector<DiffEntry> expected = {
      {"species/B", DiffKind::Changed, {{"initial_amount", "2", "4"}}},
      {"parameter/k2", DiffKind::Removed, {}},
      {"parameter/k3", DiffKind::Added, {}},
  };
  CHECK(report.entries == expected);
  CHECK_FALSE(report.header_changed());
  CHECK(diff_to_tsv(report) ==
        "path\tkind\tattribute\tleft\tright\n"
        "species/B\tchanged\tinitial_amount\t2\t4\n"
        "parameter/k2\tremoved\t\t\t\n"
        "parameter/k3\tadded\t\t\t\n");
  auto json = diff_to_json(report);
  CHECK(json.find("\"model_changed\": true") != std::string::npos);
}

TEST_CASE("kinetic laws are compared after mapping matched ids") {
  auto a = shs("merge/glucose_a.shs");
  auto b = a;
  b.species[0].id = "glucose";  // same annotation, so still matched
  b.reactions[0].reactants[0].species = "glucose";
  b.reactions[0].kinetic_law = parse_infix("k*glucose");
  CHECK(diff_models(a, b).empty());
  b.reactions[0].kinetic_law = parse_infix("glucose*k");
  auto report = diff_models(a, b);
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].deltas[0].attribute == "kinetic_law");
}

TEST_CASE("merge basics") {
  auto m = shs("corpus/02_upper_glycolysis.shs");
  CHECK(merge_models({m}).document == m);
  auto twice = merge_models({m, m});
  CHECK(twice.document == m);
  CHECK(twice.renames.empty());
  CHECK_THROWS_AS(merge_models({}), Error);
}

TEST_CASE("annotation-identical species with different amounts conflict") {
  auto a = shs("merge/glucose_a.shs");
  auto b = shs("merge/glucose_b.shs");
  try {
    merge_models({a, b});
    FAIL("expected a conflict");
  } catch (const MergeConflictError& e) {
    REQUIRE(e.report().conflicts.size() == 1);
    CHECK(e.report().conflicts[0] == Conflict{"species/glc", "initial_amount", "5", "2"});
    CHECK(conflicts_to_json(e.report()) == testing::fixture("merge/glucose_conflicts.json"));
  }

  auto left = merge_models({a, b}, MergePolicy::left());
  const auto* glc = left.document.find_species("glc");
  REQUIRE(glc);
  CHECK(glc->initial_amount == 5.0);
  CHECK(glc->annotations.size() == 2);  // unioned
  CHECK_FALSE(left.document.find_species("glucose"));
  const auto* ferment = left.document.find_reaction("ferment");
  REQUIRE(ferment);
  CHECK(ferment->reactants[0].species == "glc");
  CHECK(print_infix(*ferment->kinetic_law) == "kl*glc");
  CHECK(left.resolved.size() == 1);
  CHECK(validate_model(left.document).ok());

  auto right = merge_models({a, b}, MergePolicy::right());
  CHECK(right.document.find_species("glc")->initial_amount == 2.0);

  auto policy = parse_merge_policy("default\tfail\nspecies/glc\tinitial_amount\tright\n");
  CHECK(merge_models({a, b}, policy).document.find_species("glc")->initial_amount == 2.0);
}

TEST_CASE("colliding unmatched ids are renamed with the source index") {
  auto a = parse_shorthand("@model:2.4.1=m\n@compartments\n c=1\n@species\n c:X=1\n");
  auto b = parse_shorthand("@model:2.4.1=m\n@compartments\n c=1\n@parameters\n X=2\n X__m2=3\n");
  auto result = merge_models({a, b});
  REQUIRE(result.renames.size() == 1);
  CHECK(result.renames[0] == RenameRecord{2, ElementKind::Parameter, "X", "X__m2_2"});
  CHECK(result.document.find_parameter("X__m2_2")->value == 2.0);
  CHECK(result.document.find_parameter("X__m2")->value == 3.0);
  CHECK(validate_model(result.document).ok());
  CHECK(renames_to_json(result.renames).find("X__m2_2") != std::string::npos);
}

TEST_CASE("reactions with different participants do not match") {
  auto a = parse_shorthand("@model:2.4.1=m\n@compartments\n c=1\n@species\n c:A=1\n c:B=1\n@reactions\n@rxn=r\n A -> B\n A\n");
  auto b = parse_shorthand("@model:2.4.1=m\n@compartments\n c=1\n@species\n c:A=1\n c:B=1\n@reactions\n@rxn=r\n B -> A\n B\n");
  auto result = merge_models({a, b});
  CHECK(result.document.reactions.size() == 2);
  CHECK(result.document.reactions[1].id == "r__m2");
  auto report = diff_models(a, b);
  CHECK(report.count(DiffKind::Removed) == 1);
  CHECK(report.count(DiffKind::Added) == 1);
}

TEST_CASE("header differences conflict") {
  auto a = shs("corpus/03_michaelis_menten.shs");
  auto b = a;
  b.name = "other";
  CHECK(diff_models(a, b).header_changed());
  CHECK_THROWS_AS(merge_models({a, b}), MergeConflictError);
  CHECK(merge_models({a, b}, MergePolicy::left()).document == a);
}

TEST_CASE("policy parsing") {
  auto p = parse_merge_policy("# comment\ndefault\tleft\nreaction/r1\tkinetic_law\tright\nmodel\tid\tleft\n");
  CHECK(p.fallback == MergeChoice::Left);
  CHECK(p.overrides.size() == 2);
  for (const char* bad : {"default\tmaybe\n", "species/x\tannotations\tleft\n", "species/x\tvalue\tleft\n",
                          "species/x\tname\tfail\n", "widget/x\tname\tleft\n", "just one field\n"}) {
    CHECK_THROWS_AS(parse_merge_policy(bad), Error);
  }
}

TEST_CASE("diff/merge laws over the corpus") {
  auto corpus = testing::load_corpus();
  for (const auto& a : corpus) {
    for (const auto& b : corpus) {
      auto empty = diff_models(a.doc, b.doc).empty();
      bool both = merges_to(a.doc, b.doc, a.doc) && merges_to(b.doc, a.doc, b.doc);
      CHECK_MESSAGE(empty == both, a.name << " vs " << b.name);
      try {
        auto merged = merge_models({a.doc, b.doc}, MergePolicy::right());
        CHECK(validate_model(merged.document).ok());
      } catch (const Error& e) {
        FAIL(a.name << " + " << b.name << ": " << e.what());
      }
    }
  }
}

TEST_CASE("diff/merge laws on random perturbations") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    auto a = testing::random_model(rng);
    auto b = a;
    switch (i % 4) {
      case 0: break;
      case 1: if (!b.species.empty()) b.species[0].initial_amount += 1; break;
      case 2: if (!b.species.empty()) b.species[0].annotations.insert(Qualifier::parse("hasPart"), "identifiers.org/x/y"); break;
      case 3: b.parameters.push_back({"extra", 1, {}, {}}); break;
    }
    auto empty = diff_models(a, b).empty();
    bool both = merges_to(a, b, a) && merges_to(b, a, b);
    CHECK(empty == both);
    if (empty) CHECK(merges_to(a, b, a));
    auto merged = merge_models({a, b, a}, MergePolicy::left());
    CHECK(validate_model(merged.document).ok());
    CHECK(merge_models({a, b, a}, MergePolicy::left()).document == merged.document);
  }
}

TEST_CASE("split closure") {
  auto my = shs("mymodel.shs");
  auto sub = split_model(my, {"reaction1"});
  CHECK(sub == my);  // the listing is a single reaction's closure

  auto glyco = shs("corpus/02_upper_glycolysis.shs");
  auto pgi = split_model(glyco, {"pgi"});
  std::vector<std::string> species;
  for (const auto& s : pgi.species) species.push_back(s.id);
  CHECK(species == std::vector<std::string>{"g6p", "f6p"});
  CHECK(pgi.parameters.size() == 2);
  CHECK(pgi.compartments.size() == 1);

  auto expanded = split_model(glyco, {"f6p"}, true);
  std::vector<std::string> ids;
  for (const auto& s : expanded.species) ids.push_back(s.id);
  for (const auto& p : expanded.parameters) ids.push_back(p.id);
  for (const auto& r : expanded.reactions) ids.push_back(r.id);
  CHECK(ids == std::vector<std::string>{"g6p", "f6p", "fbp", "atp", "adp", "kpgi_f", "kpgi_r", "Vpfk", "Kpfk",
                                        "pgi", "pfk"});
  auto plain = split_model(glyco, {"f6p"});
  CHECK(plain.reactions.empty());
  CHECK(plain.species.size() == 1);

  std::set<std::string> all;
  for (const auto& c : glyco.compartments) all.insert(c.id);
  for (const auto& s : glyco.species) all.insert(s.id);
  for (const auto& p : glyco.parameters) all.insert(p.id);
  for (const auto& r : glyco.reactions) all.insert(r.id);
  CHECK(split_model(glyco, all) == glyco);

  try {
    split_model(glyco, {"nope"});
    FAIL("expected NoSuchElement");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSuchElement);
  }
}

TEST_CASE("split output validates for random seeds") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 200; ++i) {
    auto doc = testing::random_model(rng);
    std::vector<std::string> ids;
    for (const auto& c : doc.compartments) ids.push_back(c.id);
    for (const auto& s : doc.species) ids.push_back(s.id);
    for (const auto& p : doc.parameters) ids.push_back(p.id);
    for (const auto& r : doc.reactions) ids.push_back(r.id);
    std::set<std::string> seeds;
    for (const auto& id : ids) {
      if (rng() % 3 == 0) seeds.insert(id);
    }
    auto sub = split_model(doc, seeds, i % 2 == 0);
    CHECK(validate_model(sub).ok());
  }
}
