#include <random>

#include "doctest.h"
#include "random_model.hpp"
#include "sbmltk/semantics.hpp"
#include "sbmltk/shorthand.hpp"

using namespace sbmltk;

namespace {

ModelDocument two_species(const std::string& left_id, const std::string& right_id) {
  return parse_shorthand("@model:2.4.1=m\n@compartments\n c=1\n@species\n c:" + left_id + "=1\n c:" + right_id +
                         "=1\n");
}

class TableOracle : public EquivalenceOracle {
 public:
  std::set<std::string> equivalents(std::string_view uri) const override {
    std::set<std::string> a = {"identifiers.org/obo.chebi/CHEBI:17234", "identifiers.org/kegg.compound/C00031"};
    if (a.count(std::string(uri))) return a;
    return {std::string(uri)};
  }
};

// Brute-force Jaccard straight from the definition |A n B| / |A u B|.
double brute_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> all = a;
  all.insert(b.begin(), b.end());
  if (all.empty()) return 0.0;
  double common = 0;
  for (const auto& x : all) common += a.count(x) && b.count(x);
  return common / static_cast<double>(all.size());
}

}  // namespace

TEST_CASE("reflexive matching scores 1.0 everywhere") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    auto doc = testing::random_model(rng);
    auto result = match_elements(doc, doc);
    CHECK(result.unmatched_left.empty());
    CHECK(result.unmatched_right.empty());
    for (const auto& m : result.matches) {
      CHECK(m.left == m.right);
      CHECK(m.score == 1.0);
    }
    CHECK(result.matches.size() ==
          doc.compartments.size() + doc.species.size() + doc.parameters.size() + doc.reactions.size());
  }
}

TEST_CASE("annotation identity overrides different ids") {
  auto a = set_annotation(two_species("glc", "x"), "glc", Qualifier::is(), "urn:miriam:obo.chebi:CHEBI%3A17234");
  auto b = set_annotation(two_species("glucose", "y"), "glucose", Qualifier::is(),
                          "identifiers.org/obo.chebi/CHEBI:17234");
  auto result = match_elements(a, b);
  auto m = result.for_left(ElementKind::Species, "glc");
  REQUIRE(m);
  CHECK(m->right == "glucose");
  CHECK(m->score == 1.0);
  CHECK(m->basis == MatchBasis::AnnotationIdentity);
}

TEST_CASE("equivalence expansion applies to is-qualified URIs") {
  auto a = set_annotation(two_species("glc", "x"), "glc", Qualifier::is(), "identifiers.org/obo.chebi/CHEBI:17234");
  auto b = set_annotation(two_species("sugar", "y"), "sugar", Qualifier::is(), "identifiers.org/kegg.compound/C00031");
  CHECK_FALSE(match_elements(a, b).for_left(ElementKind::Species, "glc"));
  TableOracle oracle;
  MatchOptions opts;
  opts.equivalence = &oracle;
  auto m = match_elements(a, b, opts).for_left(ElementKind::Species, "glc");
  REQUIRE(m);
  CHECK(m->basis == MatchBasis::AnnotationIdentity);

  auto weak_a = set_annotation(two_species("glc", "x"), "glc", Qualifier::parse("isVersionOf"),
                               "identifiers.org/obo.chebi/CHEBI:17234");
  auto weak_b = set_annotation(two_species("sugar", "y"), "sugar", Qualifier::parse("isVersionOf"),
                               "identifiers.org/kegg.compound/C00031");
  CHECK_FALSE(match_elements(weak_a, weak_b, opts).for_left(ElementKind::Species, "glc"));
}

TEST_CASE("id identity and overlap") {
  auto a = set_annotation(two_species("A", "B"), "A", Qualifier::parse("hasPart"), "identifiers.org/uniprot/P1");
  auto b = two_species("A", "C");
  auto m = match_elements(a, b).for_left(ElementKind::Species, "A");
  REQUIRE(m);
  CHECK(m->score == doctest::Approx(0.8));
  CHECK(m->basis == MatchBasis::IdIdentity);

  // 1 shared URI out of 3 distinct: 1/3 below the default threshold.
  auto left = two_species("p", "q");
  left = set_annotation(left, "p", Qualifier::parse("hasPart"), "identifiers.org/uniprot/P1");
  left = set_annotation(left, "p", Qualifier::parse("hasPart"), "identifiers.org/uniprot/P2");
  auto right = two_species("r", "s");
  right = set_annotation(right, "r", Qualifier::parse("hasPart"), "identifiers.org/uniprot/P2");
  right = set_annotation(right, "r", Qualifier::parse("hasPart"), "identifiers.org/uniprot/P3");
  auto s = score_elements(ElementKind::Species, "p", left.species[0].annotations, "r", right.species[0].annotations);
  CHECK(s.score == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(match_elements(left, right).for_left(ElementKind::Species, "p"));
  MatchOptions loose;
  loose.threshold = 0.3;
  CHECK(match_elements(left, right, loose).for_left(ElementKind::Species, "p"));
}

TEST_CASE("overlap scores agree with brute-force Jaccard") {
  std::mt19937_64 rng(23);
  const auto& pool = testing::uri_pool();
  for (int i = 0; i < 500; ++i) {
    AnnotationSet x, y;
    std::set<std::string> xs, ys;
    for (const auto& uri : pool) {
      if (rng() % 3 == 0) {
        x.insert(Qualifier::parse("hasPart"), uri);
        xs.insert(uri);
      }
      if (rng() % 3 == 0) {
        y.insert(Qualifier::parse("isVersionOf"), uri);
        ys.insert(uri);
      }
    }
    auto s = score_elements(ElementKind::Species, "a", x, "b", y);
    CHECK(s.basis == MatchBasis::AnnotationOverlap);
    CHECK(s.score == doctest::Approx(brute_jaccard(xs, ys)).epsilon(1e-15));
    CHECK(s.score == score_elements(ElementKind::Species, "b", y, "a", x).score);
  }
}

TEST_CASE("matching is symmetric under the mirror tie-break and one-to-one") {
  std::mt19937_64 rng(29);
  testing::RandomModelOptions opts;
  for (int i = 0; i < 100; ++i) {
    auto a = testing::random_model(rng, opts);
    auto b = testing::random_model(rng, opts);
    MatchOptions lo;
    lo.threshold = 0.2;
    MatchOptions ro = lo;
    ro.tie_break = TieBreak::RightFirst;
    auto ab = match_elements(a, b, lo);
    auto ba = match_elements(b, a, ro);
    std::set<std::tuple<int, std::string, std::string>> x, y;
    std::set<std::string> left_seen, right_seen;
    for (const auto& m : ab.matches) {
      x.emplace(static_cast<int>(m.kind), m.left, m.right);
      CHECK(left_seen.insert(m.left_path()).second);
      CHECK(right_seen.insert(m.right_path()).second);
    }
    for (const auto& m : ba.matches) y.emplace(static_cast<int>(m.kind), m.right, m.left);
    CHECK(x == y);
  }
}

TEST_CASE("invalid documents are rejected") {
  auto doc = two_species("A", "B");
  doc.species[0].compartment = "nowhere";
  CHECK_THROWS_AS(match_elements(doc, doc), InvalidModelError);
}

TEST_CASE("annotation editing") {
  auto doc = two_species("A", "B");
  auto added = set_annotation(doc, "A", Qualifier::is(), "urn:miriam:obo.chebi:CHEBI%3A17234");
  CHECK(added.species[0].annotations.contains(Qualifier::is(), "identifiers.org/obo.chebi/CHEBI:17234"));
  CHECK(set_annotation(added, "A", Qualifier::is(), "identifiers.org/obo.chebi/CHEBI:17234") == added);

  auto removed = remove_annotation(added, "A", Qualifier::is(), "identifiers.org/obo.chebi/CHEBI:17234");
  CHECK(removed.document == doc);
  CHECK(removed.warnings.empty());

  auto noop = remove_annotation(doc, "A", Qualifier::is(), "identifiers.org/obo.chebi/CHEBI:17234");
  CHECK(noop.document == doc);
  CHECK(noop.warnings.size() == 1);

  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of([&] { set_annotation(doc, "zz", Qualifier::is(), "identifiers.org/a/b"); }) ==
        ErrorCode::NoSuchElement);
  CHECK(code_of([&] { remove_annotation(doc, "zz", Qualifier::is(), "identifiers.org/a/b"); }) ==
        ErrorCode::NoSuchElement);
  CHECK(code_of([&] { set_annotation(doc, "A", Qualifier::is(), "ftp://x"); }) ==
        ErrorCode::UnrecognizedUriScheme);

  auto with_local = parse_shorthand(
      "@model:2.4.1=m\n@compartments\n c=1\n@species\n c:A=1\n@reactions\n@rxn=r\n A ->\n k*A : k=1\n");
  auto edited = set_annotation(with_local, "r/k", Qualifier::parse("isDescribedBy"), "identifiers.org/pubmed/123");
  CHECK(edited.reactions[0].local_parameters[0].annotations.size() == 1);
}
