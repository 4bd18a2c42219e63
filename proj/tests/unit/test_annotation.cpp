#include "doctest.h"
#include "sbmltk/annotation.hpp"
#include "sbmltk/error.hpp"

using namespace sbmltk;

TEST_CASE("URI normalization") {
  CHECK(normalize_uri("urn:miriam:obo.chebi:CHEBI%3A17234") == "identifiers.org/obo.chebi/CHEBI:17234");
  CHECK(normalize_uri("urn:miriam:kegg.compound:C00031") == "identifiers.org/kegg.compound/C00031");
  CHECK(normalize_uri("http://identifiers.org/kegg.compound/C00031") ==
        "identifiers.org/kegg.compound/C00031");
  CHECK(normalize_uri("https://identifiers.org/obo.go/GO:0005737") == "identifiers.org/obo.go/GO:0005737");
  CHECK(normalize_uri("identifiers.org/uniprot/P04806") == "identifiers.org/uniprot/P04806");
  CHECK(is_normalized_uri("identifiers.org/uniprot/P04806"));
  CHECK_FALSE(is_normalized_uri("identifiers.org/uniprot"));

  for (const char* bad : {"ftp://x.org/a/b", "urn:miriam:nocolon", "http://example.org/a/b", ""}) {
    try {
      normalize_uri(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnrecognizedUriScheme);
    }
  }
}

TEST_CASE("qualifiers") {
  CHECK(Qualifier::parse("is").kind == QualifierKind::Is);
  CHECK(Qualifier::parse("isVersionOf").kind == QualifierKind::IsVersionOf);
  CHECK(Qualifier::parse("hasPart").kind == QualifierKind::HasPart);
  CHECK(Qualifier::parse("isDescribedBy").kind == QualifierKind::IsDescribedBy);
  auto other = Qualifier::parse("isHomologTo");
  CHECK(other.kind == QualifierKind::Other);
  CHECK(other.name() == "isHomologTo");
  CHECK(Qualifier::is().name() == "is");
}

TEST_CASE("annotation sets deduplicate normalized claims") {
  AnnotationSet set;
  CHECK(set.insert(Qualifier::is(), "urn:miriam:kegg.compound:C00031"));
  CHECK_FALSE(set.insert(Qualifier::is(), "https://identifiers.org/kegg.compound/C00031"));
  CHECK(set.insert(Qualifier::parse("isVersionOf"), "identifiers.org/obo.chebi/CHEBI:17234"));
  CHECK(set.size() == 2);
  CHECK(set.identity_uris() == std::set<std::string>{"identifiers.org/kegg.compound/C00031"});
  CHECK(set.all_uris().size() == 2);
  CHECK(set.contains(Qualifier::is(), "identifiers.org/kegg.compound/C00031"));
  CHECK(set.to_text() ==
        "is identifiers.org/kegg.compound/C00031, isVersionOf identifiers.org/obo.chebi/CHEBI:17234");

  AnnotationSet other;
  other.insert(Qualifier::is(), "identifiers.org/kegg.compound/C00031");
  other.insert(Qualifier::parse("hasPart"), "identifiers.org/uniprot/P04806");
  set.merge(other);
  CHECK(set.size() == 3);
  CHECK(set.erase(Qualifier::parse("hasPart"), "identifiers.org/uniprot/P04806"));
  CHECK_FALSE(set.erase(Qualifier::parse("hasPart"), "identifiers.org/uniprot/P04806"));
}
