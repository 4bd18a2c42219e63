#include <chrono>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "random_model.hpp"
#include "sbmltk/sbml_io.hpp"
#include "sbmltk/shorthand.hpp"

using namespace sbmltk;

namespace {

ShorthandError error_of(const std::string& text) {
  try {
    parse_shorthand(text);
  } catch (const ShorthandError& e) {
    return e;
  }
  FAIL("no error for " << text);
  return ShorthandError(ErrorCode::Io, 0, 0, "");
}

}  // namespace

TEST_CASE("the reference listing compiles") {
  auto doc = parse_shorthand(testing::fixture("mymodel.shs"));
  CHECK(doc.id == "MyModel");
  CHECK(doc.level == 2);
  CHECK(doc.version == 4);
  CHECK(doc.compartments.size() == 1);
  CHECK(doc.species.size() == 2);
  CHECK(doc.parameters.size() == 2);
  REQUIRE(doc.reactions.size() == 1);
  const auto& r = doc.reactions[0];
  CHECK(r.id == "reaction1");
  CHECK_FALSE(r.reversible);
  REQUIRE(r.kinetic_law);
  Environment ones{{"kf", 1}, {"kr", 1}, {"A", 1}, {"B", 1}};
  CHECK(eval_expression(*r.kinetic_law, ones) == 0.0);
  CHECK(validate_model(doc).ok());

  auto printed = print_shorthand(doc);
  CHECK(parse_shorthand(printed) == doc);
  CHECK(print_shorthand(parse_shorthand(printed)) == printed);
}

TEST_CASE("comments, CRLF and blank lines") {
  auto doc = parse_shorthand(
      "# leading comment\r\n@model:3.1=m \"A # not a comment\"\r\n\r\n@compartments\r\n  c=1 # size\r\n");
  CHECK(doc.level == 3);
  CHECK(doc.name == "A # not a comment");
  CHECK(doc.compartments.size() == 1);
}

TEST_CASE("species flags, names, modifiers and local parameters") {
  auto doc = parse_shorthand(R"(@model:2.4.1=m "My model"
@compartments
  cyt=1.5 "cytosol"
@species
  cyt:S=2 b "substrate"
  cyt:P=0 c
  cyt:E=0.01
@reactions
@rxn=v "enzyme step"
  2 S <-> P : E
  kcat*E*S/(Km+S) : kcat=10, Km=0.1
@annotations
  S is urn:miriam:obo.chebi:CHEBI%3A17234
  v sbo SBO:0000176
  v law-sbo SBO:0000028
  v/Km sbo SBO:0000027
)");
  REQUIRE(doc.species.size() == 3);
  CHECK(doc.species[0].boundary);
  CHECK(doc.species[0].name == "substrate");
  CHECK(doc.species[1].constant);
  CHECK(doc.compartments[0].name == "cytosol");
  const auto& v = doc.reactions.at(0);
  CHECK(v.reversible);
  CHECK(v.reactants.at(0).stoichiometry == 2.0);
  CHECK(v.modifiers == std::vector<std::string>{"E"});
  CHECK(v.local_parameters.size() == 2);
  CHECK(v.sbo == "SBO:0000176");
  CHECK(v.kinetic_law_sbo == "SBO:0000028");
  CHECK(v.local_parameters[1].sbo == "SBO:0000027");
  CHECK(doc.species[0].annotations.contains(Qualifier::is(), "identifiers.org/obo.chebi/CHEBI:17234"));
  CHECK(validate_model(doc).ok());
  CHECK(parse_shorthand(print_shorthand(doc)) == doc);
}

TEST_CASE("diagnostics") {
  auto e = error_of("@model:2.4.1=m\n@compartments\n  c=1\n  c=2\n");
  CHECK(e.code() == ErrorCode::DuplicateId);
  CHECK(e.line() == 4);
  CHECK(e.column() == 3);

  e = error_of("@model:2.4.1=m\n@widgets\n");
  CHECK(e.code() == ErrorCode::UnknownSection);
  CHECK(e.line() == 2);

  e = error_of("@model:2.4.1=m\n@compartments\n c=1\n@species\n c:A=1\n@reactions\n@rxn=r1\n@rxn=r2\n A -> \n");
  CHECK(e.code() == ErrorCode::DanglingReactionBlock);
  CHECK(e.line() == 7);

  e = error_of("@model:2.4.1=m\n@compartments\n c=\n");
  CHECK(e.code() == ErrorCode::SyntaxError);
  CHECK(e.line() == 3);
  CHECK(e.column() == 4);

  e = error_of("@model:2.4.1=m\n@compartments\n c=1\n@species\n c:A=1\n@reactions\n@rxn=r1\n A -> \n k*(A\n");
  CHECK(e.code() == ErrorCode::SyntaxError);
  CHECK(e.line() == 9);
  CHECK(e.column() == 6);

  CHECK(error_of("@model:4.1=m\n").code() == ErrorCode::SyntaxError);
  CHECK(error_of("@compartments\n").code() == ErrorCode::SyntaxError);
  CHECK(error_of("@model:2.4=m\n@compartments\n c=1\n@annotations\n zz is identifiers.org/a/b\n").line() == 5);
}

TEST_CASE("reference errors are left to validation") {
  auto doc = parse_shorthand("@model:2.4.1=m\n@compartments\n c=1\n@species\n nucleus:A=1\n");
  CHECK_FALSE(validate_model(doc).ok());
}

TEST_CASE("print/parse identity on random models") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto doc = testing::random_model(rng);
    auto text = print_shorthand(doc);
    auto back = parse_shorthand(text);
    REQUIRE_MESSAGE(back == doc, text);
    CHECK(print_shorthand(back) == text);
  }
}

TEST_CASE("compiled shorthand writes SBML that reads back identically") {
  auto doc = parse_shorthand(testing::fixture("mymodel.shs"));
  CHECK(read_sbml(write_canonical_sbml(doc)) == doc);
}
