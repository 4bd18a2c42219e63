#include <random>

#include "doctest.h"
#include "random_model.hpp"
#include "sbmltk/model.hpp"
#include "sbmltk/shorthand.hpp"

using namespace sbmltk;

namespace {

ModelDocument small_model() {
  return parse_shorthand(R"(@model:2.4.1=small
@compartments
  cell=1
@species
  cell:A=1
  cell:B=0
  cell:E=0.1
@parameters
  kf=1
@reactions
@rxn=r1
  2 A -> B : E
  kf*A^2*E
@rxn=r2
  B <-> A
  k*B : k=0.5
)");
}

bool has_code(const ValidationReport& report, const std::string& code) {
  for (const auto& f : report.findings) {
    if (f.code == code) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("a well-formed model validates cleanly") {
  auto report = validate_model(small_model());
  CHECK(report.ok());
  CHECK(report.findings.empty());
}

TEST_CASE("empty model is a warning only") {
  auto report = validate_model(ModelDocument{});
  CHECK(report.ok());
  CHECK(report.warning_count() == 1);
  CHECK(has_code(report, "empty-model"));
}

TEST_CASE("validation catches broken references and values") {
  auto doc = small_model();
  doc.species[0].compartment = "nucleus";
  doc.species[1].initial_amount = -1;
  doc.parameters.push_back({"A", 2.0, {}, {}});
  doc.reactions[0].reactants[0].species = "missing";
  doc.reactions[0].kinetic_law = parse_infix("kx*A");
  doc.reactions[1].sbo = "SBO:12";
  auto report = validate_model(doc);
  CHECK_FALSE(report.ok());
  CHECK(has_code(report, "unknown-compartment"));
  CHECK(has_code(report, "invalid-amount"));
  CHECK(has_code(report, "duplicate-id"));
  CHECK(has_code(report, "unknown-species"));
  CHECK(has_code(report, "unresolved-symbol"));
  CHECK(has_code(report, "invalid-sbo"));
  CHECK_THROWS_AS(require_valid(doc), InvalidModelError);
}

TEST_CASE("local parameters resolve and are checked") {
  auto doc = small_model();
  doc.reactions[1].local_parameters.push_back({"k", 1.0, {}, {}});
  CHECK(has_code(validate_model(doc), "duplicate-id"));
  doc = small_model();
  doc.reactions[1].kinetic_law.reset();
  CHECK(has_code(validate_model(doc), "orphan-kinetic-law-data"));
}

TEST_CASE("stoichiometric matrix") {
  auto n = stoichiometric_matrix(small_model());
  REQUIRE(n.rows() == 3);
  REQUIRE(n.cols() == 2);
  CHECK(n.at(0, 0) == -2.0);
  CHECK(n.at(1, 0) == 1.0);
  CHECK(n.at(2, 0) == 0.0);  // modifiers do not enter N
  CHECK(n.at(0, 1) == 1.0);
  CHECK(n.at(1, 1) == -1.0);
}

TEST_CASE("random models are valid") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto doc = testing::random_model(rng);
    auto report = validate_model(doc);
    CHECK_MESSAGE(report.ok(), report.summary());
  }
}

TEST_CASE("element paths") {
  CHECK(element_path(ElementKind::Species, "glc") == "species/glc");
  CHECK(element_path(ElementKind::Reaction, "r1") == "reaction/r1");
}
