#include "doctest.h"
#include "fixtures.hpp"
#include "sbmltk/sbml_io.hpp"
#include "sbmltk/shorthand.hpp"

using namespace sbmltk;

TEST_CASE("corpus models validate") {
  auto corpus = testing::load_corpus();
  CHECK(corpus.size() == 20);
  for (const auto& m : corpus) CHECK_MESSAGE(validate_model(m.doc).ok(), m.name);
}

TEST_CASE("corpus SBML round-trips") {
  for (const auto& m : testing::load_corpus()) {
    auto xml = write_canonical_sbml(m.doc);
    auto back = read_sbml(xml);
    CHECK_MESSAGE(back == m.doc, m.name);
    CHECK_MESSAGE(write_canonical_sbml(back) == xml, m.name);
  }
}

TEST_CASE("corpus shorthand round-trips") {
  for (const auto& m : testing::load_corpus()) {
    auto text = print_shorthand(m.doc);
    auto back = parse_shorthand(text);
    CHECK_MESSAGE(back == m.doc, m.name);
    CHECK_MESSAGE(print_shorthand(back) == text, m.name);
  }
}

TEST_CASE("XML fixtures normalize in one pass") {
  for (const auto& m : testing::load_corpus()) {
    if (m.name.size() < 4 || m.name.substr(m.name.size() - 4) != ".xml") continue;
    auto original = testing::fixture("corpus/" + m.name);
    auto once = write_canonical_sbml(read_sbml(original));
    CHECK_MESSAGE(write_canonical_sbml(read_sbml(once)) == once, m.name);
  }
}
