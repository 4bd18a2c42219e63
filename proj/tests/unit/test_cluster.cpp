#include <doctest.h>

#include <filesystem>
#include <random>

#include "cluster_oracle.hpp"
#include "fixtures.hpp"
#include "random_model.hpp"
#include "sbmltk/annodb.hpp"
#include "sbmltk/cluster.hpp"
#include "sbmltk/shorthand.hpp"

using namespace sbmltk;
using namespace sbmltk::testing;

namespace {

std::vector<Fingerprint> cluster_corpus() {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(fixture_path("cluster"))) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Fingerprint> out;
  for (const auto& f : files) out.push_back(fingerprint(parse_shorthand(read_file(f)), f.stem().string()));
  return out;
}

Fingerprint fp(std::string label, std::set<std::string> uris) { return {std::move(label), std::move(uris)}; }

}  // namespace

TEST_CASE("fingerprints") {
  SUBCASE("no annotations") {
    CHECK(fingerprint(parse_shorthand(fixture("mymodel.shs")), "m").uris.empty());
  }
  SUBCASE("explicit enumeration") {
    auto doc = parse_shorthand(fixture("corpus/02_upper_glycolysis.shs"));
    std::set<std::string> want;
    for (const auto& s : doc.species) {
      for (const auto& e : s.annotations) {
        if (e.qualifier.kind == QualifierKind::Is) want.insert(e.uri);
      }
    }
    for (const auto& r : doc.reactions) {
      for (const auto& e : r.annotations) {
        if (e.qualifier.kind == QualifierKind::Is) want.insert(e.uri);
      }
    }
    for (const auto& c : doc.compartments) {
      for (const auto& e : c.annotations) {
        if (e.qualifier.kind == QualifierKind::Is) want.insert(e.uri);
      }
    }
    CHECK(fingerprint(doc, "g").uris == want);
  }
  SUBCASE("three annotations") {
    auto doc = parse_shorthand(
        "@model:2.4.1=t\n@compartments\n  c=1\n@species\n  c:A=1\n  c:B=1\n@reactions\n@rxn=r\n  A -> B\n  A\n"
        "@annotations\n  A is identifiers.org/chebi/CHEBI:17234\n  A isVersionOf identifiers.org/chebi/CHEBI:4167\n"
        "  B is identifiers.org/kegg.compound/C00031\n  r is identifiers.org/ec-code/2.7.1.1\n");
    CHECK(fingerprint(doc, "t").uris == std::set<std::string>{"identifiers.org/chebi/CHEBI:17234",
                                                              "identifiers.org/ec-code/2.7.1.1",
                                                              "identifiers.org/kegg.compound/C00031"});
  }
  SUBCASE("cross-linked identifiers collapse") {
    AnnotationStore store;
    store.ingest("identifiers.org/chebi/CHEBI:17234\tglucose\tidentifiers.org/kegg.compound/C00031\n");
    auto doc = parse_shorthand(
        "@model:2.4.1=t\n@compartments\n  c=1\n@species\n  c:A=1\n  c:B=1\n@reactions\n"
        "@annotations\n  A is identifiers.org/chebi/CHEBI:17234\n  B is identifiers.org/kegg.compound/C00031\n");
    auto f = fingerprint(doc, "t", &store);
    CHECK(f.uris == std::set<std::string>{"identifiers.org/chebi/CHEBI:17234"});
    CHECK(fingerprint(doc, "t").uris.size() == 2);
  }
}

TEST_CASE("similarity") {
  auto a = fp("a", {"x", "y", "z"});
  CHECK(similarity(a, a) == 1.0);
  CHECK(similarity(a, fp("b", {"p", "q"})) == 0.0);
  CHECK(similarity(fp("a", {}), fp("b", {})) == 0.0);
  CHECK(similarity(fp("a", {"1", "2", "3"}), fp("b", {"2", "3", "4", "5"})) == doctest::Approx(0.4).epsilon(1e-15));
  std::mt19937_64 rng(2);
  const auto& pool = uri_pool();
  for (int i = 0; i < 300; ++i) {
    Fingerprint x{"x", {}}, y{"y", {}};
    for (const auto& u : pool) {
      if (rng() % 3 == 0) x.uris.insert(u);
      if (rng() % 3 == 0) y.uris.insert(u);
    }
    double s = similarity(x, y);
    CHECK(s == similarity(y, x));
    CHECK(s == doctest::Approx(set_jaccard(x.uris, y.uris)).epsilon(1e-15));
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    if (!x.uris.empty()) CHECK(similarity(x, x) == 1.0);
  }
}

TEST_CASE("ranking") {
  auto corpus = cluster_corpus();
  CHECK(rank_models(corpus[0], {}).empty());
  auto ranked = rank_models(corpus[0], corpus);
  CHECK(ranked[0] == RankEntry{corpus[0].label, 1.0});
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    CHECK((ranked[i - 1].score > ranked[i].score ||
           (ranked[i - 1].score == ranked[i].score && ranked[i - 1].label < ranked[i].label)));
  }
  // pairwise oracle on the first four models
  std::vector<Fingerprint> four(corpus.begin(), corpus.begin() + 4);
  auto got = rank_models(four[1], four);
  std::vector<std::pair<double, std::string>> want;
  for (const auto& f : four) want.emplace_back(-set_jaccard(four[1].uris, f.uris), f.label);
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < 4; ++i) CHECK(got[i].label == want[i].second);
}

TEST_CASE("clustering") {
  SUBCASE("single model") {
    auto g = cluster_models({fp("a", {"x"})});
    CHECK(g.cluster_count() == 1);
    CHECK(g.edges.empty());
  }
  SUBCASE("identical pair") {
    auto g = cluster_models({fp("a", {"x", "y"}), fp("b", {"x", "y"})}, 0.3);
    CHECK(g.cluster_count() == 1);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].weight == 1.0);
  }
  SUBCASE("fixture corpus against the brute-force oracle") {
    auto corpus = cluster_corpus();
    REQUIRE(corpus.size() == 10);
    std::vector<std::set<std::string>> sets;
    for (const auto& f : corpus) sets.push_back(f.uris);
    for (double t : {0.0, 0.1, 0.2, 0.3, 0.45, 0.6, 1.0, 1.01}) {
      CHECK(cluster_models(corpus, t).cluster == brute_force_clusters(sets, t));
    }
    auto g = cluster_models(corpus, 0.3);
    CHECK(g.cluster_count() >= 3);
    CHECK(cluster_models(corpus, 1.01).cluster_count() == corpus.size());
  }
  SUBCASE("random corpora against the oracle") {
    std::mt19937_64 rng(31);
    const auto& pool = uri_pool();
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Fingerprint> corpus;
      std::vector<std::set<std::string>> sets;
      auto n = 1 + rng() % 9;
      for (std::size_t i = 0; i < n; ++i) {
        Fingerprint f{"m" + std::to_string(i), {}};
        for (const auto& u : pool) {
          if (rng() % 3 == 0) f.uris.insert(u);
        }
        sets.push_back(f.uris);
        corpus.push_back(std::move(f));
      }
      double t = static_cast<double>(rng() % 11) / 10.0;
      CHECK(cluster_models(corpus, t).cluster == brute_force_clusters(sets, t));
    }
  }
  SUBCASE("threshold zero on a connected corpus gives one cluster") {
    std::vector<Fingerprint> chain = {fp("a", {"1", "2"}), fp("b", {"2", "3"}), fp("c", {"3", "4"}), fp("d", {"4", "5"})};
    CHECK(cluster_models(chain, 0.0).cluster_count() == 1);
  }
}

TEST_CASE("cluster table") {
  auto g = cluster_models({fp("a", {"1", "2"}), fp("b", {"2", "3", "4", "5", "1"}), fp("c", {"9"})});
  CHECK(cluster_tsv(g) == "label\tcluster\tnearest\tscore\na\t0\tb\t0.4\nb\t0\ta\t0.4\nc\t1\ta\t0\n");
}
