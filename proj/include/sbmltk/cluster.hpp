#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sbmltk/model.hpp"
#include "sbmltk/semantics.hpp"

namespace sbmltk {

struct Fingerprint {
  std::string label;
  std::set<std::string> uris;

  bool operator==(const Fingerprint&) const = default;
};

/// Union of `is` URIs over every element, local parameters included. With an
/// oracle, each URI is replaced by the smallest member of its class.
Fingerprint fingerprint(const ModelDocument& doc, std::string label, const EquivalenceOracle* equiv = nullptr);

/// Jaccard index; 0 when both sets are empty.
double similarity(const Fingerprint& a, const Fingerprint& b);

struct RankEntry {
  std::string label;
  double score = 0.0;

  bool operator==(const RankEntry&) const = default;
};

/// Descending score, ties by label.
std::vector<RankEntry> rank_models(const Fingerprint& query, const std::vector<Fingerprint>& corpus);

struct SimilarityEdge {
  std::size_t a = 0;  // a < b, node indices
  std::size_t b = 0;
  double weight = 0.0;

  bool operator==(const SimilarityEdge&) const = default;
};

struct SimilarityGraph {
  std::vector<std::string> nodes;
  std::vector<SimilarityEdge> edges;   // weight >= threshold, sorted by (a, b)
  std::vector<std::size_t> cluster;    // per node; numbered by first member
  std::vector<std::optional<std::size_t>> nearest;  // most similar other node
  std::vector<double> nearest_score;
  double threshold = 0.3;

  std::size_t cluster_count() const;
};

/// Pairwise similarity matrix, symmetric with unit diagonal for nonempty
/// fingerprints.
std::vector<std::vector<double>> similarity_matrix(const std::vector<Fingerprint>& corpus);

/// Average-linkage agglomeration: repeatedly merges the most similar pair of
/// clusters while that similarity is positive and at least `threshold`. Ties
/// within 1e-12 go to the pair with the smallest member indices.
SimilarityGraph cluster_models(const std::vector<Fingerprint>& corpus, double threshold = 0.3);

/// Columns: label, cluster, nearest, score.
std::string cluster_tsv(const SimilarityGraph& graph);

}  // namespace sbmltk
