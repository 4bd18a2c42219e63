#include "sbmltk/cluster.hpp"

#include <algorithm>
#include <cmath>

#include "sbmltk/text.hpp"

namespace sbmltk {

namespace {

constexpr double kTieEpsilon = 1e-12;

void add_uris(const AnnotationSet& set, std::set<std::string>& out) {
  auto uris = set.identity_uris();
  out.insert(uris.begin(), uris.end());
}

}  // namespace

Fingerprint fingerprint(const ModelDocument& doc, std::string label, const EquivalenceOracle* equiv) {
  require_valid(doc);
  std::set<std::string> raw;
  for (const auto& c : doc.compartments) add_uris(c.annotations, raw);
  for (const auto& s : doc.species) add_uris(s.annotations, raw);
  for (const auto& p : doc.parameters) add_uris(p.annotations, raw);
  for (const auto& r : doc.reactions) {
    add_uris(r.annotations, raw);
    for (const auto& p : r.local_parameters) add_uris(p.annotations, raw);
  }
  Fingerprint f{std::move(label), {}};
  for (const auto& uri : raw) {
    if (!equiv) {
      f.uris.insert(uri);
      continue;
    }
    auto cls = equiv->equivalents(uri);
    f.uris.insert(cls.empty() ? uri : *cls.begin());
  }
  return f;
}

double similarity(const Fingerprint& a, const Fingerprint& b) {
  if (a.uris.empty() && b.uris.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& u : a.uris) common += b.uris.count(u);
  return static_cast<double>(common) / static_cast<double>(a.uris.size() + b.uris.size() - common);
}

std::vector<RankEntry> rank_models(const Fingerprint& query, const std::vector<Fingerprint>& corpus) {
  std::vector<RankEntry> out;
  for (const auto& f : corpus) out.push_back({f.label, similarity(query, f)});
  std::sort(out.begin(), out.end(), [](const RankEntry& x, const RankEntry& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.label < y.label;
  });
  return out;
}

std::size_t SimilarityGraph::cluster_count() const {
  std::size_t n = 0;
  for (auto c : cluster) n = std::max(n, c + 1);
  return n;
}

std::vector<std::vector<double>> similarity_matrix(const std::vector<Fingerprint>& corpus) {
  const auto n = corpus.size();
  std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    s[i][i] = similarity(corpus[i], corpus[i]);
    for (std::size_t j = i + 1; j < n; ++j) s[i][j] = s[j][i] = similarity(corpus[i], corpus[j]);
  }
  return s;
}

SimilarityGraph cluster_models(const std::vector<Fingerprint>& corpus, double threshold) {
  const auto n = corpus.size();
  auto sim = similarity_matrix(corpus);
  SimilarityGraph g;
  g.threshold = threshold;
  for (const auto& f : corpus) g.nodes.push_back(f.label);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sim[i][j] >= threshold) g.edges.push_back({i, j, sim[i][j]});
    }
  }
  g.nearest.assign(n, std::nullopt);
  g.nearest_score.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      auto& best = g.nearest[i];
      if (!best || sim[i][j] > g.nearest_score[i] ||
          (sim[i][j] == g.nearest_score[i] && corpus[j].label < corpus[*best].label)) {
        best = j;
        g.nearest_score[i] = sim[i][j];
      }
    }
  }

  // Active clusters keyed by smallest member; link[i][j] is the average
  // similarity between clusters i and j, kept current by Lance-Williams.
  std::vector<bool> active(n, true);
  std::vector<std::size_t> size(n, 1), parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto link = sim;
  for (;;) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    double best_value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (!best || link[i][j] > best_value + kTieEpsilon) {
          best = {i, j};
          best_value = link[i][j];
        }
      }
    }
    if (!best || !(best_value > 0.0) || best_value < threshold) break;
    auto [i, j] = *best;
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i || k == j) continue;
      double merged = (static_cast<double>(size[i]) * link[i][k] + static_cast<double>(size[j]) * link[j][k]) /
                      static_cast<double>(size[i] + size[j]);
      link[i][k] = link[k][i] = merged;
    }
    size[i] += size[j];
    active[j] = false;
    for (auto& p : parent) {
      if (p == j) p = i;
    }
  }

  std::map<std::size_t, std::size_t> numbering;
  g.cluster.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = numbering.emplace(parent[i], numbering.size());
    g.cluster[i] = it->second;
  }
  return g;
}

std::string cluster_tsv(const SimilarityGraph& g) {
  std::string out = "label\tcluster\tnearest\tscore\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out += tsv_escape(g.nodes[i]) + "\t" + std::to_string(g.cluster[i]) + "\t";
    if (g.nearest[i]) out += tsv_escape(g.nodes[*g.nearest[i]]) + "\t" + format_real(g.nearest_score[i]);
    else out += "\t";
    out += "\n";
  }
  return out;
}

}  // namespace sbmltk
