#include "sbmltk/semantics.hpp"

#include <algorithm>
#include <tuple>

namespace sbmltk {

std::string_view match_basis_name(MatchBasis basis) {
  switch (basis) {
    case MatchBasis::AnnotationIdentity: return "annotation-identity";
    case MatchBasis::IdIdentity: return "id-identity";
    case MatchBasis::AnnotationOverlap: return "annotation-overlap";
  }
  return "unknown";
}

const MatchScore* MatchResult::for_left(ElementKind kind, std::string_view id) const {
  for (const auto& m : matches) {
    if (m.kind == kind && m.left == id) return &m;
  }
  return nullptr;
}

const MatchScore* MatchResult::for_right(ElementKind kind, std::string_view id) const {
  for (const auto& m : matches) {
    if (m.kind == kind && m.right == id) return &m;
  }
  return nullptr;
}

namespace {

std::set<std::string> expand(const std::set<std::string>& uris, const EquivalenceOracle* equivalence) {
  if (!equivalence) return uris;
  std::set<std::string> out;
  for (const auto& uri : uris) {
    auto cls = equivalence->equivalents(uri);
    out.insert(cls.begin(), cls.end());
    out.insert(uri);
  }
  return out;
}

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) ++ia;
    else ++ib;
  }
  return false;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& x : a) common += b.count(x);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

struct Candidate {
  std::string id;
  const AnnotationSet* annotations;
};

template <typename T>
std::vector<Candidate> candidates(const std::vector<T>& items) {
  std::vector<Candidate> out;
  for (const auto& item : items) out.push_back({item.id, &item.annotations});
  return out;
}

}  // namespace

MatchScore score_elements(ElementKind kind, std::string_view left_id, const AnnotationSet& left,
                          std::string_view right_id, const AnnotationSet& right,
                          const EquivalenceOracle* equivalence) {
  MatchScore m;
  m.kind = kind;
  m.left = std::string(left_id);
  m.right = std::string(right_id);
  auto left_is = left.identity_uris();
  auto right_is = right.identity_uris();
  if (!left_is.empty() && !right_is.empty() && intersects(expand(left_is, equivalence), expand(right_is, equivalence))) {
    m.score = 1.0;
    m.basis = MatchBasis::AnnotationIdentity;
  } else if (left_id == right_id) {
    // Same id and identical annotations is as strong as it gets.
    m.score = left == right ? 1.0 : 0.8;
    m.basis = MatchBasis::IdIdentity;
  } else {
    m.score = jaccard(left.all_uris(), right.all_uris());
    m.basis = MatchBasis::AnnotationOverlap;
  }
  return m;
}

MatchResult match_elements(const ModelDocument& a, const ModelDocument& b, const MatchOptions& opts) {
  require_valid(a);
  require_valid(b);
  MatchResult result;

  auto match_kind = [&](ElementKind kind, const std::vector<Candidate>& left,
                        const std::vector<Candidate>& right) {
    struct Scored {
      MatchScore score;
      std::size_t li, ri;
    };
    std::vector<Scored> scored;
    for (std::size_t i = 0; i < left.size(); ++i) {
      for (std::size_t j = 0; j < right.size(); ++j) {
        auto s = score_elements(kind, left[i].id, *left[i].annotations, right[j].id, *right[j].annotations,
                                opts.equivalence);
        if (s.score < opts.threshold || s.score <= 0.0) continue;
        if (opts.admit && !opts.admit(kind, left[i].id, right[j].id)) continue;
        scored.push_back({std::move(s), i, j});
      }
    }
    std::stable_sort(scored.begin(), scored.end(), [&](const Scored& x, const Scored& y) {
      if (x.score.score != y.score.score) return x.score.score > y.score.score;
      if (opts.tie_break == TieBreak::LeftFirst) return std::tie(x.li, x.ri) < std::tie(y.li, y.ri);
      return std::tie(x.ri, x.li) < std::tie(y.ri, y.li);
    });
    std::vector<bool> left_used(left.size()), right_used(right.size());
    for (auto& s : scored) {
      if (left_used[s.li] || right_used[s.ri]) continue;
      left_used[s.li] = right_used[s.ri] = true;
      result.matches.push_back(std::move(s.score));
    }
    for (std::size_t i = 0; i < left.size(); ++i) {
      if (!left_used[i]) result.unmatched_left.push_back(element_path(kind, left[i].id));
    }
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (!right_used[j]) result.unmatched_right.push_back(element_path(kind, right[j].id));
    }
  };

  match_kind(ElementKind::Compartment, candidates(a.compartments), candidates(b.compartments));
  match_kind(ElementKind::Species, candidates(a.species), candidates(b.species));
  match_kind(ElementKind::Parameter, candidates(a.parameters), candidates(b.parameters));
  match_kind(ElementKind::Reaction, candidates(a.reactions), candidates(b.reactions));
  return result;
}

namespace {

AnnotationSet& locate(ModelDocument& doc, std::string_view element) {
  auto slash = element.find('/');
  if (slash != std::string_view::npos) {
    auto rxn = element.substr(0, slash);
    auto local = element.substr(slash + 1);
    for (auto& r : doc.reactions) {
      if (r.id != rxn) continue;
      for (auto& p : r.local_parameters) {
        if (p.id == local) return p.annotations;
      }
    }
  } else {
    for (auto& c : doc.compartments) if (c.id == element) return c.annotations;
    for (auto& s : doc.species) if (s.id == element) return s.annotations;
    for (auto& p : doc.parameters) if (p.id == element) return p.annotations;
    for (auto& r : doc.reactions) if (r.id == element) return r.annotations;
  }
  throw Error(ErrorCode::NoSuchElement, "no element " + std::string(element));
}

}  // namespace

ModelDocument set_annotation(const ModelDocument& doc, std::string_view element, const Qualifier& qualifier,
                             std::string_view uri) {
  ModelDocument out = doc;
  locate(out, element).insert(qualifier, uri);
  return out;
}

AnnotationEdit remove_annotation(const ModelDocument& doc, std::string_view element, const Qualifier& qualifier,
                                 std::string_view uri) {
  AnnotationEdit edit{doc, {}};
  auto& set = locate(edit.document, element);
  bool removed = false;
  try {
    removed = set.erase(qualifier, uri);
  } catch (const Error&) {
    removed = false;  // an unparseable URI cannot be present
  }
  if (!removed) {
    edit.warnings.push_back("no annotation '" + qualifier.name() + " " + std::string(uri) + "' on " +
                            std::string(element));
  }
  return edit;
}

}  // namespace sbmltk
