#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sbmltk/model.hpp"

namespace sbmltk {

/// Source of URI equivalence classes (implemented by AnnotationStore).
/// Implementations must tolerate concurrent calls.
class EquivalenceOracle {
 public:
  virtual ~EquivalenceOracle() = default;
  /// The class containing `uri`, which always includes `uri` itself.
  virtual std::set<std::string> equivalents(std::string_view uri) const = 0;
};

enum class MatchBasis { AnnotationIdentity, IdIdentity, AnnotationOverlap };

std::string_view match_basis_name(MatchBasis basis);

struct MatchScore {
  ElementKind kind = ElementKind::Species;
  std::string left;   // element id in the left document
  std::string right;  // element id in the right document
  double score = 0.0;
  MatchBasis basis = MatchBasis::AnnotationOverlap;

  std::string left_path() const { return element_path(kind, left); }
  std::string right_path() const { return element_path(kind, right); }
  bool operator==(const MatchScore&) const = default;
};

/// Order used to break score ties. LeftFirst compares left document order
/// then right document order; RightFirst is its mirror, so that
/// match(a, b, LeftFirst) and match(b, a, RightFirst) pick the same pairs.
enum class TieBreak { LeftFirst, RightFirst };

struct MatchOptions {
  const EquivalenceOracle* equivalence = nullptr;
  double threshold = 0.5;
  TieBreak tie_break = TieBreak::LeftFirst;
  /// Optional veto on candidate pairs, evaluated after scoring.
  std::function<bool(ElementKind, std::string_view left, std::string_view right)> admit;
};

struct MatchResult {
  std::vector<MatchScore> matches;          // in selection order
  std::vector<std::string> unmatched_left;  // element paths, document order
  std::vector<std::string> unmatched_right;

  /// Right-side id matched to the left element, or nullptr.
  const MatchScore* for_left(ElementKind kind, std::string_view id) const;
  const MatchScore* for_right(ElementKind kind, std::string_view id) const;
};

/// Score of one candidate pair of the same kind, before thresholding.
MatchScore score_elements(ElementKind kind, std::string_view left_id, const AnnotationSet& left,
                          std::string_view right_id, const AnnotationSet& right,
                          const EquivalenceOracle* equivalence = nullptr);

/// Greedy one-to-one matching of compartments, species, parameters and
/// reactions. Pairs scoring below the threshold, or zero, never match.
/// Throws InvalidModelError if either document fails validation.
MatchResult match_elements(const ModelDocument& a, const ModelDocument& b, const MatchOptions& opts = {});

/// Element addressed by id, or `reaction/local` for a local parameter.
/// Throws Error(NoSuchElement) or Error(UnrecognizedUriScheme).
ModelDocument set_annotation(const ModelDocument& doc, std::string_view element, const Qualifier& qualifier,
                             std::string_view uri);

struct AnnotationEdit {
  ModelDocument document;
  std::vector<std::string> warnings;
};

/// Removing an absent entry leaves the document unchanged and adds a warning.
AnnotationEdit remove_annotation(const ModelDocument& doc, std::string_view element,
                                 const Qualifier& qualifier, std::string_view uri);

}  // namespace sbmltk
