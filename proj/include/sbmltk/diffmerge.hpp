#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbmltk/semantics.hpp"

namespace sbmltk {

enum class DiffKind { Added, Removed, Changed };

std::string_view diff_kind_name(DiffKind kind);

struct AttributeDelta {
  std::string attribute;
  std::string left;
  std::string right;

  bool operator==(const AttributeDelta&) const = default;
};

struct DiffEntry {
  std::string path;  // "model" for the document header
  DiffKind kind = DiffKind::Changed;
  std::vector<AttributeDelta> deltas;  // empty for added/removed

  bool operator==(const DiffEntry&) const = default;
};

struct DiffReport {
  std::vector<DiffEntry> entries;
  std::vector<MatchScore> matching;

  bool empty() const { return entries.empty(); }
  bool header_changed() const;
  std::size_t count(DiffKind kind) const;
};

/// Throws InvalidModelError.
DiffReport diff_models(const ModelDocument& a, const ModelDocument& b,
                       const EquivalenceOracle* equivalence = nullptr);

/// JSON document and one-line-per-delta TSV (path, kind, attribute, left, right).
std::string diff_to_json(const DiffReport& report);
std::string diff_to_tsv(const DiffReport& report);

// ---------------------------------------------------------------------------

enum class MergeChoice { Fail, Left, Right };

struct MergePolicy {
  MergeChoice fallback = MergeChoice::Fail;
  std::map<std::pair<std::string, std::string>, MergeChoice> overrides;  // (path, attribute)

  static MergePolicy fail() { return {}; }
  static MergePolicy left() { return {MergeChoice::Left, {}}; }
  static MergePolicy right() { return {MergeChoice::Right, {}}; }
};

/// Policy file: `default<TAB>fail|left|right` plus `<path><TAB><attribute><TAB>left|right`
/// lines, `#` comments. Throws Error(MalformedPolicy).
MergePolicy parse_merge_policy(std::string_view text);

struct Conflict {
  std::string path;
  std::string attribute;
  std::string left;
  std::string right;

  bool operator==(const Conflict&) const = default;
};

struct ConflictReport {
  std::vector<Conflict> conflicts;

  bool empty() const { return conflicts.empty(); }
  bool operator==(const ConflictReport&) const = default;
};

std::string conflicts_to_json(const ConflictReport& report);
std::string conflicts_to_tsv(const ConflictReport& report);

class MergeConflictError : public Error {
 public:
  explicit MergeConflictError(ConflictReport report);
  const ConflictReport& report() const { return report_; }

 private:
  ConflictReport report_;
};

struct RenameRecord {
  std::size_t source = 0;  // 1-based index of the merged model
  ElementKind kind = ElementKind::Species;
  std::string from;
  std::string to;

  bool operator==(const RenameRecord&) const = default;
};

struct MergeResult {
  ModelDocument document;
  std::vector<Conflict> resolved;  // conflicts settled by the policy
  std::vector<RenameRecord> renames;
};

/// Left fold of pairwise merges in list order. Throws MergeConflictError when
/// a conflict resolves to Fail, InvalidModelError for invalid inputs.
MergeResult merge_models(const std::vector<ModelDocument>& models, const MergePolicy& policy = {},
                         const EquivalenceOracle* equivalence = nullptr);

std::string renames_to_json(const std::vector<RenameRecord>& renames);

// ---------------------------------------------------------------------------

/// Dependency closure of `seeds`. With `expand_reactions`, seeded species
/// also pull every reaction they take part in. Throws Error(NoSuchElement)
/// or InvalidModelError.
ModelDocument split_model(const ModelDocument& doc, const std::set<std::string>& seeds,
                          bool expand_reactions = false);

}  // namespace sbmltk
