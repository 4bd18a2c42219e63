#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbmltk/semantics.hpp"

namespace sbmltk {

struct EntityRecord {
  std::string primary_uri;
  std::vector<std::string> names;  // first is the preferred name
  std::set<std::string> crossrefs;
  std::set<std::pair<std::string, std::string>> relations;  // (relation, target URI)

  /// One canonical TSV line, without the newline.
  std::string to_tsv() const;
  bool operator==(const EntityRecord&) const = default;
};

/// Parses one record line. Throws Error(MalformedRecord).
EntityRecord parse_entity_record(std::string_view line);

struct RejectedLine {
  std::size_t line = 0;
  std::string message;
};

struct IngestSummary {
  std::size_t records = 0;  // well-formed record lines read
  std::size_t changed = 0;  // records created or extended
  std::vector<RejectedLine> rejected;
};

/// Entities, synonyms and cross-references. With a directory the store is
/// persistent: `records.log` is an append-only journal of record states and
/// `index.tsv` / `names.tsv` are rebuilt from it after every ingest.
/// Reads may run concurrently; ingest is exclusive, across processes too.
class AnnotationStore : public EquivalenceOracle {
 public:
  AnnotationStore();  // in-memory
  /// Opens or creates the store under `dir`.
  explicit AnnotationStore(const std::filesystem::path& dir);
  ~AnnotationStore() override;

  IngestSummary ingest(std::string_view tsv);

  std::vector<EntityRecord> search_by_name(std::string_view query, bool exact) const;
  std::optional<EntityRecord> search_by_id(std::string_view ns, std::string_view id) const;
  /// Throws Error(UnrecognizedUriScheme).
  std::set<std::string> equivalence_set(std::string_view uri) const;
  std::set<std::string> equivalents(std::string_view uri) const override;

  std::size_t record_count() const;
  std::vector<EntityRecord> records() const;  // ordered by primary URI

 private:
  struct State;
  void load_log();
  void persist(const std::vector<EntityRecord>& changed);

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  std::unique_ptr<State> state_;
};

}  // namespace sbmltk
