#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sbmltk/annodb.hpp"
#include "sbmltk/balancing.hpp"
#include "sbmltk/diffmerge.hpp"
#include "sbmltk/sbo_assign.hpp"
#include "sbmltk/viz.hpp"

namespace sbmltk {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// Shorthand when the text starts with `@model:`, SBML when it starts with
/// `<` (leading blanks and a BOM skipped). Reader errors are rethrown as
/// Error(ParseFailure) carrying the reader's code and message.
ModelDocument load_model_text(std::string_view bytes);

/// Content-addressed store of canonical SBML under `<dir>/objects/<hash>.xml`.
/// Writes go to a temporary file renamed into place; reads take no lock.
class ModelStore {
 public:
  explicit ModelStore(std::filesystem::path dir);

  /// Parses, canonicalizes and stores; returns the handle.
  std::string put(std::string_view bytes);
  std::string put(const ModelDocument& doc);
  /// Throws Error(UnknownHandle).
  std::string get_bytes(std::string_view hash) const;
  ModelDocument get(std::string_view hash) const;
  bool contains(std::string_view hash) const;
  std::vector<std::string> list() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path object_path(std::string_view hash) const;
  std::filesystem::path dir_;
};

bool is_handle(std::string_view text);

// ---------------------------------------------------------------------------
// Payloads shared by the CLI and the HTTP service

namespace content_type {
inline constexpr std::string_view json = "application/json";
inline constexpr std::string_view tsv = "text/tab-separated-values";
inline constexpr std::string_view sbml = "application/sbml+xml";
inline constexpr std::string_view shorthand = "text/x-shorthand";
inline constexpr std::string_view dot = "text/vnd.graphviz";
}  // namespace content_type

struct Payload {
  int status = 200;
  std::string content_type;
  std::string body;

  bool operator==(const Payload&) const = default;
};

enum class Format { Json, Tsv, Dot };

int http_status(ErrorCode code);
/// 1 usage, 2 validation or parse, 3 conflict, 4 numerical failure.
int exit_code(ErrorCode code);

/// `{"error":{"code","message"}}`, plus `findings` for invalid models. A merge
/// conflict yields the ConflictReport itself (JSON, or TSV when asked).
Payload error_payload(const std::exception& e, Format format = Format::Json);

struct LabeledModel {
  std::string label;
  ModelDocument doc;
};

namespace api {

Payload compile_shorthand(std::string_view source);
Payload decompile_sbml(std::string_view xml);
Payload model_bytes(const ModelDocument& doc, bool as_shorthand);
Payload validate(const ModelDocument& doc);
Payload diff(const ModelDocument& a, const ModelDocument& b, const EquivalenceOracle* equiv, Format format);
Payload merge(const std::vector<ModelDocument>& models, const MergePolicy& policy, const EquivalenceOracle* equiv);
Payload split(const ModelDocument& doc, const std::set<std::string>& seeds, bool expand);
Payload annotate_set(const ModelDocument& doc, std::string_view element, std::string_view qualifier,
                     std::string_view uri);
Payload annotate_remove(const ModelDocument& doc, std::string_view element, std::string_view qualifier,
                        std::string_view uri);
Payload balance(const ModelDocument& doc, std::string_view data_tsv, const BalancingConfig& config, Format format);
Payload sbo(const ModelDocument& doc, const SboRuleTable& rules, Format format);
Payload cluster(const std::vector<LabeledModel>& models, double threshold, const EquivalenceOracle* equiv,
                Format format);
Payload visualize(const ModelDocument& doc, const DotOptions& opts);
Payload search_name(const AnnotationStore& db, std::string_view name, bool exact);
Payload search_id(const AnnotationStore& db, std::string_view ns, std::string_view id);
Payload ingest(AnnotationStore& db, std::string_view tsv);
Payload stored(std::string_view hash);

}  // namespace api

// ---------------------------------------------------------------------------
// HTTP routing

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;
};

/// Stateless router over the store, the annotation database and the SBO
/// rule table. Safe for concurrent calls.
class Service {
 public:
  Service(ModelStore& store, AnnotationStore* db, SboRuleTable rules);

  Payload handle(const Request& request) const;

 private:
  Payload route(const Request& request) const;
  ModelDocument model_ref(const std::string& ref) const;

  ModelStore& store_;
  AnnotationStore* db_;
  SboRuleTable rules_;
};

/// Blocks serving `service` until the process ends. Port 0 picks a free
/// port; `on_ready` receives the bound port before requests are accepted.
/// Throws Error(Io) if the port cannot be bound.
void serve_http(const Service& service, const std::string& host, int port,
                const std::function<void(int)>& on_ready = {});

}  // namespace sbmltk
