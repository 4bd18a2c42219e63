#include "sbmltk/frontend.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "json.hpp"
#include "sbmltk/cluster.hpp"
#include "sbmltk/sbml_io.hpp"
#include "sbmltk/semantics.hpp"
#include "sbmltk/shorthand.hpp"
#include "sbmltk/text.hpp"

namespace sbmltk {

using Json = nlohmann::ordered_json;

namespace {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Payload json_payload(const Json& j, int status = 200) {
  return {status, std::string(content_type::json), dump(j)};
}

Payload text_payload(std::string body, std::string_view type) { return {200, std::string(type), std::move(body)}; }

std::string read_whole(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

ModelDocument load_model_text(std::string_view bytes) {
  auto text = bytes;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '\r' || text.front() == '\n')) {
    text.remove_prefix(1);
  }
  try {
    if (text.substr(0, 7) == "@model:") return parse_shorthand(bytes);
    if (!text.empty() && text.front() == '<') return read_sbml(bytes);
  } catch (const InvalidModelError&) {
    throw;
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseFailure, std::string(error_token(e.code())) + ": " + e.what());
  }
  throw Error(ErrorCode::ParseFailure, "input is neither SBML nor shorthand");
}

bool is_handle(std::string_view text) {
  if (text.size() != 64) return false;
  return std::all_of(text.begin(), text.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

// ---------------------------------------------------------------------------
// Store

ModelStore::ModelStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_ / "objects", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create store " + dir_.string() + ": " + ec.message());
}

std::filesystem::path ModelStore::object_path(std::string_view hash) const {
  return dir_ / "objects" / (std::string(hash) + ".xml");
}

std::string ModelStore::put(std::string_view bytes) { return put(load_model_text(bytes)); }

std::string ModelStore::put(const ModelDocument& doc) {
  auto canonical = write_canonical_sbml(doc);
  auto hash = sha256_hex(canonical);
  auto target = object_path(hash);
  if (std::filesystem::exists(target)) return hash;
  static std::atomic<std::uint64_t> counter{0};
  std::ostringstream name;
  name << ".tmp-" << ::getpid() << "-" << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "-"
       << counter.fetch_add(1);
  auto temp = dir_ / "objects" / name.str();
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out.write(canonical.data(), static_cast<std::streamsize>(canonical.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "cannot write " + temp.string());
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw Error(ErrorCode::Io, "cannot store object: " + ec.message());
  }
  return hash;
}

bool ModelStore::contains(std::string_view hash) const {
  return is_handle(hash) && std::filesystem::exists(object_path(hash));
}

std::string ModelStore::get_bytes(std::string_view hash) const {
  if (!contains(hash)) throw Error(ErrorCode::UnknownHandle, "unknown model handle " + std::string(hash));
  return read_whole(object_path(hash));
}

ModelDocument ModelStore::get(std::string_view hash) const { return read_sbml(get_bytes(hash)); }

std::vector<std::string> ModelStore::list() const {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir_ / "objects")) {
    auto name = entry.path().filename().string();
    if (name.size() == 68 && name.substr(64) == ".xml" && is_handle(name.substr(0, 64))) out.push_back(name.substr(0, 64));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Errors

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownHandle: return 404;
    case ErrorCode::MergeConflict: return 409;
    case ErrorCode::InvalidModel: return 422;
    case ErrorCode::NonFiniteResult:
    case ErrorCode::SingularSystem:
    case ErrorCode::NumericalFailure:
    case ErrorCode::Io: return 500;
    default: return 400;
  }
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::MergeConflict: return 3;
    case ErrorCode::NonFiniteResult:
    case ErrorCode::SingularSystem:
    case ErrorCode::NumericalFailure: return 4;
    case ErrorCode::Io:
    case ErrorCode::UnknownHandle: return 1;
    default: return 2;
  }
}

namespace {

Json findings_json(const ValidationReport& report) {
  Json list = Json::array();
  for (const auto& f : report.findings) {
    list.push_back({{"severity", f.severity == Severity::Error ? "error" : "warning"},
                    {"code", f.code},
                    {"path", f.path},
                    {"message", f.message}});
  }
  return list;
}

}  // namespace

Payload error_payload(const std::exception& e, Format format) {
  if (const auto* conflict = dynamic_cast<const MergeConflictError*>(&e)) {
    if (format == Format::Tsv) return {409, std::string(content_type::tsv), conflicts_to_tsv(conflict->report())};
    return {409, std::string(content_type::json), conflicts_to_json(conflict->report())};
  }
  Json body;
  int status = 500;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    status = http_status(err->code());
    body["error"] = {{"code", error_token(err->code())}, {"message", err->what()}};
    if (const auto* invalid = dynamic_cast<const InvalidModelError*>(&e)) {
      body["error"]["findings"] = findings_json(invalid->report());
    }
  } else {
    body["error"] = {{"code", "internal"}, {"message", e.what()}};
  }
  return json_payload(body, status);
}

// ---------------------------------------------------------------------------
// Payload builders

namespace api {

Payload compile_shorthand(std::string_view source) {
  return text_payload(write_canonical_sbml(parse_shorthand(source)), content_type::sbml);
}

Payload decompile_sbml(std::string_view xml) { return text_payload(print_shorthand(read_sbml(xml)), content_type::shorthand); }

Payload model_bytes(const ModelDocument& doc, bool as_shorthand) {
  if (as_shorthand) return text_payload(print_shorthand(doc), content_type::shorthand);
  return text_payload(write_canonical_sbml(doc), content_type::sbml);
}

Payload validate(const ModelDocument& doc) {
  auto report = validate_model(doc);
  Json body;
  body["valid"] = report.ok();
  body["errors"] = report.error_count();
  body["warnings"] = report.warning_count();
  body["findings"] = findings_json(report);
  return json_payload(body);
}

Payload diff(const ModelDocument& a, const ModelDocument& b, const EquivalenceOracle* equiv, Format format) {
  auto report = diff_models(a, b, equiv);
  if (format == Format::Tsv) return text_payload(diff_to_tsv(report), content_type::tsv);
  return text_payload(diff_to_json(report), content_type::json);
}

Payload merge(const std::vector<ModelDocument>& models, const MergePolicy& policy, const EquivalenceOracle* equiv) {
  auto result = merge_models(models, policy, equiv);
  Json body;
  body["model"] = write_canonical_sbml(result.document);
  body["renames"] = Json::parse(renames_to_json(result.renames));
  Json resolved = Json::array();
  for (const auto& c : result.resolved) {
    resolved.push_back({{"path", c.path}, {"attribute", c.attribute}, {"left", c.left}, {"right", c.right}});
  }
  body["resolved"] = resolved;
  return json_payload(body);
}

Payload split(const ModelDocument& doc, const std::set<std::string>& seeds, bool expand) {
  return text_payload(write_canonical_sbml(split_model(doc, seeds, expand)), content_type::sbml);
}

namespace {

Payload annotated(const ModelDocument& doc, const std::vector<std::string>& warnings) {
  Json body;
  body["model"] = write_canonical_sbml(doc);
  body["warnings"] = warnings;
  return json_payload(body);
}

}  // namespace

Payload annotate_set(const ModelDocument& doc, std::string_view element, std::string_view qualifier,
                     std::string_view uri) {
  return annotated(set_annotation(doc, element, Qualifier::parse(qualifier), uri), {});
}

Payload annotate_remove(const ModelDocument& doc, std::string_view element, std::string_view qualifier,
                        std::string_view uri) {
  auto edit = remove_annotation(doc, element, Qualifier::parse(qualifier), uri);
  return annotated(edit.document, edit.warnings);
}

Payload balance(const ModelDocument& doc, std::string_view data_tsv, const BalancingConfig& config, Format format) {
  auto problem = build_problem(doc, data_tsv, config);
  auto balanced = sbmltk::balance(problem);
  auto report = balance_report_tsv(problem, balanced);
  if (format == Format::Tsv) return text_payload(report, content_type::tsv);
  auto checks = consistency_report(problem, balanced);
  Json body;
  body["model"] = write_canonical_sbml(apply_balanced(doc, balanced, config));
  body["report"] = report;
  body["consistency"] = {{"wegscheider", ConsistencyReport::max_of(checks.wegscheider)},
                         {"haldane", ConsistencyReport::max_of(checks.haldane)},
                         {"vmax", ConsistencyReport::max_of(checks.vmax)}};
  return json_payload(body);
}

Payload sbo(const ModelDocument& doc, const SboRuleTable& rules, Format format) {
  auto result = assign_sbo_terms(doc, rules);
  if (format == Format::Tsv) return text_payload(sbo_log_tsv(result.log), content_type::tsv);
  Json log = Json::array();
  for (const auto& e : result.log) {
    log.push_back({{"path", e.path},
                   {"target", e.target},
                   {"sbo", e.sbo},
                   {"action", e.assigned ? "assigned" : "skipped"},
                   {"existing", e.existing}});
  }
  Json body;
  body["model"] = write_canonical_sbml(result.document);
  body["log"] = log;
  return json_payload(body);
}

Payload cluster(const std::vector<LabeledModel>& models, double threshold, const EquivalenceOracle* equiv,
                Format format) {
  if (!(threshold >= 0.0) || threshold > 1.0 + 1e-12) {
    throw Error(ErrorCode::MalformedData, "threshold must lie in [0, 1]");
  }
  std::vector<Fingerprint> prints;
  for (const auto& m : models) prints.push_back(fingerprint(m.doc, m.label, equiv));
  auto graph = cluster_models(prints, threshold);
  if (format == Format::Tsv) return text_payload(cluster_tsv(graph), content_type::tsv);
  if (format == Format::Dot) return text_payload(similarity_to_dot(graph), content_type::dot);
  Json nodes = Json::array();
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    Json n = {{"label", graph.nodes[i]}, {"cluster", graph.cluster[i]}};
    n["nearest"] = graph.nearest[i] ? Json(graph.nodes[*graph.nearest[i]]) : Json(nullptr);
    n["score"] = graph.nearest_score[i];
    n["uris"] = prints[i].uris;
    nodes.push_back(n);
  }
  Json edges = Json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({{"a", graph.nodes[e.a]}, {"b", graph.nodes[e.b]}, {"weight", e.weight}});
  }
  Json body;
  body["threshold"] = threshold;
  body["clusters"] = graph.cluster_count();
  body["nodes"] = nodes;
  body["edges"] = edges;
  return json_payload(body);
}

Payload visualize(const ModelDocument& doc, const DotOptions& opts) {
  return text_payload(model_to_dot(doc, opts), content_type::dot);
}

namespace {

Json record_json(const EntityRecord& r) {
  Json relations = Json::array();
  for (const auto& [rel, target] : r.relations) relations.push_back({{"relation", rel}, {"target", target}});
  return {{"primary_uri", r.primary_uri}, {"names", r.names}, {"crossrefs", r.crossrefs}, {"relations", relations}};
}

}  // namespace

Payload search_name(const AnnotationStore& db, std::string_view name, bool exact) {
  Json results = Json::array();
  for (const auto& r : db.search_by_name(name, exact)) results.push_back(record_json(r));
  return json_payload({{"results", results}});
}

Payload search_id(const AnnotationStore& db, std::string_view ns, std::string_view id) {
  Json results = Json::array();
  if (auto r = db.search_by_id(ns, id)) results.push_back(record_json(*r));
  return json_payload({{"results", results}});
}

Payload ingest(AnnotationStore& db, std::string_view tsv) {
  auto summary = db.ingest(tsv);
  Json rejected = Json::array();
  for (const auto& r : summary.rejected) rejected.push_back({{"line", r.line}, {"message", r.message}});
  return json_payload({{"records", summary.records}, {"changed", summary.changed}, {"rejected", rejected}});
}

Payload stored(std::string_view hash) {
  return json_payload({{"hash", std::string(hash)}}, 201);
}

}  // namespace api

// ---------------------------------------------------------------------------
// Routing

Service::Service(ModelStore& store, AnnotationStore* db, SboRuleTable rules)
    : store_(store), db_(db), rules_(std::move(rules)) {}

namespace {

Format negotiate(const Request& req) {
  auto it = req.headers.find("accept");
  if (it == req.headers.end()) return Format::Json;
  if (it->second.find(content_type::tsv) != std::string::npos) return Format::Tsv;
  if (it->second.find(content_type::dot) != std::string::npos) return Format::Dot;
  return Format::Json;
}

bool accepts(const Request& req, std::string_view type) {
  auto it = req.headers.find("accept");
  return it != req.headers.end() && it->second.find(type) != std::string::npos;
}

Json parse_body(const Request& req) {
  try {
    auto j = Json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::ParseFailure, "request body must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseFailure, std::string("malformed JSON body: ") + e.what());
  }
}

const Json& field(const Json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end()) throw Error(ErrorCode::ParseFailure, std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const Json& body, const char* name) {
  const auto& v = field(body, name);
  if (!v.is_string()) throw Error(ErrorCode::ParseFailure, std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const Json& body, const char* name) {
  const auto& v = field(body, name);
  if (!v.is_array()) throw Error(ErrorCode::ParseFailure, std::string("field '") + name + "' must be an array");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw Error(ErrorCode::ParseFailure, std::string("field '") + name + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

bool bool_field(const Json& body, const char* name, bool fallback) {
  auto it = body.find(name);
  if (it == body.end()) return fallback;
  if (!it->is_boolean()) throw Error(ErrorCode::ParseFailure, std::string("field '") + name + "' must be a boolean");
  return it->get<bool>();
}

double number_field(const Json& body, const char* name, double fallback) {
  auto it = body.find(name);
  if (it == body.end()) return fallback;
  if (!it->is_number()) throw Error(ErrorCode::ParseFailure, std::string("field '") + name + "' must be a number");
  return it->get<double>();
}

MergePolicy policy_field(const Json& body) {
  auto it = body.find("policy");
  if (it == body.end()) return MergePolicy::fail();
  if (it->is_string()) {
    auto name = it->get<std::string>();
    if (name == "fail") return MergePolicy::fail();
    if (name == "left") return MergePolicy::left();
    if (name == "right") return MergePolicy::right();
    throw Error(ErrorCode::MalformedPolicy, "policy must be fail, left, right or {\"rules\": text}");
  }
  if (it->is_object() && it->contains("rules") && (*it)["rules"].is_string()) {
    return parse_merge_policy((*it)["rules"].get<std::string>());
  }
  throw Error(ErrorCode::MalformedPolicy, "policy must be fail, left, right or {\"rules\": text}");
}

Payload not_found(const Request& req) {
  Json body;
  body["error"] = {{"code", "unknown-endpoint"}, {"message", "no endpoint " + req.method + " " + req.path}};
  return json_payload(body, 404);
}

}  // namespace

ModelDocument Service::model_ref(const std::string& ref) const {
  if (is_handle(ref)) return store_.get(ref);
  return load_model_text(ref);
}

Payload Service::handle(const Request& req) const {
  try {
    return route(req);
  } catch (const std::exception& e) {
    return error_payload(e, negotiate(req));
  }
}

Payload Service::route(const Request& req) const {
  const auto& p = req.path;
  const bool post = req.method == "POST";
  const bool get = req.method == "GET";
  auto need_db = [&]() -> AnnotationStore& {
    if (!db_) throw Error(ErrorCode::Io, "no annotation database configured");
    return *db_;
  };

  if (p == "/v1/models" && post) return api::stored(store_.put(req.body));
  if (p == "/v1/models" && get) return json_payload({{"models", store_.list()}});
  if (p.rfind("/v1/models/", 0) == 0 && get) {
    auto hash = p.substr(11);
    if (accepts(req, content_type::shorthand)) return api::model_bytes(store_.get(hash), true);
    return text_payload(store_.get_bytes(hash), content_type::sbml);
  }
  if (p == "/v1/shorthand" && post) {
    if (accepts(req, content_type::shorthand)) return api::decompile_sbml(req.body);
    return api::compile_shorthand(req.body);
  }
  if (p == "/v1/annotations/search" && get) {
    auto q = [&](const char* k) -> std::optional<std::string> {
      auto it = req.query.find(k);
      return it == req.query.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
    if (auto name = q("name")) {
      auto exact = q("exact");
      return api::search_name(need_db(), *name, exact && (*exact == "1" || *exact == "true"));
    }
    if (auto db = q("db"); db && q("id")) return api::search_id(need_db(), *db, *q("id"));
    throw Error(ErrorCode::ParseFailure, "search needs name= or db= and id=");
  }
  if (p == "/v1/annotations" && post) return api::ingest(need_db(), req.body);
  if (!post) return not_found(req);

  if (p == "/v1/validate") return api::validate(model_ref(string_field(parse_body(req), "model")));
  if (p == "/v1/diff") {
    auto body = parse_body(req);
    return api::diff(model_ref(string_field(body, "left")), model_ref(string_field(body, "right")), db_,
                     negotiate(req));
  }
  if (p == "/v1/merge") {
    auto body = parse_body(req);
    std::vector<ModelDocument> models;
    for (const auto& ref : string_list(body, "models")) models.push_back(model_ref(ref));
    auto policy = policy_field(body);
    return api::merge(models, policy, db_);
  }
  if (p == "/v1/split") {
    auto body = parse_body(req);
    auto seeds = string_list(body, "seeds");
    return api::split(model_ref(string_field(body, "model")), {seeds.begin(), seeds.end()},
                      bool_field(body, "expand", false));
  }
  if (p == "/v1/annotate") {
    auto body = parse_body(req);
    auto doc = model_ref(string_field(body, "model"));
    auto action = body.contains("action") ? string_field(body, "action") : std::string("set");
    auto element = string_field(body, "element");
    auto qualifier = body.contains("qualifier") ? string_field(body, "qualifier") : std::string("is");
    auto uri = string_field(body, "uri");
    if (action == "set") return api::annotate_set(doc, element, qualifier, uri);
    if (action == "remove") return api::annotate_remove(doc, element, qualifier, uri);
    throw Error(ErrorCode::ParseFailure, "action must be set or remove");
  }
  if (p == "/v1/balance") {
    auto body = parse_body(req);
    auto config = BalancingConfig::defaults();
    config.rt = number_field(body, "rt", config.rt);
    if (!bool_field(body, "pseudo", true)) config = config.without_pseudo();
    auto data = body.contains("data") ? string_field(body, "data") : std::string();
    return api::balance(model_ref(string_field(body, "model")), data, config, negotiate(req));
  }
  if (p == "/v1/sbo") {
    auto body = parse_body(req);
    auto rules = body.contains("rules") ? parse_sbo_rules(string_field(body, "rules")) : rules_;
    return api::sbo(model_ref(string_field(body, "model")), rules, negotiate(req));
  }
  if (p == "/v1/cluster") {
    auto body = parse_body(req);
    auto refs = string_list(body, "models");
    std::vector<std::string> labels;
    if (body.contains("labels")) labels = string_list(body, "labels");
    if (!labels.empty() && labels.size() != refs.size()) {
      throw Error(ErrorCode::ParseFailure, "labels must match models one to one");
    }
    std::vector<LabeledModel> models;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      models.push_back({labels.empty() ? "m" + std::to_string(i + 1) : labels[i], model_ref(refs[i])});
    }
    return api::cluster(models, number_field(body, "threshold", 0.3), db_, negotiate(req));
  }
  if (p == "/v1/visualize") {
    auto body = parse_body(req);
    DotOptions opts{bool_field(body, "show_modifiers", true), bool_field(body, "compartment_clusters", true)};
    return api::visualize(model_ref(string_field(body, "model")), opts);
  }
  return not_found(req);
}

}  // namespace sbmltk
