#include "sbmltk/annotation.hpp"

#include <cctype>

#include "sbmltk/error.hpp"
#include "sbmltk/text.hpp"

namespace sbmltk {

Qualifier Qualifier::parse(std::string_view name) {
  if (name == "is") return {QualifierKind::Is, {}};
  if (name == "isVersionOf") return {QualifierKind::IsVersionOf, {}};
  if (name == "hasPart") return {QualifierKind::HasPart, {}};
  if (name == "isDescribedBy") return {QualifierKind::IsDescribedBy, {}};
  return {QualifierKind::Other, std::string(name)};
}

std::string Qualifier::name() const {
  switch (kind) {
    case QualifierKind::Is: return "is";
    case QualifierKind::IsVersionOf: return "isVersionOf";
    case QualifierKind::HasPart: return "hasPart";
    case QualifierKind::IsDescribedBy: return "isDescribedBy";
    case QualifierKind::Other: return text;
  }
  return text;
}

namespace {

constexpr std::string_view kPrefix = "identifiers.org/";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      int hi = hex_value(text[i + 1]);
      int lo = hex_value(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

bool valid_part(std::string_view part) {
  if (part.empty()) return false;
  for (char c : part) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string assemble(std::string_view ns, std::string_view id, std::string_view raw) {
  if (!valid_part(ns) || !valid_part(id) || ns.find('/') != std::string_view::npos) {
    throw Error(ErrorCode::UnrecognizedUriScheme, "malformed resource URI: " + std::string(raw));
  }
  return std::string(kPrefix) + std::string(ns) + "/" + std::string(id);
}

[[noreturn]] void unrecognized(std::string_view raw) {
  throw Error(ErrorCode::UnrecognizedUriScheme, "unrecognized URI scheme: " + std::string(raw));
}

}  // namespace

bool is_normalized_uri(std::string_view uri) {
  if (!uri.starts_with(kPrefix)) return false;
  auto rest = uri.substr(kPrefix.size());
  auto slash = rest.find('/');
  if (slash == std::string_view::npos) return false;
  return valid_part(rest.substr(0, slash)) && valid_part(rest.substr(slash + 1));
}

std::string normalize_uri(std::string_view raw) {
  auto text = trim(raw);
  if (is_normalized_uri(text)) return std::string(text);

  constexpr std::string_view urn = "urn:miriam:";
  if (text.starts_with(urn)) {
    auto rest = text.substr(urn.size());
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) unrecognized(raw);
    return assemble(percent_decode(rest.substr(0, colon)), percent_decode(rest.substr(colon + 1)),
                    raw);
  }
  for (std::string_view scheme : {"http://", "https://"}) {
    if (!text.starts_with(scheme)) continue;
    auto rest = text.substr(scheme.size());
    if (!rest.starts_with(kPrefix)) unrecognized(raw);
    rest = rest.substr(kPrefix.size());
    auto slash = rest.find('/');
    if (slash == std::string_view::npos) unrecognized(raw);
    return assemble(percent_decode(rest.substr(0, slash)), percent_decode(rest.substr(slash + 1)),
                    raw);
  }
  unrecognized(raw);
}

bool AnnotationSet::insert(Qualifier qualifier, std::string_view raw_uri) {
  return entries_.insert({std::move(qualifier), normalize_uri(raw_uri)}).second;
}

bool AnnotationSet::erase(const Qualifier& qualifier, std::string_view raw_uri) {
  return entries_.erase({qualifier, normalize_uri(raw_uri)}) > 0;
}

bool AnnotationSet::contains(const Qualifier& qualifier, std::string_view raw_uri) const {
  return entries_.count({qualifier, normalize_uri(raw_uri)}) > 0;
}

void AnnotationSet::merge(const AnnotationSet& other) {
  entries_.insert(other.entries_.begin(), other.entries_.end());
}

std::set<std::string> AnnotationSet::identity_uris() const {
  std::set<std::string> out;
  for (const auto& entry : entries_) {
    if (entry.qualifier.kind == QualifierKind::Is) out.insert(entry.uri);
  }
  return out;
}

std::set<std::string> AnnotationSet::all_uris() const {
  std::set<std::string> out;
  for (const auto& entry : entries_) out.insert(entry.uri);
  return out;
}

std::string AnnotationSet::to_text() const {
  std::string out;
  for (const auto& entry : entries_) {
    if (!out.empty()) out += ", ";
    out += entry.qualifier.name();
    out += ' ';
    out += entry.uri;
  }
  return out;
}

}  // namespace sbmltk
