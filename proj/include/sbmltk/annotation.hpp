#pragma once

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sbmltk {

enum class QualifierKind { Is, IsVersionOf, HasPart, IsDescribedBy, Other };

/// Biology/model qualifier of a MIRIAM claim. `text` is only meaningful for
/// Other and holds the qualifier's local name (e.g. "isHomologTo").
struct Qualifier {
  QualifierKind kind = QualifierKind::Is;
  std::string text;

  static Qualifier parse(std::string_view name);
  static Qualifier is() { return {}; }
  std::string name() const;

  auto operator<=>(const Qualifier&) const = default;
};

struct AnnotationEntry {
  Qualifier qualifier;
  std::string uri;  // normalized: identifiers.org/<namespace>/<id>

  auto operator<=>(const AnnotationEntry&) const = default;
};

/// Accepts `urn:miriam:<ns>:<id>` (percent-escapes decoded),
/// `http(s)://identifiers.org/<ns>/<id>` and the normal form itself.
/// Throws Error(UnrecognizedUriScheme) for anything else.
std::string normalize_uri(std::string_view raw);

bool is_normalized_uri(std::string_view uri);

/// Deduplicated set of (qualifier, normalized URI) claims.
class AnnotationSet {
 public:
  using const_iterator = std::set<AnnotationEntry>::const_iterator;

  /// Normalizes `raw_uri`; returns false when the entry was already present.
  bool insert(Qualifier qualifier, std::string_view raw_uri);
  bool erase(const Qualifier& qualifier, std::string_view raw_uri);
  bool contains(const Qualifier& qualifier, std::string_view raw_uri) const;
  void merge(const AnnotationSet& other);

  /// URIs carrying the `is` qualifier.
  std::set<std::string> identity_uris() const;
  /// All URIs regardless of qualifier.
  std::set<std::string> all_uris() const;

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }

  /// "qualifier uri" pairs joined by ", " in set order.
  std::string to_text() const;

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;

 private:
  std::set<AnnotationEntry> entries_;
};

}  // namespace sbmltk
