#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sbmltk/model.hpp"

namespace sbmltk {

struct SbmlSerializationOptions {
  int level = 2;
  int version = 4;
  int indent = 2;

  /// Options reproducing the document's own level and version.
  static SbmlSerializationOptions for_document(const ModelDocument& doc);
};

struct SbmlReadResult {
  ModelDocument document;
  std::vector<std::string> warnings;  // one per dropped construct
};

/// Reads the supported SBML subset. Unsupported constructs are dropped and
/// reported in `warnings`. Throws Error with XmlSyntax, UnsupportedSbmlLevel
/// or BrokenReference.
SbmlReadResult read_sbml_with_warnings(std::string_view xml);
ModelDocument read_sbml(std::string_view xml);

/// Deterministic canonical XML. Throws InvalidModelError or
/// Error(UnsupportedSbmlLevel).
std::string write_sbml(const ModelDocument& doc, const SbmlSerializationOptions& opts = {});

/// write_sbml with the document's own level/version.
std::string write_canonical_sbml(const ModelDocument& doc);

}  // namespace sbmltk
