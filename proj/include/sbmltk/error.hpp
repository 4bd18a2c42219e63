#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbmltk {

/// Machine-readable error categories shared by every module. The frontend
/// maps each code to exactly one HTTP status and CLI exit code.
enum class ErrorCode {
  XmlSyntax,
  UnsupportedSbmlLevel,
  BrokenReference,
  SyntaxError,
  DuplicateId,
  UnknownSection,
  DanglingReactionBlock,
  UnrecognizedUriScheme,
  NoSuchElement,
  InvalidModel,
  UnboundSymbol,
  NonFiniteResult,
  MalformedRecord,
  MergeConflict,
  MalformedPolicy,
  UnknownQuantityType,
  UnknownElementId,
  UnitMismatch,
  NonPositiveValueForLogScale,
  MalformedData,
  SingularSystem,
  NumericalFailure,
  IncompleteBalance,
  NoKineticLaw,
  MalformedRuleTable,
  ParseFailure,
  UnknownHandle,
  Io,
};

/// Kebab-case token, e.g. "merge-conflict".
std::string_view error_token(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sbmltk
