#include "sbmltk/error.hpp"

namespace sbmltk {

std::string_view error_token(ErrorCode code) {
  switch (code) {
    case ErrorCode::XmlSyntax: return "xml-syntax";
    case ErrorCode::UnsupportedSbmlLevel: return "unsupported-sbml-level";
    case ErrorCode::BrokenReference: return "broken-reference";
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::DuplicateId: return "duplicate-id";
    case ErrorCode::UnknownSection: return "unknown-section";
    case ErrorCode::DanglingReactionBlock: return "dangling-reaction-block";
    case ErrorCode::UnrecognizedUriScheme: return "unrecognized-uri-scheme";
    case ErrorCode::NoSuchElement: return "no-such-element";
    case ErrorCode::InvalidModel: return "invalid-model";
    case ErrorCode::UnboundSymbol: return "unbound-symbol";
    case ErrorCode::NonFiniteResult: return "non-finite-result";
    case ErrorCode::MalformedRecord: return "malformed-record";
    case ErrorCode::MergeConflict: return "merge-conflict";
    case ErrorCode::MalformedPolicy: return "malformed-policy";
    case ErrorCode::UnknownQuantityType: return "unknown-quantity-type";
    case ErrorCode::UnknownElementId: return "unknown-element-id";
    case ErrorCode::UnitMismatch: return "unit-mismatch";
    case ErrorCode::NonPositiveValueForLogScale: return "non-positive-value-for-log-scale";
    case ErrorCode::MalformedData: return "malformed-data";
    case ErrorCode::SingularSystem: return "singular-system";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::IncompleteBalance: return "incomplete-balance";
    case ErrorCode::NoKineticLaw: return "no-kinetic-law";
    case ErrorCode::MalformedRuleTable: return "malformed-rule-table";
    case ErrorCode::ParseFailure: return "parse-failure";
    case ErrorCode::UnknownHandle: return "unknown-handle";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace sbmltk
