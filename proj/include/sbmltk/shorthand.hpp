#pragma once

#include <string>
#include <string_view>

#include "sbmltk/model.hpp"

namespace sbmltk {

/// Diagnostic raised by the shorthand compiler. Code is one of SyntaxError,
/// DuplicateId, UnknownSection or DanglingReactionBlock; `line` is 1-based.
class ShorthandError : public Error {
 public:
  ShorthandError(ErrorCode code, std::size_t line, std::size_t column, std::string expected);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

/// Compiles shorthand text (LF or CRLF) into a document. The result is not
/// validated; reference errors surface through validate_model.
ModelDocument parse_shorthand(std::string_view source);

/// Canonical shorthand text, LF line endings. Throws InvalidModelError.
std::string print_shorthand(const ModelDocument& doc);

}  // namespace sbmltk
