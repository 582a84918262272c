#include "cqa/error.hpp"

namespace cqa {

const char* to_string(ParseErrorCode code) {
  switch (code) {
    case ParseErrorCode::lex:
      return "lex";
    case ParseErrorCode::syntax:
      return "syntax";
    case ParseErrorCode::arity:
      return "arity";
    case ParseErrorCode::safety:
      return "safety";
    case ParseErrorCode::unbound_var:
      return "unbound-var";
    case ParseErrorCode::duplicate_decl:
      return "duplicate-decl";
    case ParseErrorCode::unknown_predicate:
      return "unknown-predicate";
  }
  return "unknown";
}

ParseError::ParseError(ParseErrorCode code, SourceSpan span, const std::string& message)
    : Error(std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + to_string(code) + ": " +
            message),
      code_(code),
      span_(span),
      message_(message) {}

}  // namespace cqa
