#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqa {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown predicate, wrong arity, or a malformed term inside an operation.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A requested method's class precondition (linear, acyclic, FDET...) fails.
class MethodInapplicable : public Error {
 public:
  using Error::Error;
};

/// An exhaustive search would exceed the configured fact cap.
class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

/// A rewriting would enumerate more atom sets than allowed.
class FormulaTooLarge : public Error {
 public:
  using Error::Error;
};

/// Forward closure hit a body instantiation with two or more head images.
class NotFdet : public Error {
 public:
  using Error::Error;
};

/// Evaluation met a variable that no quantifier binds.
class UnboundVariable : public Error {
 public:
  using Error::Error;
};

struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t begin = 0;  // byte offsets into the input text
  std::size_t end = 0;
};

enum class ParseErrorCode { lex, syntax, arity, safety, unbound_var, duplicate_decl, unknown_predicate };

const char* to_string(ParseErrorCode code);

class ParseError : public Error {
 public:
  ParseError(ParseErrorCode code, SourceSpan span, const std::string& message);

  ParseErrorCode code() const { return code_; }
  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  ParseErrorCode code_;
  SourceSpan span_;
  std::string message_;
};

}  // namespace cqa
