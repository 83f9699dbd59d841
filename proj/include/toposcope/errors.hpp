#pragma once

#include <stdexcept>
#include <string>

namespace toposcope {

// Half-open source range in formula text, 1-based lines and columns.
struct Span {
  int line = 0;
  int col = 0;
  int end_line = 0;
  int end_col = 0;

  bool operator==(const Span&) const = default;
};

enum class ErrorKind {
  // category / presheaf / natural transformation validation
  MissingIdentity,
  NonAssociative,
  IllTypedComposite,
  UnknownObject,
  UnknownMorphism,
  TargetMismatch,
  NonFunctorial,
  ActionTypeError,
  NonNatural,
  SiteMismatch,
  TypeMismatch,
  AmbientMismatch,
  // language front end
  SyntaxError,
  UnboundVariable,
  ArityMismatch,
  SortMismatch,
  MissingInterpretation,
  // environments, files, search
  UnknownBuiltin,
  BadFormat,
  BudgetExceeded,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::MissingIdentity: return "MissingIdentity";
    case ErrorKind::NonAssociative: return "NonAssociative";
    case ErrorKind::IllTypedComposite: return "IllTypedComposite";
    case ErrorKind::UnknownObject: return "UnknownObject";
    case ErrorKind::UnknownMorphism: return "UnknownMorphism";
    case ErrorKind::TargetMismatch: return "TargetMismatch";
    case ErrorKind::NonFunctorial: return "NonFunctorial";
    case ErrorKind::ActionTypeError: return "ActionTypeError";
    case ErrorKind::NonNatural: return "NonNatural";
    case ErrorKind::SiteMismatch: return "SiteMismatch";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::AmbientMismatch: return "AmbientMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::SortMismatch: return "SortMismatch";
    case ErrorKind::MissingInterpretation: return "MissingInterpretation";
    case ErrorKind::UnknownBuiltin: return "UnknownBuiltin";
    case ErrorKind::BadFormat: return "BadFormat";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  Error(ErrorKind kind, Span span, std::string message)
      : std::runtime_error(std::string(to_string(kind)) + " at " +
                           std::to_string(span.line) + ":" +
                           std::to_string(span.col) + ": " + message),
        kind_(kind),
        span_(span) {}

  ErrorKind kind() const { return kind_; }
  const Span& span() const { return span_; }

 private:
  ErrorKind kind_;
  Span span_{};
};

}  // namespace toposcope
