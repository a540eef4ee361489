#pragma once

#include <stdexcept>
#include <string>

namespace polyrep {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define POLYREP_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    explicit Name(const std::string& what)  \
        : Error(#Name ": " + what) {}       \
  }

POLYREP_DEFINE_ERROR(InvalidSpace);
POLYREP_DEFINE_ERROR(MismatchedSpaces);
POLYREP_DEFINE_ERROR(OutOfSpace);
POLYREP_DEFINE_ERROR(InvalidMeasure);
POLYREP_DEFINE_ERROR(NotAProbability);
POLYREP_DEFINE_ERROR(AbsoluteContinuityViolated);
POLYREP_DEFINE_ERROR(InvalidKernel);
POLYREP_DEFINE_ERROR(OffGrid);
POLYREP_DEFINE_ERROR(BoundExceeded);
POLYREP_DEFINE_ERROR(InvalidIntegratorConfig);
POLYREP_DEFINE_ERROR(StepSizeTooLarge);
POLYREP_DEFINE_ERROR(IntegrationFailure);
POLYREP_DEFINE_ERROR(NotARestPoint);
POLYREP_DEFINE_ERROR(InvalidEpsilon);
POLYREP_DEFINE_ERROR(InvalidNeighborhood);
POLYREP_DEFINE_ERROR(SamplingExhausted);
POLYREP_DEFINE_ERROR(MissingDiagnostics);
POLYREP_DEFINE_ERROR(IoError);

#undef POLYREP_DEFINE_ERROR

/// Syntax error in a scenario document; carries the offending line and field.
class ParseError : public Error {
 public:
  ParseError(std::string field, int line, const std::string& detail)
      : Error("ParseError(" + field + ") at line " + std::to_string(line) +
              ": " + detail),
        field_(std::move(field)),
        line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

/// Semantically invalid scenario; names the violated invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& detail)
      : Error("ValidationError(" + field + "): " + detail),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace polyrep
