// Error types shared across the toolkit.
#pragma once

#include <stdexcept>
#include <string>

namespace eskin {

// Coarse classification, mapped one-to-one onto CLI exit codes.
enum class ErrorKind {
  Usage = 1,       // bad flags or config
  Validation = 2,  // malformed or inconsistent data
  Numerical = 3,   // factorisation / solver failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define ESKIN_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

ESKIN_DEFINE_ERROR(UsageError, Usage)
ESKIN_DEFINE_ERROR(ConfigError, Usage)
ESKIN_DEFINE_ERROR(IoError, Usage)
ESKIN_DEFINE_ERROR(SchemaError, Validation)
ESKIN_DEFINE_ERROR(ParseError, Validation)
ESKIN_DEFINE_ERROR(ValidationError, Validation)
ESKIN_DEFINE_ERROR(ProtocolError, Validation)
ESKIN_DEFINE_ERROR(UnsupportedArityError, Validation)
ESKIN_DEFINE_ERROR(DimensionError, Validation)
ESKIN_DEFINE_ERROR(DegenerateLabelsError, Validation)
ESKIN_DEFINE_ERROR(CoverageError, Validation)
ESKIN_DEFINE_ERROR(ModeMismatchError, Validation)
ESKIN_DEFINE_ERROR(UndefinedMetricError, Numerical)
ESKIN_DEFINE_ERROR(SingularDesignError, Numerical)
ESKIN_DEFINE_ERROR(FactorisationError, Numerical)

#undef ESKIN_DEFINE_ERROR

}  // namespace eskin
