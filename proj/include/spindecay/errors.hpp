#pragma once

#include <stdexcept>
#include <string>

namespace spindecay {

// Every failure the library reports derives from Error. The kind maps onto
// the CLI exit-code contract (input / regime / numeric).
enum class ErrorKind {
  kParse,
  kInvalidInput,
  kInvalidQuery,
  kRegime,
  kDegenerate,
  kNumericFailure,
  kSize,
  kContractViolation,
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(ErrorKind::kParse,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

#define SPINDECAY_DEFINE_ERROR(Name, Kind)              \
  class Name : public Error {                           \
   public:                                              \
    explicit Name(const std::string& what)              \
        : Error(ErrorKind::Kind, what) {}               \
  };

SPINDECAY_DEFINE_ERROR(InvalidInput, kInvalidInput)
SPINDECAY_DEFINE_ERROR(InvalidQuery, kInvalidQuery)
SPINDECAY_DEFINE_ERROR(RegimeError, kRegime)
SPINDECAY_DEFINE_ERROR(DegenerateError, kDegenerate)
SPINDECAY_DEFINE_ERROR(NumericFailure, kNumericFailure)
SPINDECAY_DEFINE_ERROR(SizeError, kSize)
SPINDECAY_DEFINE_ERROR(ContractViolation, kContractViolation)

#undef SPINDECAY_DEFINE_ERROR

}  // namespace spindecay
