#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsa {

enum class ErrorCode {
  MissingFile,
  IoError,
  InvalidManifest,
  SizeMismatch,
  ZeroNormRow,
  NonFiniteValue,
  DuplicateConcept,
  ConstantRow,
  EmptyDataset,
  EmptyIntersection,
  ConceptMismatch,
  DimensionMismatch,
  ZeroNorm,
  ShapeMismatch,
  ConstantVector,
  LengthMismatch,
  TooShort,
  NoDerangementExists,
  InvalidArgument,
  SingleSubjectLowerBound,
  UnknownNetwork,
  MissingConcretenessRating,
  MissingWordEmbedding,
  DuplicatePair,
  ParseError,
  InvalidConfig,
  UsageError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the toolkit surfaces as this exception. `code()` is the
/// stable machine-readable identifier printed by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Re-throws `e` with `context` prepended to its message, keeping the code.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
  throw Error(e.code(), context + ": " + e.what());
}

}  // namespace rsa
