#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbl {

enum class ErrorCode {
  ArityMismatch,
  BadNumeric,
  BadValue,
  EmptyDataset,
  BadSchema,
  BadMetric,
  CorruptModel,
  PadCollision,
  MissingAnnotation,
  EmptyCorpus,
  LengthMismatch,
  TooSmall,
  BadLexicon,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Data-level failure. Every module throws this; the CLI maps it to exit status 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mbl
