#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gfd {

enum class ErrorKind {
  ConstantSeries,
  DomainError,
  TooShort,
  EmptySeries,
  ZeroSignal,
  StepOutOfRange,
  InsufficientDuration,
  ParseError,
  EmptyFile,
  ClassTooSmall,
  ShapeMismatch,
  LabelDomain,
  NoForwardCache,
  EmptyDataset,
  NoBatchNorm,
  RateOutOfRange,
  PlanModelMismatch,
  EmptyReport,
  EmptyInput,
  DegenerateRectangle,
  InsufficientPoints,
  SupportMismatch,
  LengthMismatch,
  IoError,
  ConfigError,
  FormatError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace gfd
