#include "gfd/error.hpp"

namespace gfd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConstantSeries: return "constant series";
    case ErrorKind::DomainError: return "domain error";
    case ErrorKind::TooShort: return "too short";
    case ErrorKind::EmptySeries: return "empty series";
    case ErrorKind::ZeroSignal: return "zero signal";
    case ErrorKind::StepOutOfRange: return "step out of range";
    case ErrorKind::InsufficientDuration: return "insufficient duration";
    case ErrorKind::ParseError: return "parse error";
    case ErrorKind::EmptyFile: return "empty file";
    case ErrorKind::ClassTooSmall: return "class too small";
    case ErrorKind::ShapeMismatch: return "shape mismatch";
    case ErrorKind::LabelDomain: return "label domain";
    case ErrorKind::NoForwardCache: return "no forward cache";
    case ErrorKind::EmptyDataset: return "empty dataset";
    case ErrorKind::NoBatchNorm: return "no batch norm";
    case ErrorKind::RateOutOfRange: return "rate out of range";
    case ErrorKind::PlanModelMismatch: return "plan/model mismatch";
    case ErrorKind::EmptyReport: return "empty report";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::DegenerateRectangle: return "degenerate rectangle";
    case ErrorKind::InsufficientPoints: return "insufficient points";
    case ErrorKind::SupportMismatch: return "support mismatch";
    case ErrorKind::LengthMismatch: return "length mismatch";
    case ErrorKind::IoError: return "io error";
    case ErrorKind::ConfigError: return "config error";
    case ErrorKind::FormatError: return "format error";
  }
  return "unknown";
}

}  // namespace gfd
