#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emeasure {

enum class ErrorCode {
  InvalidArgument,
  WidthMismatch,
  NotUnionClosed,
  NotIntersectionClosed,
  NotAPreorder,
  NotAnEFunction,
  NotACapacity,
  NotAMeasure,
  MissingEntry,
  CapExceeded,
  NotOrderMeasurable,
  NotMeasurable,
  NotAdapted,
  OrderMeasurabilityViolation,
  PhiFlagViolation,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace emeasure
