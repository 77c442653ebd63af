#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfqp {

enum class ErrorCode {
  invalid_range,
  grid_too_small,
  invalid_params,
  embedding_failure,
  lag_too_large,
  insufficient_data,
  nonpositive_moment,
  range_too_small,
  degenerate_design,
  zero_variance,
  series_too_short,
  grid_too_narrow,
  underflow,
  io_error,
  parse_error,
  validation_error,
  length_too_short,
};

std::string_view to_string(ErrorCode code) noexcept;

//! Library-wide exception. Every failure mode listed for an operation maps to
//! one ErrorCode so callers (and the CLI exit-code logic) can branch on it.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message)
    , code_(code)
  {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace mfqp
