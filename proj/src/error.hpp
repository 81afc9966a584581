#pragma once

#include <stdexcept>
#include <string>

namespace sculptor {

// Numeric values are part of the C API (see sculptor.h) and must not change.
enum class ErrorCode : int {
  Ok = 0,
  Parameter = 1,
  Model = 2,
  Dimension = 3,
  Abundance = 4,
  Weight = 5,
  Evaluation = 6,
  Calibration = 7,
  Io = 8,
  Config = 9,
  Internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace sculptor
