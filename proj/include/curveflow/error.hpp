#pragma once

#include <stdexcept>
#include <string>

namespace curveflow {

enum class ErrorCode {
  InvalidArgument,
  NotConvex,
  Domain,
  Parse,
  Io,
};

// Single exception type for the library; the C API maps `code()` onto cf_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace curveflow
