#pragma once

#include <stdexcept>
#include <string>

namespace dsketch {

enum class ErrorCode {
  kFormat = 1,
  kValidation,
  kIo,
  kDegenerate,
  kCorrespondence,
  kEmpty,
  kInvalidArgument,
  kKindMismatch,
  kDivergence,
  kMissingModel,
};

/// Single exception type for the toolkit; the code drives the C API status
/// and the CLI exit status.
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

}  // namespace dsketch
