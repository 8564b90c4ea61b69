#pragma once

#include <stdexcept>
#include <string>

namespace spectre {

// Failure categories. Process exit codes: config errors -> 2,
// missing/corrupt artifacts -> 3, numerical failures -> 4.
enum class ErrorCode {
  config,
  missing_artifact,
  bad_magic,
  bad_version,
  truncated,
  shape_mismatch,
  patch_misalignment,
  hash_mismatch,
  corrupt,
  numeric,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

  int exit_code() const {
    switch (code_) {
      case ErrorCode::config:
        return 2;
      case ErrorCode::numeric:
        return 4;
      default:
        return 3;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace spectre
