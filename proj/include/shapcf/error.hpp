#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shapcf {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kUnknownColumn,
  kUnknownOwner,
  kDeltaNotOwned,
  kSameOwner,
  kTooManyOwners,
  kSingletonOwner,
  kSizeOverflow,
};

std::string_view error_code_name(ErrorCode code);

// All library failures surface as this exception; the code identifies the
// violated contract so callers and tests can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shapcf
