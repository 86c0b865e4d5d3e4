#include "shapcf/error.hpp"

namespace shapcf {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kUnknownOwner: return "UnknownOwner";
    case ErrorCode::kDeltaNotOwned: return "DeltaNotOwned";
    case ErrorCode::kSameOwner: return "SameOwner";
    case ErrorCode::kTooManyOwners: return "TooManyOwners";
    case ErrorCode::kSingletonOwner: return "SingletonOwner";
    case ErrorCode::kSizeOverflow: return "SizeOverflow";
  }
  return "Unknown";
}

}  // namespace shapcf
