#include "core/error.hpp"

namespace oim {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgument: return "argument";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

void throw_error(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace oim
