#pragma once

#include <stdexcept>
#include <string>

namespace oim {

enum class ErrorCode {
  kArgument = 1,
  kParse,
  kIo,
  kNumeric,
  kCapacity,
  kDimension,
  kInternal,
};

const char* error_code_name(ErrorCode code);

// Every failure surfaced by the core library is an oim::Error. The C API maps
// the code onto its status enum one-to-one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void throw_error(ErrorCode code, const std::string& what);

}  // namespace oim
