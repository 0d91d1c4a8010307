#ifndef NCERG_ERROR_HPP
#define NCERG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ncerg {

enum class ErrorCode {
  invalid_argument = 1,
  shape_mismatch,
  not_hermitian,
  not_positive,
  precondition,
  validation,
  schema,
  numerical,
  io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ncerg

#endif
