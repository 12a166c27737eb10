#pragma once

#include <stdexcept>
#include <string>

namespace sll {

enum class ErrorCode {
  invalid_argument = 1,
  config = 2,
  io = 3,
  divergence = 4,
  solver = 5,
  conservation = 6,
  fixed_point = 7,
  evaluation = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace sll
