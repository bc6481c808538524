#pragma once
// Error taxonomy shared by every module.  The CLI maps these kinds onto
// process exit codes, so library code should always throw one of them
// rather than a bare std::runtime_error.

#include <stdexcept>
#include <string>

namespace hexp {

enum class ErrorKind {
  Config,    // malformed input: expressions, flags, ring mismatches
  Check,     // a mathematical identity or acceptance check failed
  Window,    // requested result not determined at this truncation
  Internal,  // broken invariant inside the engine
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) fail(kind, msg);
}

}  // namespace hexp
