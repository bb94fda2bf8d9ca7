#pragma once

#include <stdexcept>
#include <string>

namespace magnet {

enum class ErrorKind {
  kInvalidConfig,
  kInvalidAssignment,
  kCapacity,
  kNumerical,
  kOutOfRange,
  kInsufficientData,
  kUndefined,
  kIo,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace magnet
