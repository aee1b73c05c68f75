#pragma once

#include <stdexcept>
#include <string>

namespace wordcnn {

enum class ErrorKind {
  kInvalidInput,
  kNotFound,
  kFormat,
  kParse,
  kConfig,
  kNumericFault,
  kOracleFailure,
  kIo,
  kInternal,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kNotFound: return "not found";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kNumericFault: return "numeric fault";
    case ErrorKind::kOracleFailure: return "oracle failure";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kInternal: return "internal error";
  }
  return "error";
}

/// Base of every exception thrown by the library. `kind()` lets callers
/// (the CLI in particular) map failures onto exit codes without string
/// matching.
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

}  // namespace wordcnn
