#pragma once

#include <stdexcept>
#include <string>

namespace xfrisk {

enum class ErrorKind {
  Usage,          // bad command-line or config values
  Configuration,  // invalid model/scenario parameters
  Structural,     // misaligned or malformed series
  Topology,       // broken meter/transformer references
  Data,           // invalid input records
  Domain,         // argument outside a function's mathematical domain
  Io,
};

/// Base exception for every recoverable failure in the library. The kind
/// decides the process exit code at the CLI boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::Structural: return "structural error";
    case ErrorKind::Topology: return "topology error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

/// 1 usage, 2 data validation, 3 internal.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Configuration:
      return 1;
    case ErrorKind::Structural:
    case ErrorKind::Topology:
    case ErrorKind::Data:
    case ErrorKind::Domain:
    case ErrorKind::Io:
      return 2;
  }
  return 3;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace xfrisk
