#ifndef LLMDEP_ERRORS_H_
#define LLMDEP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace llmdep {

// Input that violates a documented format or precondition.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or an inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system or stream failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace llmdep

#endif  // LLMDEP_ERRORS_H_
