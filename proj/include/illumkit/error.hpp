#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace illumkit {

// Base of every error raised by the library. The CLI maps UsageError to exit
// code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero-norm, negative-only or otherwise non-physical illuminant.
class InvalidIlluminantError : public Error {
 public:
  using Error::Error;
};

// Illuminant with a zero component handed to the von Kries correction.
class DegenerateIlluminantError : public Error {
 public:
  using Error::Error;
};

// Input data violating a precondition (NaN pixels, dimension mismatch, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed binary container or CSV. Carries the byte offset of the failure
// for binary formats (npos when not applicable).
class FormatError : public Error {
 public:
  static constexpr std::uint64_t npos = ~std::uint64_t{0};

  explicit FormatError(const std::string& what, std::uint64_t offset = npos)
      : Error(offset == npos ? what
                             : what + " (at byte offset " +
                                   std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Spectral configuration that cannot produce a valid ground truth.
class DegenerateConfigError : public Error {
 public:
  using Error::Error;
};

// Evaluation protocol / grid / manifest problems.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class AugmentationError : public Error {
 public:
  using Error::Error;
};

// Bad command line or configuration file contents.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace illumkit
