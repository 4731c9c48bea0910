#pragma once

#include <stdexcept>
#include <string>

namespace v1motion {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A patch or sample position falls outside the image.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Dimensions of two operands disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A displacement is not a member of the candidate grid.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A loss or gradient became non-finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents (bad magic, truncated blocks, bad header).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File was written by an incompatible format version.
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Invalid user-supplied configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, created or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace v1motion
