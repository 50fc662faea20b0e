#pragma once

#include <stdexcept>
#include <string>

namespace guesswork {

/// Base of every error raised by the library. The CLI maps each subclass to
/// a distinct exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (character outside the alphabet, beta <= 0, U > V, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A computation would exceed a configured enumeration cap.
class ResourceError : public Error {
public:
  using Error::Error;
};

/// Inconsistent inputs: mismatched grids or alphabets, malformed configs.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A numeric routine failed to converge or produced a non-finite value.
class NumericError : public Error {
public:
  using Error::Error;
};

/// The requested source model is not supported by this code path.
class UnsupportedModelError : public Error {
public:
  using Error::Error;
};

} // namespace guesswork
