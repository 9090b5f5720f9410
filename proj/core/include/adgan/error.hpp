#pragma once

#include <stdexcept>
#include <string>

namespace adgan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or unknown configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Tensor or grid dimensions do not satisfy an operation's contract.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Mask synthesis could not fit the minimum object count.
class PlacementExhausted : public Error {
 public:
  using Error::Error;
};

/// A training loss became NaN or infinite.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace adgan
