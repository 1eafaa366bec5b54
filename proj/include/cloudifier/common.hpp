#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cloudifier {

#if defined(CLOUDIFIER_FLOAT64)
using real_t = double;
#else
using real_t = float;
#endif

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A NaN/Inf appeared, or a gradient step was rejected.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Invalid argument values or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Autograd misuse: missing dependency, replayed tape.
class GraphError : public Error {
 public:
  using Error::Error;
};

}  // namespace cloudifier
