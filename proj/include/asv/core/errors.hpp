#pragma once

#include <stdexcept>
#include <string>

namespace asv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or malformed configuration entry.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity produced inside a numerical routine.
class NumericFault : public Error {
 public:
  using Error::Error;
};

/// Physically inconsistent parameters (e.g. singular mass matrix).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Water depth at the vessel position is not above its draught.
class GroundingError : public Error {
 public:
  using Error::Error;
};

/// Depth too small for the shallow-water approximations.
class InfeasibleDepth : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UndefinedBearing : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

/// Tensor shapes or serialized layouts disagree.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace asv
