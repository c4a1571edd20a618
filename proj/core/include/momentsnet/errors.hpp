#pragma once

#include <stdexcept>
#include <string>

namespace momentsnet {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An order index outside the family's domain, e.g. Zernike with odd n-|m|.
class IndexDomainError : public Error {
 public:
  using Error::Error;
};

/// Family parameter outside its admissible range, or a gamma-function pole.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// More filters requested than the basis can supply.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Block or patch geometry that does not fit the input extent.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// No threshold reaches the requested ones-fraction interval.
class SearchError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormatError : public IoError {
 public:
  using IoError::IoError;
};

class CorruptHeaderError : public IoError {
 public:
  using IoError::IoError;
};

class DimensionOverflowError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace momentsnet
