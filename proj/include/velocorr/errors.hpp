#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace velocorr {

/// Base class for recoverable data/estimation failures. Programming errors
/// (bad arguments, out-of-range queries) use the std exceptions directly.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingPoseError : Error {
  using Error::Error;
};

struct DegenerateGeometryError : Error {
  using Error::Error;
};

struct UnobservableVelocityError : Error {
  using Error::Error;
};

struct IllConditionedError : Error {
  IllConditionedError(const std::string& what, const Eigen::Vector3d& dir)
      : Error(what), null_direction(dir) {}
  Eigen::Vector3d null_direction;
};

struct InsufficientInliersError : Error {
  using Error::Error;
};

struct EmptyInputError : Error {
  using Error::Error;
};

struct MisalignedInputError : Error {
  using Error::Error;
};

struct InvalidMeasurementError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct PairingError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace velocorr
