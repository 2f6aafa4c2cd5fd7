#pragma once

#include <stdexcept>
#include <string>

namespace mgflow {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A product or reconstruction would exceed the configured bandwidth cap.
class BandwidthExceeded : public Error {
 public:
  using Error::Error;
};

/// A grid is too coarse for an exact spectral round-trip.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// A metric factor vanishes or changes sign (no reciprocal, no Hamiltonian).
class DegenerateField : public Error {
 public:
  using Error::Error;
};

/// Inputs violate an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Adaptive integration could not find an acceptable step.
class StepUnderflow : public Error {
 public:
  using Error::Error;
};

}  // namespace mgflow
