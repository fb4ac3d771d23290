#pragma once

#include <stdexcept>
#include <string>

namespace wncs {

// Base class for everything thrown by this library. CLI maps subtypes
// to exit codes, so catch sites can stay coarse.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem trouble on the output side: unwritable directories or files.
// A missing input file is a configuration mistake, not an IoError.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input text is not valid JSON or has the wrong shape/type.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Matrix/vector sizes are inconsistent with each other.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value is outside its admissible range (probabilities, PSD-ness, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap before meeting tolerance.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Ill-conditioned or singular linear algebra along the way.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The "always" policy needs at least as many channels as loops.
class InfeasibleAlways : public Error {
 public:
  using Error::Error;
};

// Asked for statistics of an empty trace.
class EmptyTrace : public Error {
 public:
  using Error::Error;
};

// Exhaustive search requested on an instance too large to enumerate.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// A probability vector/table fails nonnegativity or normalization.
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

// Constraint set is empty (e.g. distortion target below the MMSE floor).
class Infeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace wncs
