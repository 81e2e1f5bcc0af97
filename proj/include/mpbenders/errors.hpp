#pragma once

#include <stdexcept>
#include <string>

namespace mpb {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent matrix/vector shapes in problem input.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Pivoting stalled, a basis could not be factorized, or an iteration cap was hit.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Graph does not have the master/subproblem shape Benders requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// The mp-LP is infeasible for every parameter in its parameter set.
class EmptySolution : public Error {
 public:
  using Error::Error;
};

// A parameter vector lies in no stored critical region.
class NoRegionFound : public Error {
 public:
  using Error::Error;
};

// Malformed or unsupported serialized document. `path` names the offending
// element, e.g. "regions[3].E".
class FormatError : public Error {
 public:
  FormatError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class MasterInfeasible : public Error {
 public:
  using Error::Error;
};

// A subproblem oracle could not produce a cut; the message carries the
// subproblem id and the parameter vector.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace mpb
