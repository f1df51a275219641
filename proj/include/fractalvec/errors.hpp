#pragma once

#include <stdexcept>
#include <string>

namespace fractalvec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (bad input, unsolvable data).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Invalid FractalSpec or graph data.
class ConstructionError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Numerical failure: singular system, eigensolver non-convergence.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace fractalvec
