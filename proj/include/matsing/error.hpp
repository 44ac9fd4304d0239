#pragma once

#include <stdexcept>
#include <string>

namespace matsing {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of the operands do not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An iterative eigen-solver did not converge.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The pencil (A, B) shares a null direction, so every z is a generalized eigenvalue.
class DegeneratePencilError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is numerically singular.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the function (disk radius, probability, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A combinatorial guard (permutation count, derivative order) was exceeded.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// The number of points passed does not match what the function needs.
class ArityError : public Error {
 public:
  using Error::Error;
};

/// A kernel produced a Gram matrix with a clearly negative determinant.
class KernelError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace matsing
