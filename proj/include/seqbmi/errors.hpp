#pragma once

#include <stdexcept>
#include <string>

namespace seqbmi {

// Shape or length disagreement between arguments.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data violates a documented precondition (NaN entries, asymmetric
// blocks, plant assumptions such as D11 = 0).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Lyapunov/Sylvester operator is singular: lambda_i + lambda_j ~ 0.
class SingularPencilError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense eigenvalue iteration did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed-loop norm was requested for a matrix that is not Hurwitz.
class UnstableSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace seqbmi
