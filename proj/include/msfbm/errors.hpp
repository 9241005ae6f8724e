#pragma once

#include <stdexcept>
#include <string>

namespace msfbm {

// Input that violates a documented invariant (spec, grid, window, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Every rung of the jitter ladder failed to produce a Cholesky factor.
class FactorizationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientResolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientReplicas : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LevelNotCrossed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace msfbm
