#pragma once

#include <stdexcept>
#include <string>

namespace prefgame {

// Misuse of an interface: dimension mismatches, empty inputs, calling a
// solver entry point with the wrong algorithm tag.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed call with invalid values: support violations, non-finite
// numbers, probabilities outside [0,1].
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative procedure exhausted its budget without meeting its tolerance.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace prefgame
