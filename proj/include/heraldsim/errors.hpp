#ifndef HERALDSIM_ERRORS_HPP
#define HERALDSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace heraldsim {

// Base class for numerical and physical-domain failures.  The CLI maps
// these to exit code 3; configuration problems (below) map to exit code 2.
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

// Truncated Fock space too small for the requested state or operator.
class TruncationError : public SimError {
 public:
  using SimError::SimError;
};

// An iterative or series computation failed its self-consistency check.
class ConvergenceError : public SimError {
 public:
  using SimError::SimError;
};

// A quantity is undefined for the given inputs (e.g. moments of an
// identically zero count distribution).
class DegenerateError : public SimError {
 public:
  using SimError::SimError;
};

// Fewer dispersion roots found than bands requested.
class RootCountError : public SimError {
 public:
  using SimError::SimError;
};

// Group velocity (or its defining derivative) vanishes where a finite
// value is required.
class BandEdgeError : public SimError {
 public:
  using SimError::SimError;
};

// The Bloch boundary matrix has a (numerically) two-dimensional null
// space; the caller must perturb k away from the crossing.
class DegenerateNullspaceError : public SimError {
 public:
  using SimError::SimError;
};

// Quadrature refinement disagreed beyond tolerance.
class QuadratureError : public SimError {
 public:
  using SimError::SimError;
};

// No k interval satisfies the requested group-velocity ceiling.
class EmptyWindowError : public SimError {
 public:
  using SimError::SimError;
};

// Bad or missing configuration keys / CLI arguments.  Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class UnknownPresetError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace heraldsim

#endif
