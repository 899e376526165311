#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixreg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates a documented precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// AR coefficients whose companion matrix is not Schur stable.
class UnstableProcess : public Error {
 public:
  explicit UnstableProcess(double spectral_radius)
      : Error("companion matrix is not Schur stable (spectral radius " +
              std::to_string(spectral_radius) + ")"),
        spectral_radius_(spectral_radius) {}
  double spectral_radius() const noexcept { return spectral_radius_; }

 private:
  double spectral_radius_;
};

/// The design Gram matrix (or a covariance to be inverted) is singular.
class DegenerateDesign : public Error {
 public:
  explicit DegenerateDesign(double min_eigenvalue, const std::string& what = "design")
      : Error(what + " is degenerate (min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// A mixing profile lacks the coefficient for a gap that a computation needs.
class MissingCoefficient : public Error {
 public:
  explicit MissingCoefficient(std::size_t gap)
      : Error("mixing profile has no coefficient for gap " + std::to_string(gap)), gap_(gap) {}
  std::size_t gap() const noexcept { return gap_; }

 private:
  std::size_t gap_;
};

/// The operation is not defined for this kind of process.
class UnsupportedSpec : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mixreg
