#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace diraclap {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Boundary-value branch of a resolvent on the continuous spectrum.
/// Outgoing is the "+" continuation (H^(1), e^{+izr}), Incoming the "-" one.
enum class Branch { Outgoing, Incoming };

inline Branch flip(Branch b) { return b == Branch::Outgoing ? Branch::Incoming : Branch::Outgoing; }
inline const char* to_string(Branch b) { return b == Branch::Outgoing ? "+" : "-"; }

/// Violated precondition or malformed input. Maps to CLI exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-convergence, near-singular solve, memory cap. Exit status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dense allocation would exceed the configured matrix-dimension cap.
class MemoryCapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// I + V R0(lambda) is numerically singular; lambda is carried for the report.
class NearSingularError : public NumericalError {
 public:
  NearSingularError(const std::string& what, cplx lambda, double condition)
      : NumericalError(what), lambda_(lambda), condition_(condition) {}
  cplx lambda() const { return lambda_; }
  double condition() const { return condition_; }

 private:
  cplx lambda_;
  double condition_;
};

}  // namespace diraclap
