#pragma once

#include <string>
#include <vector>

#include "diraclap/clifford.hpp"
#include "diraclap/grid.hpp"
#include "diraclap/operators.hpp"

namespace diraclap {

enum class PotentialKind { Zero, GaussianBump, InversePower, CompactSmooth };
enum class MatrixProfile { Scalar, Beta, Fixed };

/// V(x) = s * f(|x|) * M with
///   gaussian_bump   f = exp(-|x|^2 / width^2)
///   inverse_power   f = <x>^{-rho}
///   compact_smooth  f = exp(1 - 1 / (1 - (|x|/width)^2)) inside |x| < width, 0 outside
/// and M = I, beta, or a fixed Hermitian matrix rescaled to unit operator norm.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Zero;
  double coupling = 0.0;
  double decay = 2.0;
  double width = 1.0;
  MatrixProfile profile = MatrixProfile::Scalar;
  CMatrix matrix;  // used when profile == Fixed

  /// Scalar radial factor f(r).
  double radial(double r) const;
  /// Whether |V(x)| is identically zero.
  bool vanishes() const { return kind == PotentialKind::Zero || coupling == 0.0; }
};

std::string to_string(PotentialKind kind);
std::string to_string(MatrixProfile profile);
PotentialKind potential_kind_from_string(const std::string& name);
MatrixProfile matrix_profile_from_string(const std::string& name);

/// Hypothesis an experiment places on the decay of V.
enum class DecayHypothesis { None, Lap, MassiveThreshold };

/// Human-readable warnings when the potential violates the hypothesis (never throws for that).
std::vector<std::string> potential_warnings(const PotentialSpec& spec, DecayHypothesis hypothesis);

/// The s x s matrix M of the profile (unit operator norm for Fixed).
CMatrix profile_matrix(const PotentialSpec& spec, const DiracMatrices& mats);

/// V(x) at a point.
CMatrix potential_value(const PotentialSpec& spec, const DiracMatrices& mats, const std::array<double, 3>& x);

MultiplicationOperator sample_potential(const PotentialSpec& spec, const DiracMatrices& mats, const Grid& grid);

}  // namespace diraclap
