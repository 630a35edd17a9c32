#include "diraclap/potential.hpp"

#include <cmath>
#include <sstream>

namespace diraclap {

double PotentialSpec::radial(double r) const {
  switch (kind) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::GaussianBump:
      return std::exp(-r * r / (width * width));
    case PotentialKind::InversePower:
      return std::pow(1.0 + r * r, -decay / 2.0);
    case PotentialKind::CompactSmooth: {
      const double t = r / width;
      if (t >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - t * t));
    }
  }
  return 0.0;
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Zero:
      return "zero";
    case PotentialKind::GaussianBump:
      return "gaussian_bump";
    case PotentialKind::InversePower:
      return "inverse_power";
    case PotentialKind::CompactSmooth:
      return "compact_smooth";
  }
  return "zero";
}

std::string to_string(MatrixProfile profile) {
  switch (profile) {
    case MatrixProfile::Scalar:
      return "scalar";
    case MatrixProfile::Beta:
      return "beta";
    case MatrixProfile::Fixed:
      return "fixed";
  }
  return "scalar";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "zero") return PotentialKind::Zero;
  if (name == "gaussian_bump") return PotentialKind::GaussianBump;
  if (name == "inverse_power") return PotentialKind::InversePower;
  if (name == "compact_smooth") return PotentialKind::CompactSmooth;
  throw ValidationError("unknown potential kind '" + name +
                        "' (expected zero, gaussian_bump, inverse_power or compact_smooth)");
}

MatrixProfile matrix_profile_from_string(const std::string& name) {
  if (name == "scalar") return MatrixProfile::Scalar;
  if (name == "beta") return MatrixProfile::Beta;
  if (name == "fixed") return MatrixProfile::Fixed;
  throw ValidationError("unknown matrix profile '" + name + "' (expected scalar, beta or fixed)");
}

std::vector<std::string> potential_warnings(const PotentialSpec& spec, DecayHypothesis hypothesis) {
  std::vector<std::string> out;
  if (spec.kind != PotentialKind::InversePower || spec.vanishes()) return out;
  std::ostringstream msg;
  if (hypothesis == DecayHypothesis::Lap && spec.decay <= 1.0) {
    msg << "potential decay rho = " << spec.decay << " does not exceed 1; the LAP hypothesis |V| <~ <x>^{-1-} fails";
    out.push_back(msg.str());
  } else if (hypothesis == DecayHypothesis::MassiveThreshold && spec.decay <= 2.0) {
    msg << "potential decay rho = " << spec.decay
        << " does not exceed 2; the massive threshold analysis assumes the stronger decay";
    out.push_back(msg.str());
  }
  return out;
}

CMatrix profile_matrix(const PotentialSpec& spec, const DiracMatrices& mats) {
  const int s = mats.spinor_dim;
  switch (spec.profile) {
    case MatrixProfile::Scalar:
      return CMatrix::Identity(s, s);
    case MatrixProfile::Beta:
      return mats.beta;
    case MatrixProfile::Fixed: {
      if (spec.matrix.rows() != s || spec.matrix.cols() != s)
        throw ValidationError("fixed potential matrix must be " + std::to_string(s) + " x " + std::to_string(s));
      if ((spec.matrix - spec.matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-14)
        throw ValidationError("fixed potential matrix must be Hermitian");
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(spec.matrix, Eigen::EigenvaluesOnly);
      const double norm = eig.eigenvalues().cwiseAbs().maxCoeff();
      if (norm == 0.0) return CMatrix::Zero(s, s);
      return spec.matrix / norm;
    }
  }
  return CMatrix::Identity(s, s);
}

CMatrix potential_value(const PotentialSpec& spec, const DiracMatrices& mats, const std::array<double, 3>& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  return (spec.coupling * spec.radial(r)) * profile_matrix(spec, mats);
}

MultiplicationOperator sample_potential(const PotentialSpec& spec, const DiracMatrices& mats, const Grid& grid) {
  if (mats.dimension != grid.n) throw ValidationError("potential and grid dimensions differ");
  if (spec.kind == PotentialKind::GaussianBump || spec.kind == PotentialKind::CompactSmooth) {
    if (!(spec.width > 0.0)) throw ValidationError("potential width must be positive");
  }
  if (spec.kind == PotentialKind::InversePower && !(spec.decay > 0.0))
    throw ValidationError("potential decay rho must be positive");
  const int s = mats.spinor_dim;
  const CMatrix M = profile_matrix(spec, mats);
  std::vector<CMatrix> blocks(grid.num_points());
  for (Eigen::Index p = 0; p < grid.num_points(); ++p) {
    const double f = spec.vanishes() ? 0.0 : spec.coupling * spec.radial(grid.radius(p));
    blocks[p] = f == 0.0 ? CMatrix::Zero(s, s) : CMatrix(f * M);
  }
  return MultiplicationOperator(grid, s, std::move(blocks));
}

}  // namespace diraclap
