#include "diraclap/norms.hpp"

#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace diraclap {

CVector start_vector(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = u(rng);
    const double im = u(rng);
    v[i] = cplx(re, im);
  }
  return v / v.norm();
}

NormResult spectral_norm(const LinearOperator& A, const NormOptions& opts) {
  NormResult res;
  CVector v = start_vector(A.size(), opts.seed), w, u;
  double prev = -1.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    A.apply(v, w);
    const double sigma = w.norm();
    res.iterations = it;
    res.value = sigma;
    if (sigma == 0.0) {
      res.converged = true;
      res.residual = 0.0;
      res.vector = v;
      return res;
    }
    A.apply_adjoint(w, u);
    res.residual = (u - (sigma * sigma) * v).norm() / (sigma * sigma);
    const double un = u.norm();
    v = u / un;
    if (prev > 0.0 && std::abs(sigma - prev) <= opts.tol * sigma) {
      res.converged = true;
      break;
    }
    prev = sigma;
  }
  res.vector = v;
  return res;
}

NormResult weighted_operator_norm(const OperatorPtr& A, const Grid& grid, int spinor_dim, double sigma,
                                  const NormOptions& opts) {
  if (!(sigma > 0.0)) throw ValidationError("weight exponent sigma must be positive");
  const RVector w = weight_vector(grid, spinor_dim, sigma);
  const WeightedOperator op(A, w, w);
  return spectral_norm(op, opts);
}

namespace {

struct BlockEstimate {
  double rayleigh = 0.0;
  double upper = 0.0;
  bool converged = true;
};

// Power iteration on one block. With rho = |A v|^2 and r = A*A v - rho v for the final unit
// iterate, some eigenvalue of A*A lies within |r| of rho; once the iteration has settled on the
// dominant one this gives the bracket sqrt(rho) <= |A| <= sqrt(rho + |r|).
BlockEstimate block_norm(const OperatorPtr& A, const RVector& left, const RVector& right, const NormOptions& opts) {
  BlockEstimate out;
  if (left.maxCoeff() == 0.0 || right.maxCoeff() == 0.0) return out;
  const WeightedOperator op(A, left, right);
  const NormResult r = spectral_norm(op, opts);
  out.converged = r.converged;
  if (r.value > 0.0) {
    CVector w, u;
    const CVector v = r.vector / r.vector.norm();
    op.apply(v, w);
    const double rho = w.squaredNorm();
    op.apply_adjoint(w, u);
    const double res = (u - rho * v).norm();
    out.rayleigh = std::max(r.value, std::sqrt(rho));
    out.upper = std::max(out.rayleigh, std::sqrt(rho + res));
  }
  return out;
}

std::vector<RVector> shell_masks(const DyadicShells& shells, int s) {
  std::vector<RVector> masks;
  for (int j = 0; j < shells.count(); ++j) masks.push_back(shells.mask(j, s));
  return masks;
}

}  // namespace

NormBracket b_to_bstar_norm(const OperatorPtr& A, const DyadicShells& shells, int spinor_dim,
                            const NormOptions& opts) {
  NormBracket out;
  const auto masks = shell_masks(shells, spinor_dim);
  const int J = shells.count();
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < J; ++k) {
      const BlockEstimate b = block_norm(A, masks[j], masks[k], opts);
      const double scale = std::pow(2.0, -0.5 * (j + k));
      out.lo = std::max(out.lo, scale * b.rayleigh);
      out.hi = std::max(out.hi, scale * b.upper);
      out.converged = out.converged && b.converged;
    }
  }
  return out;
}

NormBracket b_to_b_norm(const OperatorPtr& A, const DyadicShells& shells, int spinor_dim, const NormOptions& opts) {
  NormBracket out;
  const auto masks = shell_masks(shells, spinor_dim);
  const int J = shells.count();
  const RVector dyadic = shells.dyadic_weight(spinor_dim, 1.0);
  CVector w, g, acc;
  for (int k = 0; k < J; ++k) {
    if (masks[k].maxCoeff() == 0.0) continue;
    double upper = 0.0;
    for (int j = 0; j < J; ++j) {
      const BlockEstimate b = block_norm(A, masks[j], masks[k], opts);
      upper += std::pow(2.0, 0.5 * (j - k)) * b.upper;
      out.converged = out.converged && b.converged;
    }
    out.hi = std::max(out.hi, upper);

    // Lower bound: start from the top right singular vector of D A chi_k, then ascend.
    const WeightedOperator column(A, dyadic, masks[k]);
    const NormResult top = spectral_norm(column, opts);
    CVector v = top.vector.cwiseProduct(masks[k].cast<cplx>());
    if (v.norm() == 0.0) continue;
    v /= v.norm();
    double best = 0.0;
    for (int it = 0; it < 50; ++it) {
      A->apply(v, w);
      double value = 0.0;
      acc = CVector::Zero(v.size());
      for (int j = 0; j < J; ++j) {
        const CVector part = w.cwiseProduct(masks[j].cast<cplx>());
        const double pn = part.norm();
        if (pn == 0.0) continue;
        value += std::pow(2.0, 0.5 * j) * pn;
        A->apply_adjoint(part / pn, g);
        acc += std::pow(2.0, 0.5 * j) * g;
      }
      value *= std::pow(2.0, -0.5 * k);
      const bool stalled = value <= best * (1.0 + opts.tol);
      best = std::max(best, value);
      if (stalled) break;
      acc = acc.cwiseProduct(masks[k].cast<cplx>());
      if (acc.norm() == 0.0) break;
      v = acc / acc.norm();
    }
    out.lo = std::max(out.lo, best);
  }
  out.hi = std::max(out.hi, out.lo);
  return out;
}

namespace {

SingularResult lanczos_smallest(const LinearOperator& A, double tol) {
  const Eigen::Index dim = A.size();
  const int max_basis = static_cast<int>(std::min<Eigen::Index>(dim, 400));
  const int max_restarts = 20;
  SingularResult res;
  CVector q = start_vector(dim, 0x1a2c05ULL), w, tmp;
  double scale = 0.0;
  for (int restart = 0; restart < max_restarts; ++restart) {
    CMatrix Q(dim, max_basis);
    std::vector<double> alpha, beta;
    Q.col(0) = q;
    double theta = 0.0, resid = 0.0;
    Eigen::VectorXd ritz;
    int k = 0;
    for (; k < max_basis; ++k) {
      A.apply(Q.col(k), tmp);
      A.apply_adjoint(tmp, w);
      ++res.iterations;
      const double a = Q.col(k).dot(w).real();
      alpha.push_back(a);
      // Full reorthogonalization, twice.
      for (int pass = 0; pass < 2; ++pass) {
        const CVector c = Q.leftCols(k + 1).adjoint() * w;
        w -= Q.leftCols(k + 1) * c;
      }
      const double b = w.norm();
      scale = std::max(scale, std::abs(a) + b);
      const int m = k + 1;
      const bool check = (m % 8 == 0) || m == max_basis || b <= 1e-14 * scale;
      if (check) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
          T(i, i) = alpha[i];
          if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        theta = es.eigenvalues()(0);
        ritz = es.eigenvectors().col(0);
        resid = b * std::abs(ritz(m - 1));
        if (resid <= tol * scale || b <= 1e-14 * scale) {
          k = m;
          res.converged = true;
          break;
        }
      }
      if (k + 1 < max_basis) {
        beta.push_back(b);
        Q.col(k + 1) = w / b;
      }
    }
    const int m = static_cast<int>(ritz.size());
    q = Q.leftCols(m) * ritz.cast<cplx>();
    q /= q.norm();
    res.value = std::sqrt(std::max(theta, 0.0));
    res.vector = q;
    if (res.converged) break;
  }
  // Refine the value with the Rayleigh quotient of the final vector.
  A.apply(res.vector, tmp);
  res.value = tmp.norm();
  return res;
}

}  // namespace

SingularResult smallest_singular_value(const LinearOperator& A, Eigen::Index dense_svd_limit, double tol) {
  if (A.size() <= dense_svd_limit) {
    const CMatrix M = to_dense(A);
    Eigen::BDCSVD<CMatrix> svd(M, Eigen::ComputeThinV);
    const Eigen::Index last = svd.singularValues().size() - 1;
    SingularResult res;
    res.value = svd.singularValues()(last);
    res.vector = svd.matrixV().col(last);
    res.iterations = 1;
    res.converged = true;
    return res;
  }
  return lanczos_smallest(A, tol);
}

}  // namespace diraclap
