#pragma once

#include <memory>
#include <string>
#include <vector>

#include "diraclap/grid.hpp"
#include "diraclap/kernels.hpp"
#include "diraclap/types.hpp"

namespace diraclap {

/// Square operator on grid spinor space (dimension points * spinor_dim).
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Eigen::Index size() const = 0;
  virtual void apply(const CVector& x, CVector& y) const = 0;
  virtual void apply_adjoint(const CVector& x, CVector& y) const = 0;

  CVector operator*(const CVector& x) const {
    CVector y;
    apply(x, y);
    return y;
  }
  CVector adjoint_times(const CVector& x) const {
    CVector y;
    apply_adjoint(x, y);
    return y;
  }
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

/// Dense matrix-dimension cap; DIRAC_LAP_MEMCAP (bytes) overrides the default 20000.
Eigen::Index dense_dimension_cap();
void check_dense_dimension(Eigen::Index dim, const std::string& what);

/// Materializes any operator column by column (guarded by the cap).
CMatrix to_dense(const LinearOperator& op);

/// Dense discretized integral operator, stored row-major.
class KernelOperator final : public LinearOperator {
 public:
  using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  KernelOperator(Grid grid, int spinor_dim, RowMatrix matrix, Branch branch, std::string label);

  Eigen::Index size() const override { return matrix_.rows(); }
  void apply(const CVector& x, CVector& y) const override;
  void apply_adjoint(const CVector& x, CVector& y) const override;

  const Grid& grid() const { return grid_; }
  int spinor_dim() const { return spinor_dim_; }
  const RowMatrix& matrix() const { return matrix_; }
  Branch branch() const { return branch_; }
  const std::string& label() const { return label_; }

 private:
  Grid grid_;
  int spinor_dim_;
  RowMatrix matrix_;
  Branch branch_;
  std::string label_;
};

/// Translation-invariant operator y(x) = sum_y K(x - y) f(y) h^n applied by
/// zero-padded FFT convolution. Never forms the dense matrix.
class ConvolutionOperator final : public LinearOperator {
 public:
  ConvolutionOperator(const Grid& grid, const MatrixKernel& kernel, Branch branch, std::string label);
  ~ConvolutionOperator() override;
  ConvolutionOperator(const ConvolutionOperator&) = delete;
  ConvolutionOperator& operator=(const ConvolutionOperator&) = delete;

  Eigen::Index size() const override;
  void apply(const CVector& x, CVector& y) const override;
  void apply_adjoint(const CVector& x, CVector& y) const override;

  const Grid& grid() const;
  int spinor_dim() const;
  Branch branch() const;
  const std::string& label() const;
  /// s x s kernel block coupling point p (row) to point q (column), h^n included.
  CMatrix block(Eigen::Index p, Eigen::Index q) const;
  /// Dense submatrix on a subset of points (rows and columns).
  CMatrix dense_block(const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols) const;
  KernelOperator to_kernel_operator() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Dense assembly of a kernel: entries K(x - y) h^n off the diagonal, the cell integral on it.
KernelOperator assemble_operator(const MatrixKernel& kernel, const Grid& grid, Branch branch,
                                 const std::string& label = "kernel");
std::shared_ptr<ConvolutionOperator> assemble_convolution(const MatrixKernel& kernel, const Grid& grid, Branch branch,
                                                          const std::string& label = "kernel");

/// Block-diagonal multiplication by a Hermitian s x s matrix per point.
class MultiplicationOperator final : public LinearOperator {
 public:
  MultiplicationOperator(Grid grid, int spinor_dim, std::vector<CMatrix> blocks);

  Eigen::Index size() const override { return grid_.num_points() * spinor_dim_; }
  void apply(const CVector& x, CVector& y) const override;
  void apply_adjoint(const CVector& x, CVector& y) const override;

  const Grid& grid() const { return grid_; }
  int spinor_dim() const { return spinor_dim_; }
  const CMatrix& block(Eigen::Index p) const { return blocks_[p]; }
  /// Points where the block is not identically zero.
  std::vector<Eigen::Index> support() const;
  /// max_x |V(x)|_op
  double sup_norm() const;
  bool is_zero() const;
  MultiplicationOperator scaled(double factor) const;
  CMatrix dense() const;

 private:
  Grid grid_;
  int spinor_dim_;
  std::vector<CMatrix> blocks_;
};

/// diag(left) A diag(right), real weights per component.
class WeightedOperator final : public LinearOperator {
 public:
  WeightedOperator(OperatorPtr inner, RVector left, RVector right);
  Eigen::Index size() const override { return inner_->size(); }
  void apply(const CVector& x, CVector& y) const override;
  void apply_adjoint(const CVector& x, CVector& y) const override;

 private:
  OperatorPtr inner_;
  RVector left_, right_;
};

/// factors[0] * factors[1] * ... (rightmost applied first).
class ProductOperator final : public LinearOperator {
 public:
  explicit ProductOperator(std::vector<OperatorPtr> factors);
  Eigen::Index size() const override { return factors_.front()->size(); }
  void apply(const CVector& x, CVector& y) const override;
  void apply_adjoint(const CVector& x, CVector& y) const override;

 private:
  std::vector<OperatorPtr> factors_;
};

/// identity_coeff * I + sum c_k A_k
class LinearCombination final : public LinearOperator {
 public:
  LinearCombination(Eigen::Index size, cplx identity_coeff, std::vector<std::pair<cplx, OperatorPtr>> terms);
  Eigen::Index size() const override { return size_; }
  void apply(const CVector& x, CVector& y) const override;
  void apply_adjoint(const CVector& x, CVector& y) const override;

 private:
  Eigen::Index size_;
  cplx identity_coeff_;
  std::vector<std::pair<cplx, OperatorPtr>> terms_;
};

/// Wraps an explicit dense matrix.
class MatrixOperator final : public LinearOperator {
 public:
  explicit MatrixOperator(CMatrix m) : m_(std::move(m)) {}
  Eigen::Index size() const override { return m_.rows(); }
  void apply(const CVector& x, CVector& y) const override { y = m_ * x; }
  void apply_adjoint(const CVector& x, CVector& y) const override { y = m_.adjoint() * x; }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
};

OperatorPtr weighted(OperatorPtr inner, const RVector& left, const RVector& right);
OperatorPtr product(std::vector<OperatorPtr> factors);
OperatorPtr difference(OperatorPtr a, OperatorPtr b);

}  // namespace diraclap
