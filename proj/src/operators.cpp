#include "diraclap/operators.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "diraclap/simd.hpp"
#include "fft_plans.hpp"

namespace diraclap {

Eigen::Index dense_dimension_cap() {
  if (const char* env = std::getenv("DIRAC_LAP_MEMCAP"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double bytes = std::strtod(env, &end);
    if (end != env && bytes > 0.0) return static_cast<Eigen::Index>(std::sqrt(bytes / sizeof(cplx)));
  }
  return 20000;
}

void check_dense_dimension(Eigen::Index dim, const std::string& what) {
  const Eigen::Index cap = dense_dimension_cap();
  if (dim > cap)
    throw MemoryCapError(what + ": dense dimension " + std::to_string(dim) + " exceeds the cap " +
                         std::to_string(cap) + " (set DIRAC_LAP_MEMCAP to raise it)");
}

CMatrix to_dense(const LinearOperator& op) {
  const Eigen::Index dim = op.size();
  check_dense_dimension(dim, "to_dense");
  CMatrix out(dim, dim);
  CVector e = CVector::Zero(dim), col;
  for (Eigen::Index j = 0; j < dim; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    out.col(j) = col;
    e[j] = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// KernelOperator

KernelOperator::KernelOperator(Grid grid, int spinor_dim, RowMatrix matrix, Branch branch, std::string label)
    : grid_(grid), spinor_dim_(spinor_dim), matrix_(std::move(matrix)), branch_(branch), label_(std::move(label)) {}

void KernelOperator::apply(const CVector& x, CVector& y) const {
  const auto& k = simd::active();
  const Eigen::Index n = matrix_.rows();
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = k.dotu(matrix_.row(i).data(), x.data(), matrix_.cols());
}

void KernelOperator::apply_adjoint(const CVector& x, CVector& y) const {
  const auto& k = simd::active();
  y = CVector::Zero(matrix_.cols());
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) k.axpy_conj(x[i], matrix_.row(i).data(), y.data(), matrix_.cols());
}

// ---------------------------------------------------------------------------
// FFT convolution

using detail::FftBuffer;
using detail::PlanPair;
using detail::plans_for;

struct ConvolutionOperator::Impl {
  Grid grid;
  int s = 1;
  int P = 0;
  int Q = 0;
  int span = 0;  // 2P - 1
  std::size_t fft_len = 0;
  Branch branch = Branch::Outgoing;
  std::string label;
  std::vector<cplx> table;          // [(offset index) * s + r] * s + c
  std::vector<FftBuffer> spectra;   // s*s spectra, r * s + c
  std::vector<std::size_t> scatter; // grid point -> padded index
  PlanPair plans{};

  std::size_t offset_index(const std::array<int, 3>& delta) const {
    std::size_t idx = 0;
    for (int k = grid.n - 1; k >= 0; --k) idx = idx * span + static_cast<std::size_t>(delta[k] + P - 1);
    return idx;
  }

  void run(const CVector& x, CVector& y, bool adjoint) const;
};

void ConvolutionOperator::Impl::run(const CVector& x, CVector& y, bool adjoint) const {
  const auto& k = simd::active();
  const Eigen::Index npts = grid.num_points();
  std::vector<FftBuffer> in;
  in.reserve(s);
  for (int c = 0; c < s; ++c) {
    in.emplace_back(fft_len);
    in.back().zero();
    for (Eigen::Index p = 0; p < npts; ++p) in.back().data[scatter[p]] = x[p * s + c];
    fftw_execute_dft(plans.forward, in.back().raw(), in.back().raw());
  }
  y.resize(npts * s);
  FftBuffer acc(fft_len);
  const double norm = 1.0 / static_cast<double>(fft_len);
  for (int r = 0; r < s; ++r) {
    acc.zero();
    for (int c = 0; c < s; ++c) {
      if (adjoint)
        k.conj_mul_acc(acc.data, spectra[c * s + r].data, in[c].data, fft_len);
      else
        k.mul_acc(acc.data, spectra[r * s + c].data, in[c].data, fft_len);
    }
    fftw_execute_dft(plans.backward, acc.raw(), acc.raw());
    for (Eigen::Index p = 0; p < npts; ++p) y[p * s + r] = acc.data[scatter[p]] * norm;
  }
}

ConvolutionOperator::ConvolutionOperator(const Grid& grid, const MatrixKernel& kernel, Branch branch,
                                         std::string label)
    : impl_(std::make_unique<Impl>()) {
  if (grid.periodic) throw ValidationError("convolution assembly expects a non-periodic grid");
  Impl& m = *impl_;
  m.grid = grid;
  m.s = kernel.spinor_dim;
  m.P = grid.points_per_axis;
  m.Q = 2 * m.P;
  m.span = 2 * m.P - 1;
  m.branch = branch;
  m.label = std::move(label);
  m.fft_len = 1;
  std::size_t offsets = 1;
  for (int k = 0; k < grid.n; ++k) {
    m.fft_len *= m.Q;
    offsets *= m.span;
  }
  const int s = m.s;
  const double h = grid.h();
  const double vol = grid.cell_volume();

  m.table.assign(offsets * s * s, cplx(0.0, 0.0));
  std::array<int, 3> delta{0, 0, 0};
  for (std::size_t t = 0; t < offsets; ++t) {
    std::size_t rem = t;
    bool origin = true;
    std::array<double, 3> disp{0.0, 0.0, 0.0};
    for (int k = 0; k < grid.n; ++k) {
      delta[k] = static_cast<int>(rem % m.span) - (m.P - 1);
      rem /= m.span;
      disp[k] = delta[k] * h;
      origin = origin && delta[k] == 0;
    }
    const CMatrix block =
        origin ? kernel.cell(h) : CMatrix(kernel.off_diagonal(std::span<const double>(disp.data(), grid.n)) * vol);
    const std::size_t idx = m.offset_index(delta);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) m.table[(idx * s + r) * s + c] = block(r, c);
  }

  m.plans = plans_for(grid.n, m.Q);
  m.scatter.resize(grid.num_points());
  for (Eigen::Index p = 0; p < grid.num_points(); ++p) {
    const auto mi = grid.multi_index(p);
    std::size_t idx = 0;
    for (int k = grid.n - 1; k >= 0; --k) idx = idx * m.Q + mi[k];
    m.scatter[p] = idx;
  }

  m.spectra.reserve(s * s);
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) {
      m.spectra.emplace_back(m.fft_len);
      FftBuffer& buf = m.spectra.back();
      buf.zero();
      for (std::size_t t = 0; t < offsets; ++t) {
        std::size_t rem = t, pos = 0, stride = 1;
        for (int k = 0; k < grid.n; ++k) {
          const int d = static_cast<int>(rem % m.span) - (m.P - 1);
          rem /= m.span;
          pos += static_cast<std::size_t>((d + m.Q) % m.Q) * stride;
          stride *= m.Q;
        }
        buf.data[pos] = m.table[(t * s + r) * s + c];
      }
      fftw_execute_dft(m.plans.forward, buf.raw(), buf.raw());
    }
  }
}

ConvolutionOperator::~ConvolutionOperator() = default;

Eigen::Index ConvolutionOperator::size() const { return impl_->grid.num_points() * impl_->s; }
void ConvolutionOperator::apply(const CVector& x, CVector& y) const { impl_->run(x, y, false); }
void ConvolutionOperator::apply_adjoint(const CVector& x, CVector& y) const { impl_->run(x, y, true); }
const Grid& ConvolutionOperator::grid() const { return impl_->grid; }
int ConvolutionOperator::spinor_dim() const { return impl_->s; }
Branch ConvolutionOperator::branch() const { return impl_->branch; }
const std::string& ConvolutionOperator::label() const { return impl_->label; }

CMatrix ConvolutionOperator::block(Eigen::Index p, Eigen::Index q) const {
  const Impl& m = *impl_;
  const auto a = m.grid.multi_index(p), b = m.grid.multi_index(q);
  std::array<int, 3> delta{0, 0, 0};
  for (int k = 0; k < m.grid.n; ++k) delta[k] = a[k] - b[k];
  const std::size_t idx = m.offset_index(delta);
  CMatrix out(m.s, m.s);
  for (int r = 0; r < m.s; ++r)
    for (int c = 0; c < m.s; ++c) out(r, c) = m.table[(idx * m.s + r) * m.s + c];
  return out;
}

CMatrix ConvolutionOperator::dense_block(const std::vector<Eigen::Index>& rows,
                                         const std::vector<Eigen::Index>& cols) const {
  const int s = impl_->s;
  check_dense_dimension(static_cast<Eigen::Index>(std::max(rows.size(), cols.size())) * s, label());
  CMatrix out(rows.size() * s, cols.size() * s);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out.block(i * s, j * s, s, s) = block(rows[i], cols[j]);
  return out;
}

KernelOperator ConvolutionOperator::to_kernel_operator() const {
  const Eigen::Index dim = size();
  check_dense_dimension(dim, label());
  std::vector<Eigen::Index> all(grid().num_points());
  for (Eigen::Index p = 0; p < grid().num_points(); ++p) all[p] = p;
  KernelOperator::RowMatrix mat = dense_block(all, all);
  return KernelOperator(grid(), spinor_dim(), std::move(mat), branch(), label());
}

KernelOperator assemble_operator(const MatrixKernel& kernel, const Grid& grid, Branch branch,
                                 const std::string& label) {
  check_dense_dimension(grid.num_points() * kernel.spinor_dim, label);
  const int s = kernel.spinor_dim;
  const Eigen::Index npts = grid.num_points();
  const double vol = grid.cell_volume();
  const CMatrix diag = kernel.cell(grid.h());
  KernelOperator::RowMatrix mat(npts * s, npts * s);
  for (Eigen::Index p = 0; p < npts; ++p) {
    const auto x = grid.point(p);
    for (Eigen::Index q = 0; q < npts; ++q) {
      if (p == q) {
        mat.block(p * s, q * s, s, s) = diag;
        continue;
      }
      const auto y = grid.point(q);
      std::array<double, 3> u{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
      mat.block(p * s, q * s, s, s) = kernel.off_diagonal(std::span<const double>(u.data(), grid.n)) * vol;
    }
  }
  return KernelOperator(grid, s, std::move(mat), branch, label);
}

std::shared_ptr<ConvolutionOperator> assemble_convolution(const MatrixKernel& kernel, const Grid& grid, Branch branch,
                                                          const std::string& label) {
  return std::make_shared<ConvolutionOperator>(grid, kernel, branch, label);
}

// ---------------------------------------------------------------------------
// MultiplicationOperator

MultiplicationOperator::MultiplicationOperator(Grid grid, int spinor_dim, std::vector<CMatrix> blocks)
    : grid_(grid), spinor_dim_(spinor_dim), blocks_(std::move(blocks)) {
  if (static_cast<Eigen::Index>(blocks_.size()) != grid_.num_points())
    throw ValidationError("multiplication operator needs one block per grid point");
}

void MultiplicationOperator::apply(const CVector& x, CVector& y) const {
  const int s = spinor_dim_;
  y.resize(size());
  for (Eigen::Index p = 0; p < grid_.num_points(); ++p) y.segment(p * s, s) = blocks_[p] * x.segment(p * s, s);
}

void MultiplicationOperator::apply_adjoint(const CVector& x, CVector& y) const {
  const int s = spinor_dim_;
  y.resize(size());
  for (Eigen::Index p = 0; p < grid_.num_points(); ++p)
    y.segment(p * s, s) = blocks_[p].adjoint() * x.segment(p * s, s);
}

std::vector<Eigen::Index> MultiplicationOperator::support() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index p = 0; p < grid_.num_points(); ++p)
    if (blocks_[p].cwiseAbs().maxCoeff() > 0.0) out.push_back(p);
  return out;
}

double MultiplicationOperator::sup_norm() const {
  double best = 0.0;
  for (const CMatrix& b : blocks_) {
    if (b.cwiseAbs().maxCoeff() == 0.0) continue;
    Eigen::JacobiSVD<CMatrix> svd(b);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

bool MultiplicationOperator::is_zero() const { return support().empty(); }

MultiplicationOperator MultiplicationOperator::scaled(double factor) const {
  std::vector<CMatrix> b = blocks_;
  for (CMatrix& m : b) m *= factor;
  return MultiplicationOperator(grid_, spinor_dim_, std::move(b));
}

CMatrix MultiplicationOperator::dense() const {
  check_dense_dimension(size(), "potential");
  CMatrix out = CMatrix::Zero(size(), size());
  const int s = spinor_dim_;
  for (Eigen::Index p = 0; p < grid_.num_points(); ++p) out.block(p * s, p * s, s, s) = blocks_[p];
  return out;
}

// ---------------------------------------------------------------------------
// Composites

WeightedOperator::WeightedOperator(OperatorPtr inner, RVector left, RVector right)
    : inner_(std::move(inner)), left_(std::move(left)), right_(std::move(right)) {
  if (left_.size() != inner_->size() || right_.size() != inner_->size())
    throw ValidationError("weight vectors must match the operator size");
}

void WeightedOperator::apply(const CVector& x, CVector& y) const {
  const auto& k = simd::active();
  CVector tmp = x;
  k.scale_real(tmp.data(), right_.data(), tmp.size());
  inner_->apply(tmp, y);
  k.scale_real(y.data(), left_.data(), y.size());
}

void WeightedOperator::apply_adjoint(const CVector& x, CVector& y) const {
  const auto& k = simd::active();
  CVector tmp = x;
  k.scale_real(tmp.data(), left_.data(), tmp.size());
  inner_->apply_adjoint(tmp, y);
  k.scale_real(y.data(), right_.data(), y.size());
}

ProductOperator::ProductOperator(std::vector<OperatorPtr> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw ValidationError("product of zero operators");
}

void ProductOperator::apply(const CVector& x, CVector& y) const {
  CVector cur = x, next;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    (*it)->apply(cur, next);
    cur.swap(next);
  }
  y = std::move(cur);
}

void ProductOperator::apply_adjoint(const CVector& x, CVector& y) const {
  CVector cur = x, next;
  for (const OperatorPtr& f : factors_) {
    f->apply_adjoint(cur, next);
    cur.swap(next);
  }
  y = std::move(cur);
}

LinearCombination::LinearCombination(Eigen::Index size, cplx identity_coeff,
                                     std::vector<std::pair<cplx, OperatorPtr>> terms)
    : size_(size), identity_coeff_(identity_coeff), terms_(std::move(terms)) {}

void LinearCombination::apply(const CVector& x, CVector& y) const {
  y = identity_coeff_ * x;
  CVector tmp;
  for (const auto& [c, op] : terms_) {
    op->apply(x, tmp);
    y += c * tmp;
  }
}

void LinearCombination::apply_adjoint(const CVector& x, CVector& y) const {
  y = std::conj(identity_coeff_) * x;
  CVector tmp;
  for (const auto& [c, op] : terms_) {
    op->apply_adjoint(x, tmp);
    y += std::conj(c) * tmp;
  }
}

OperatorPtr weighted(OperatorPtr inner, const RVector& left, const RVector& right) {
  return std::make_shared<WeightedOperator>(std::move(inner), left, right);
}

OperatorPtr product(std::vector<OperatorPtr> factors) { return std::make_shared<ProductOperator>(std::move(factors)); }

OperatorPtr difference(OperatorPtr a, OperatorPtr b) {
  const Eigen::Index n = a->size();
  return std::make_shared<LinearCombination>(
      n, cplx(0.0), std::vector<std::pair<cplx, OperatorPtr>>{{1.0, std::move(a)}, {-1.0, std::move(b)}});
}

}  // namespace diraclap
