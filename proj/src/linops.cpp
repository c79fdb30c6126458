#include "oplog/linops.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace oplog {

namespace {

bool all_finite(const OperatorMatrix::Dense& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

void require_same_dim(const OperatorMatrix& a, const OperatorMatrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << op << ": dimension mismatch " << a.dim() << " vs " << b.dim();
    throw Error(ErrorKind::InvalidInput, os.str());
  }
}

}  // namespace

OperatorMatrix::OperatorMatrix(Dense m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    std::ostringstream os;
    os << "operator matrix must be square and non-empty, got " << m_.rows() << "x" << m_.cols();
    throw Error(ErrorKind::InvalidInput, os.str());
  }
  if (!all_finite(m_)) throw Error(ErrorKind::InvalidInput, "operator matrix has non-finite entries");
}

OperatorMatrix OperatorMatrix::identity(Eigen::Index n) { return OperatorMatrix(Dense::Identity(n, n)); }

OperatorMatrix OperatorMatrix::zero(Eigen::Index n) { return OperatorMatrix(Dense::Zero(n, n)); }

OperatorMatrix OperatorMatrix::diagonal(std::span<const Complex> d) {
  Dense m = Dense::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return OperatorMatrix(std::move(m));
}

OperatorMatrix OperatorMatrix::scalar(Eigen::Index n, Complex c) {
  return OperatorMatrix(Dense::Identity(n, n) * c);
}

double OperatorMatrix::one_norm() const { return m_.cwiseAbs().colwise().sum().maxCoeff(); }

OperatorMatrix OperatorMatrix::shifted(Complex c) const {
  Dense m = m_;
  m.diagonal().array() += c;
  return OperatorMatrix(std::move(m));
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b, "operator+");
  return OperatorMatrix(a.m_ + b.m_);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b, "operator-");
  return OperatorMatrix(a.m_ - b.m_);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b, "operator*");
  return OperatorMatrix(a.m_ * b.m_);
}

OperatorMatrix operator*(Complex c, const OperatorMatrix& a) { return OperatorMatrix(c * a.m_); }

double relative_error(const OperatorMatrix& value, const OperatorMatrix& ref) {
  const double diff = (value.dense() - ref.dense()).norm();
  const double scale = ref.frobenius_norm();
  return scale > 0.0 ? diff / scale : diff;
}

double relative_discrepancy(const OperatorMatrix& a, const OperatorMatrix& b) {
  const double diff = (a.dense() - b.dense()).norm();
  const double scale = std::max(a.frobenius_norm(), b.frobenius_norm());
  return scale > 0.0 ? diff / scale : 0.0;
}

double lu_rcond(const Eigen::PartialPivLU<OperatorMatrix::Dense>& lu) {
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = pivots.maxCoeff();
  if (!(largest > 0.0)) return 0.0;
  return std::min(lu.rcond(), pivots.minCoeff() / largest);
}

SolveResult mat_solve(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b, "mat_solve");
  Eigen::PartialPivLU<OperatorMatrix::Dense> lu(a.dense());
  const auto& packed = lu.matrixLU();
  double min_pivot = std::abs(packed(0, 0));
  for (Eigen::Index i = 1; i < packed.rows(); ++i) min_pivot = std::min(min_pivot, std::abs(packed(i, i)));
  if (!(min_pivot >= kPivotFloor)) {
    std::ostringstream os;
    os << "pivot magnitude " << min_pivot << " below " << kPivotFloor;
    throw Error(ErrorKind::SingularMatrix, os.str());
  }
  const double rcond = lu_rcond(lu);
  OperatorMatrix::Dense x = lu.solve(b.dense());
  if (!all_finite(x)) throw Error(ErrorKind::SingularMatrix, "solution overflowed");
  return SolveResult{OperatorMatrix(std::move(x)), rcond, rcond * kConditionLimit < 1.0};
}

OperatorMatrix solve_strict(const OperatorMatrix& a, const OperatorMatrix& b, ErrorKind kind,
                            const char* what) {
  try {
    auto result = mat_solve(a, b);
    if (result.ill_conditioned) {
      std::ostringstream os;
      os << what << " is ill-conditioned (rcond " << result.rcond << ")";
      throw Error(kind, os.str());
    }
    return std::move(result.x);
  } catch (const Error& e) {
    if (e.kind() == kind) throw;
    throw Error(kind, std::string(what) + ": " + e.what());
  }
}

OperatorMatrix mat_exp(const OperatorMatrix& a) {
  OperatorMatrix::Dense e = a.dense().exp();
  if (!all_finite(e)) {
    std::ostringstream os;
    os << "exponential of a matrix with 1-norm " << a.one_norm() << " leaves the double range";
    throw Error(ErrorKind::Overflow, os.str());
  }
  return OperatorMatrix(std::move(e));
}

SpectralEnclosure gershgorin_enclosure(const OperatorMatrix& a) {
  const auto& m = a.dense();
  const Eigen::Index n = a.dim();
  const Eigen::ArrayXd abs_diag = m.diagonal().cwiseAbs().array();
  const Eigen::ArrayXd row_radius = m.cwiseAbs().rowwise().sum().array() - abs_diag;
  const Eigen::ArrayXd col_radius = m.cwiseAbs().colwise().sum().transpose().array() - abs_diag;

  const Complex center = m.diagonal().mean();
  double row_extent = 0.0;
  double col_extent = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double offset = std::abs(m(i, i) - center);
    row_extent = std::max(row_extent, offset + std::max(row_radius(i), 0.0));
    col_extent = std::max(col_extent, offset + std::max(col_radius(i), 0.0));
  }
  return SpectralEnclosure{center, std::min(row_extent, col_extent), {}};
}

SpectralEnclosure spectral_enclosure(const OperatorMatrix& a) {
  SpectralEnclosure enc = gershgorin_enclosure(a);
  if (a.dim() <= kEigenEstimateLimit) {
    Eigen::ComplexEigenSolver<OperatorMatrix::Dense> solver(a.dense(), /*computeEigenvectors=*/false);
    if (solver.info() == Eigen::Success) {
      const auto& ev = solver.eigenvalues();
      enc.eigen_estimates.assign(ev.data(), ev.data() + ev.size());
    }
  }
  return enc;
}

std::optional<SpectralEnclosure> tightened(const SpectralEnclosure& enc) {
  if (enc.eigen_estimates.empty()) return std::nullopt;
  double re_lo = enc.eigen_estimates.front().real(), re_hi = re_lo;
  double im_lo = enc.eigen_estimates.front().imag(), im_hi = im_lo;
  double scale = 0.0;
  for (const Complex& z : enc.eigen_estimates) {
    re_lo = std::min(re_lo, z.real());
    re_hi = std::max(re_hi, z.real());
    im_lo = std::min(im_lo, z.imag());
    im_hi = std::max(im_hi, z.imag());
    scale = std::max(scale, std::abs(z));
  }
  const Complex center(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi));
  double radius = 0.0;
  for (const Complex& z : enc.eigen_estimates) radius = std::max(radius, std::abs(z - center));
  // Estimates carry backward error ~ eps·‖A‖; pad accordingly.
  radius = radius * (1.0 + 1e-8) + 1e-10 * scale;
  if (radius >= enc.radius) return std::nullopt;
  return SpectralEnclosure{center, radius, enc.eigen_estimates};
}

double spectral_norm(const OperatorMatrix& a) {
  Eigen::BDCSVD<OperatorMatrix::Dense> svd(a.dense());
  return svd.singularValues()(0);
}

double singular_value_ratio(const OperatorMatrix& a) {
  Eigen::BDCSVD<OperatorMatrix::Dense> svd(a.dense());
  const auto& sv = svd.singularValues();
  const double largest = sv(0);
  if (largest == 0.0) return 0.0;
  return sv(sv.size() - 1) / largest;
}

bool numerically_invertible(const OperatorMatrix& a, double threshold) {
  return singular_value_ratio(a) >= threshold;
}

}  // namespace oplog
