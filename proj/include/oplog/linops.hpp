#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "oplog/error.hpp"

namespace oplog {

using Complex = std::complex<double>;

/// Dense complex square matrix standing in for a closed operator on a
/// finite-dimensional truncation. Always square, non-empty and finite.
class OperatorMatrix {
 public:
  using Dense = Eigen::MatrixXcd;

  /// Throws InvalidInput when `m` is empty, non-square, or has NaN/Inf entries.
  explicit OperatorMatrix(Dense m);

  static OperatorMatrix identity(Eigen::Index n);
  static OperatorMatrix zero(Eigen::Index n);
  static OperatorMatrix diagonal(std::span<const Complex> d);
  static OperatorMatrix scalar(Eigen::Index n, Complex c);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Dense& dense() const noexcept { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  double frobenius_norm() const { return m_.norm(); }
  double one_norm() const;

  OperatorMatrix adjoint() const { return OperatorMatrix(m_.adjoint()); }

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(Complex c, const OperatorMatrix& a);
  friend OperatorMatrix operator*(const OperatorMatrix& a, Complex c) { return c * a; }
  friend OperatorMatrix operator*(double c, const OperatorMatrix& a) { return Complex(c) * a; }
  friend OperatorMatrix operator*(const OperatorMatrix& a, double c) { return Complex(c) * a; }
  friend OperatorMatrix operator-(const OperatorMatrix& a) { return Complex(-1.0) * a; }

  /// a + c·I
  OperatorMatrix shifted(Complex c) const;

 private:
  Dense m_;
};

/// ‖a − b‖_F / ‖ref‖_F, falling back to the absolute difference when ref is zero.
double relative_error(const OperatorMatrix& value, const OperatorMatrix& ref);

/// Symmetric discrepancy ‖a − b‖_F / max(‖a‖_F, ‖b‖_F); zero when both vanish.
double relative_discrepancy(const OperatorMatrix& a, const OperatorMatrix& b);

/// Disc that contains every eigenvalue (Gershgorin), plus non-certified
/// eigenvalue estimates when the matrix is small enough.
struct SpectralEnclosure {
  Complex center;
  double radius = 0.0;
  std::vector<Complex> eigen_estimates;
};

struct SolveResult {
  OperatorMatrix x;
  double rcond = 0.0;         ///< reciprocal 1-norm condition estimate of A
  bool ill_conditioned = false;  ///< rcond below 1 / kConditionLimit
};

inline constexpr double kConditionLimit = 1e14;

/// Reciprocal condition estimate of a factorised matrix: the smaller of
/// Eigen's 1-norm estimate and min|u_ii| / max|u_ii|. The pivot ratio catches
/// exactly singular factors, for which the 1-norm estimator reports 1.
double lu_rcond(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu);
inline constexpr double kPivotFloor = 1e-300;

/// Solves A·X = B by partial-pivoted LU. Throws SingularMatrix on a vanishing
/// pivot; an ill-conditioned (but nonsingular) system is flagged, not thrown.
SolveResult mat_solve(const OperatorMatrix& a, const OperatorMatrix& b);

/// Convenience: mat_solve that throws `kind` when the system is singular or
/// flagged ill-conditioned.
OperatorMatrix solve_strict(const OperatorMatrix& a, const OperatorMatrix& b, ErrorKind kind,
                            const char* what);

/// e^A by Padé scaling and squaring. Throws Overflow when the result leaves
/// the double range.
OperatorMatrix mat_exp(const OperatorMatrix& a);

/// Gershgorin disc (rows and columns, whichever is tighter) with eigen
/// estimates for n ≤ kEigenEstimateLimit.
SpectralEnclosure spectral_enclosure(const OperatorMatrix& a);

/// Gershgorin disc only.
SpectralEnclosure gershgorin_enclosure(const OperatorMatrix& a);

inline constexpr Eigen::Index kEigenEstimateLimit = 128;

/// Disc fitted to the eigen estimates. Non-certified: callers must confirm
/// with an argument-principle count before trusting it.
std::optional<SpectralEnclosure> tightened(const SpectralEnclosure& enc);

/// Numeric invertibility certificate: σ_min ≥ 1e-12·σ_max.
bool numerically_invertible(const OperatorMatrix& a, double threshold = 1e-12);

/// σ_min / σ_max.
double singular_value_ratio(const OperatorMatrix& a);

/// Largest singular value.
double spectral_norm(const OperatorMatrix& a);

}  // namespace oplog
