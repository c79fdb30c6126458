#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "oplog/linops.hpp"

namespace oplog {

/// Circle in the complex plane discretised by the trapezoidal rule.
///
/// Nodes are λ_k = center + radius·e^{2πik/N}; the weights fold the 1/2πi of
/// the Cauchy integral in, so ∮ g(λ) dλ / 2πi ≈ Σ_k w_k g(λ_k) with
/// w_k = (λ_k − center)/N. Node sets nest under doubling, which lets adaptive
/// integration reuse every resolvent already computed.
class Contour {
 public:
  /// Throws InvalidInput unless radius > 0 and node_count is a power of two ≥ 16.
  static Contour circle(Complex center, double radius, int node_count = kInitialNodes);

  Complex center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  int node_count() const noexcept { return node_count_; }
  const std::vector<Complex>& nodes() const noexcept { return nodes_; }
  const std::vector<Complex>& weights() const noexcept { return weights_; }

  Contour with_nodes(int node_count) const { return circle(center_, radius_, node_count); }

  static constexpr int kInitialNodes = 64;
  static constexpr int kMinNodes = 16;

 private:
  Contour(Complex center, double radius, int node_count);

  Complex center_;
  double radius_;
  int node_count_;
  std::vector<Complex> nodes_;
  std::vector<Complex> weights_;
};

struct ContourValidity {
  bool encloses_spectrum = false;
  bool excludes_origin = false;
  bool avoids_branch_cut = false;
  int eigencount = 0;
  Complex raw_eigencount;  ///< unrounded argument-principle integral
  double min_resolvent_distance = 0.0;

  /// |raw − round(raw)| < 1e-6 and negligible imaginary part.
  bool integral() const;
};

using ScalarFunction = std::function<Complex(Complex)>;

inline constexpr double kDefaultMargin = 0.2;
inline constexpr double kLogTolerance = 1e-12;
inline constexpr int kDefaultNodeCap = 4096;

/// Node budget for adaptive integration; OPLOG_NODE_CAP overrides the default.
int node_cap();

/// Principal logarithm, branch cut on (−∞, 0].
Complex principal_log(Complex z);

/// Throws OriginEnclosed when |center| ≤ radius, SpectrumHitsBranchCut when
/// the closed disc meets (−∞, 0].
void require_log_geometry(Complex center, double radius);

bool disc_excludes_origin(Complex center, double radius);
bool disc_avoids_branch_cut(Complex center, double radius);

/// Circle of radius enc.radius·(1+margin) about enc.center, 64 nodes.
Contour build_log_contour(const SpectralEnclosure& enc, double margin = kDefaultMargin);

/// Argument-principle check starting at c's node count and doubling until
/// the raw count changes by less than 1e-9 (or the node cap is reached).
ContourValidity validate_contour(const OperatorMatrix& a, const Contour& c);

/// Σ_k w_k f(λ_k)(λ_k I − A)⁻¹. Throws InvalidContour unless the argument
/// principle counts all n eigenvalues inside c.
OperatorMatrix dunford_integral(const ScalarFunction& f, const OperatorMatrix& a, const Contour& c);

struct LogResult {
  OperatorMatrix value;
  Contour contour;     ///< final (refined) contour
  double last_change;  ///< relative change at the last doubling
};

/// Log contour for a single matrix: the Gershgorin disc first, the disc fitted
/// to eigen estimates when Gershgorin meets the branch cut or the origin.
Contour log_contour_for(const OperatorMatrix& a, double margin = kDefaultMargin);

/// One contour shared by several matrices (e.g. the points of a difference
/// stencil), so quadrature error varies smoothly between them.
Contour shared_log_contour(std::span<const OperatorMatrix> mats, double margin = kDefaultMargin);

/// Principal log on a given circle, doubling nodes until successive results
/// differ by < 1e-12 relative (floor 1 in Frobenius norm) or the cap is hit.
LogResult op_log_on(const OperatorMatrix& a, const Contour& start);

/// Logs of several matrices on one circle with a common node count, doubled
/// until every member has converged. Differences of the results then carry a
/// quadrature error that varies smoothly from member to member.
std::vector<OperatorMatrix> op_log_batch(std::span<const OperatorMatrix> mats, const Contour& start);

/// Principal logarithm through the Riesz–Dunford integral.
OperatorMatrix op_log(const OperatorMatrix& a);
LogResult op_log_detailed(const OperatorMatrix& a);

/// Principal logarithm over a union of circles, one per spectral cluster in
/// the open upper half-plane, lower half-plane and positive real axis. Used
/// for strip-type spectra that straddle the branch cut.
OperatorMatrix op_log_split(const OperatorMatrix& a, double margin = kDefaultMargin);

// ---------------------------------------------------------------------------
// Richardson-extrapolated central differences.

inline double norm_of(const OperatorMatrix& m) { return m.frobenius_norm(); }
inline double norm_of(double x) { return std::abs(x); }
template <class Derived>
double norm_of(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

template <class T>
struct Derivative {
  T value;
  double error_estimate;
};

/// h0 default: 1e-3 scaled by max(1, |t|), rounded down to a power of two so
/// that t ± h0/4 are exact whenever t is a short dyadic number.
inline double default_step(double t) {
  return std::exp2(std::floor(std::log2(1e-3 * std::max(1.0, std::abs(t)))));
}

inline constexpr double kMinStep = 1e-10;

/// Central differences at h0, h0/2, h0/4 combined by two Richardson levels
/// (h² and h⁴ terms removed). The error estimate is the norm of the last
/// correction.
template <class Fn>
auto richardson_derivative(Fn&& g, double t, double h0)
    -> Derivative<std::decay_t<std::invoke_result_t<Fn&, double>>> {
  using T = std::decay_t<std::invoke_result_t<Fn&, double>>;
  if (!(h0 >= kMinStep))
    throw Error(ErrorKind::StepUnderflow, "step " + std::to_string(h0) + " below 1e-10");

  auto eval = [&](double x) -> T {
    try {
      return g(x);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::EvaluationFailed,
                  "evaluation at t=" + std::to_string(x) + " failed: " + e.what());
    }
  };
  auto central = [&](double h) -> T {
    T plus = eval(t + h);
    T minus = eval(t - h);
    return T((plus - minus) * (0.5 / h));
  };

  const T d1 = central(h0);
  const T d2 = central(0.5 * h0);
  const T d4 = central(0.25 * h0);
  const T r1 = T((d2 * 4.0 - d1) * (1.0 / 3.0));
  const T r2 = T((d4 * 4.0 - d2) * (1.0 / 3.0));
  T value = T((r2 * 16.0 - r1) * (1.0 / 15.0));
  const double err = norm_of(T(value - r2));
  return {std::move(value), err};
}

}  // namespace oplog
