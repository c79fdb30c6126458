#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "oplog/linops.hpp"

namespace oplog {

/// Samples of a function on n equispaced points x_j = jL/n of [0, L).
struct GridFunction {
  int n = 0;
  double length = 0.0;
  Eigen::VectorXcd values;

  GridFunction() = default;
  /// Throws InvalidInput on size mismatch, n < 2, L ≤ 0 or non-finite samples.
  GridFunction(double length, Eigen::VectorXcd values);

  static GridFunction sample(int n, double length, const std::function<Complex(double)>& f);
  double x(int j) const { return length * j / n; }
};

/// Spectral derivative of the given order (1 or 2). The Nyquist mode is
/// dropped for odd orders and kept with −κ² for the second derivative.
Eigen::VectorXcd spectral_derivative(const GridFunction& f, int order);

/// Exact periodic heat flow φ_t = μφ_xx, mode by mode in Fourier space.
GridFunction heat_evolve(const GridFunction& phi0, double mu, double t);

enum class ColeHopfConvention { Paper, Classical };

/// Exponent p in 𝒜 = −2μ^p φ_x/φ: 1/2 for Paper, 1 for Classical.
double cole_hopf_exponent(ColeHopfConvention c);

/// 𝒜 = −2μ^p·(∂_xφ)/φ. Throws VanishingDenominator when min|φ| ≤ 1e-10.
GridFunction cole_hopf_transform(const GridFunction& phi, double mu, ColeHopfConvention convention);

/// ‖∂_xφ + 𝒜·φ/(2μ^p)‖ / ‖∂_xφ‖ (absolute when ∂_xφ vanishes).
double cole_hopf_identity_residual(const GridFunction& phi, const GridFunction& transformed, double mu,
                                   ColeHopfConvention convention);

/// ‖u_t + u·u_x − μu_xx‖ / ‖u‖ with u_t from Richardson extrapolation in t.
double burgers_residual(const std::function<GridFunction(double)>& u_of_t, double mu, double t,
                        double h0 = 0.0);

/// ‖φ_t − μφ_xx‖ / ‖φ‖ for a heat trajectory.
double heat_residual(const std::function<GridFunction(double)>& phi_of_t, double mu, double t, double h0 = 0.0);

struct ColeHopfReport {
  double t = 0.0;
  double mu = 0.0;
  double identity_residual = 0.0;
  double burgers_residual = 0.0;
  double heat_residual = 0.0;
};

/// Heat-evolves φ₀ to t, transforms, and measures all three residuals. The
/// time step resolves the fastest decaying grid mode.
ColeHopfReport cole_hopf_report(const GridFunction& phi0, double mu, double t, ColeHopfConvention convention);

/// Positive band-limited front φ₀(x) = 1 + Σ_{m=1}^{terms} r^m cos(m·2π(x − x₀)/L).
GridFunction heat_front(int n, double length, double x0, int terms = 20, double ratio = 0.5);

struct StripLogResult {
  OperatorMatrix inner;  ///< 𝒜 = Log 𝒰
  OperatorMatrix outer;  ///< Log 𝒜
  bool inner_split = false;  ///< a union of circles was needed for Log 𝒰
  bool outer_split = false;  ///< a union of circles was needed for Log 𝒜
  double round_trip = 0.0;   ///< ‖e^{Log 𝒜} − 𝒜‖_F / ‖𝒜‖_F
  bool round_trip_ok() const { return round_trip <= 1e-9; }
};

/// Log(Log 𝒰). Each level uses one circle when the spectrum allows it and one
/// circle per spectral cluster otherwise (spectra straddling the branch cut).
StripLogResult strip_double_log(const OperatorMatrix& u);

}  // namespace oplog
