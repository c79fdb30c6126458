#include "oplog/applications.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "oplog/funcalc.hpp"

namespace oplog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDenominatorFloor = 1e-10;

/// Owns one FFTW plan pair for a transform length; estimate-mode planning
/// keeps results reproducible from run to run.
class Fft {
 public:
  explicit Fft(int n)
      : n_(n),
        buffer_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))),
        forward_(fftw_plan_dft_1d(n, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE)),
        backward_(fftw_plan_dft_1d(n, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE)) {}
  ~Fft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  Eigen::VectorXcd forward(const Eigen::VectorXcd& v) { return run(v, forward_, 1.0); }
  Eigen::VectorXcd backward(const Eigen::VectorXcd& v) { return run(v, backward_, 1.0 / n_); }

 private:
  Eigen::VectorXcd run(const Eigen::VectorXcd& v, fftw_plan plan, double scale) {
    for (int j = 0; j < n_; ++j) {
      buffer_[j][0] = v(j).real();
      buffer_[j][1] = v(j).imag();
    }
    fftw_execute(plan);
    Eigen::VectorXcd out(n_);
    for (int j = 0; j < n_; ++j) out(j) = Complex(buffer_[j][0], buffer_[j][1]) * scale;
    return out;
  }

  int n_;
  fftw_complex* buffer_;
  fftw_plan forward_;
  fftw_plan backward_;
};

/// Signed wavenumber index of FFT slot j.
int wavenumber(int j, int n) { return j <= n / 2 ? j : j - n; }

/// Applies σ(κ_j, is_nyquist) in Fourier space.
template <class Symbol>
Eigen::VectorXcd apply_symbol(const GridFunction& f, Symbol symbol) {
  Fft fft(f.n);
  Eigen::VectorXcd hat = fft.forward(f.values);
  for (int j = 0; j < f.n; ++j) {
    const int k = wavenumber(j, f.n);
    const bool nyquist = f.n % 2 == 0 && 2 * k == f.n;
    hat(j) *= symbol(kTwoPi * k / f.length, nyquist);
  }
  return fft.backward(hat);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidInput, std::string(what) + " must be positive");
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

GridFunction heat_flow(const GridFunction& phi0, double mu, double t) {
  return GridFunction(phi0.length,
                      apply_symbol(phi0, [&](double k, bool) { return Complex(std::exp(-mu * k * k * t)); }));
}

/// default_step(t), halved until the fastest grid mode decays by at most
/// 5% per step.
double heat_step(const GridFunction& phi0, double mu, double t) {
  const double kmax = kTwoPi * (phi0.n / 2) / phi0.length;
  const double limit = 0.05 / (mu * kmax * kmax);
  double h = default_step(t);
  while (h > limit) h *= 0.5;
  return h;
}

}  // namespace

GridFunction::GridFunction(double length_, Eigen::VectorXcd values_)
    : n(static_cast<int>(values_.size())), length(length_), values(std::move(values_)) {
  if (n < 2) throw Error(ErrorKind::InvalidInput, "grid function needs at least 2 samples");
  require_positive(length, "period L");
  for (int j = 0; j < n; ++j)
    if (!std::isfinite(values(j).real()) || !std::isfinite(values(j).imag()))
      throw Error(ErrorKind::InvalidInput, "grid function has non-finite samples");
}

GridFunction GridFunction::sample(int n, double length, const std::function<Complex(double)>& f) {
  if (n < 2) throw Error(ErrorKind::InvalidInput, "grid function needs at least 2 samples");
  Eigen::VectorXcd v(n);
  for (int j = 0; j < n; ++j) v(j) = f(length * j / n);
  return GridFunction(length, std::move(v));
}

Eigen::VectorXcd spectral_derivative(const GridFunction& f, int order) {
  if (order == 1)
    return apply_symbol(f, [](double k, bool nyquist) { return nyquist ? Complex(0.0) : Complex(0.0, k); });
  if (order == 2) return apply_symbol(f, [](double k, bool) { return Complex(-k * k); });
  throw Error(ErrorKind::InvalidInput, "spectral derivative order must be 1 or 2");
}

GridFunction heat_evolve(const GridFunction& phi0, double mu, double t) {
  require_positive(mu, "diffusivity");
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidInput, "heat_evolve needs t >= 0");
  return heat_flow(phi0, mu, t);
}

double cole_hopf_exponent(ColeHopfConvention c) { return c == ColeHopfConvention::Paper ? 0.5 : 1.0; }

GridFunction cole_hopf_transform(const GridFunction& phi, double mu, ColeHopfConvention convention) {
  require_positive(mu, "diffusivity");
  const double smallest = phi.values.cwiseAbs().minCoeff();
  if (!(smallest > kDenominatorFloor)) {
    std::ostringstream os;
    os << "min |phi| = " << smallest << " is not above " << kDenominatorFloor;
    throw Error(ErrorKind::VanishingDenominator, os.str());
  }
  const double factor = -2.0 * std::pow(mu, cole_hopf_exponent(convention));
  const Eigen::VectorXcd dphi = spectral_derivative(phi, 1);
  return GridFunction(phi.length, (factor * dphi.array() / phi.values.array()).matrix());
}

double cole_hopf_identity_residual(const GridFunction& phi, const GridFunction& transformed, double mu,
                                   ColeHopfConvention convention) {
  const Eigen::VectorXcd dphi = spectral_derivative(phi, 1);
  const double half = 0.5 / std::pow(mu, cole_hopf_exponent(convention));
  const Eigen::VectorXcd r = dphi + half * transformed.values.cwiseProduct(phi.values);
  return safe_ratio(r.norm(), dphi.norm());
}

double burgers_residual(const std::function<GridFunction(double)>& u_of_t, double mu, double t, double h0) {
  const GridFunction u = u_of_t(t);
  const auto ut =
      richardson_derivative([&](double x) { return u_of_t(x).values; }, t, h0 > 0.0 ? h0 : default_step(t));
  const Eigen::VectorXcd r =
      ut.value + u.values.cwiseProduct(spectral_derivative(u, 1)) - mu * spectral_derivative(u, 2);
  return safe_ratio(r.norm(), u.values.norm());
}

double heat_residual(const std::function<GridFunction(double)>& phi_of_t, double mu, double t, double h0) {
  const GridFunction phi = phi_of_t(t);
  const auto pt =
      richardson_derivative([&](double x) { return phi_of_t(x).values; }, t, h0 > 0.0 ? h0 : default_step(t));
  const Eigen::VectorXcd r = pt.value - mu * spectral_derivative(phi, 2);
  return safe_ratio(r.norm(), phi.values.norm());
}

ColeHopfReport cole_hopf_report(const GridFunction& phi0, double mu, double t, ColeHopfConvention convention) {
  require_positive(mu, "diffusivity");
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidInput, "Cole-Hopf report needs t >= 0");
  ColeHopfReport rep;
  rep.t = t;
  rep.mu = mu;
  // The difference stencil may reach below t = 0; the backward flow is exact
  // there too for band-limited data.
  auto phi_of_t = [&](double x) { return heat_flow(phi0, mu, x); };
  auto u_of_t = [&](double x) { return cole_hopf_transform(phi_of_t(x), mu, convention); };
  const GridFunction phi = phi_of_t(t);
  const double h0 = heat_step(phi0, mu, t);
  rep.identity_residual = cole_hopf_identity_residual(phi, cole_hopf_transform(phi, mu, convention), mu, convention);
  rep.heat_residual = heat_residual(phi_of_t, mu, t, h0);
  rep.burgers_residual = burgers_residual(u_of_t, mu, t, h0);
  return rep;
}

GridFunction heat_front(int n, double length, double x0, int terms, double ratio) {
  return GridFunction::sample(n, length, [&](double x) {
    double v = 1.0;
    double amp = 1.0;
    for (int m = 1; m <= terms; ++m) {
      amp *= ratio;
      v += amp * std::cos(m * kTwoPi * (x - x0) / length);
    }
    return Complex(v);
  });
}

namespace {

bool needs_split(const Error& e) {
  return e.kind() == ErrorKind::OriginEnclosed || e.kind() == ErrorKind::SpectrumHitsBranchCut;
}

OperatorMatrix log_either(const OperatorMatrix& m, bool& split) {
  try {
    split = false;
    return op_log(m);
  } catch (const Error& e) {
    if (!needs_split(e)) throw;
  }
  split = true;
  return op_log_split(m);
}

}  // namespace

StripLogResult strip_double_log(const OperatorMatrix& u) {
  bool inner_split = false;
  bool outer_split = false;
  OperatorMatrix inner = log_either(u, inner_split);
  OperatorMatrix outer = log_either(inner, outer_split);
  const double round_trip = relative_error(mat_exp(outer), inner);
  return StripLogResult{std::move(inner), std::move(outer), inner_split, outer_split, round_trip};
}

}  // namespace oplog
