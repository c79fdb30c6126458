#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oplog/applications.hpp"
#include "oplog/funcalc.hpp"
#include "oracles.hpp"

using namespace oplog;
using Dense = OperatorMatrix::Dense;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST(GridFunction, RejectsBadInput) {
  EXPECT_EQ(kind_of([] { GridFunction(1.0, Eigen::VectorXcd::Ones(1)); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { GridFunction(0.0, Eigen::VectorXcd::Ones(4)); }), ErrorKind::InvalidInput);
  Eigen::VectorXcd bad = Eigen::VectorXcd::Ones(4);
  bad(2) = Complex(std::nan(""), 0.0);
  EXPECT_EQ(kind_of([&] { GridFunction(1.0, bad); }), ErrorKind::InvalidInput);
}

TEST(SpectralDerivative, SineAndCosine) {
  const double L = 3.0;
  const auto f = GridFunction::sample(32, L, [&](double x) { return Complex(std::sin(3 * 2 * kPi * x / L)); });
  const double k = 3 * 2 * kPi / L;
  const auto fp = GridFunction::sample(32, L, [&](double x) { return Complex(k * std::cos(k * x)); });
  const auto fpp = GridFunction::sample(32, L, [&](double x) { return Complex(-k * k * std::sin(k * x)); });
  EXPECT_LT(max_abs_diff(spectral_derivative(f, 1), fp.values), 1e-12);
  EXPECT_LT(max_abs_diff(spectral_derivative(f, 2), fpp.values), 1e-10);
  EXPECT_EQ(kind_of([&] { spectral_derivative(f, 3); }), ErrorKind::InvalidInput);
}

TEST(HeatEvolve, ConstantIsSteady) {
  const auto one = GridFunction::sample(16, 1.0, [](double) { return Complex(1.0); });
  for (double t : {0.0, 0.5, 3.0}) EXPECT_LT(max_abs_diff(heat_evolve(one, 0.3, t).values, one.values), 1e-15);
}

TEST(HeatEvolve, SingleModeDecay) {
  const double L = 2.0, mu = 0.2, t = 0.7;
  const auto c = GridFunction::sample(32, L, [&](double x) { return Complex(std::cos(2 * kPi * x / L)); });
  const double decay = std::exp(-mu * std::pow(2 * kPi / L, 2) * t);
  EXPECT_LT(max_abs_diff(heat_evolve(c, mu, t).values, decay * c.values), 1e-14);
}

TEST(HeatEvolve, MatchesPerModeDecayOfFront) {
  const double L = 1.0, mu = 0.1, t = 0.05, x0 = 0.3;
  const auto phi0 = heat_front(64, L, x0);
  const auto expected = GridFunction::sample(64, L, [&](double x) {
    double v = 1.0;
    for (int m = 1; m <= 20; ++m) {
      const double k = 2 * kPi * m / L;
      v += std::pow(0.5, m) * std::exp(-mu * k * k * t) * std::cos(k * (x - x0));
    }
    return Complex(v);
  });
  EXPECT_LT(max_abs_diff(heat_evolve(phi0, mu, t).values, expected.values), 1e-14);
}

TEST(HeatEvolve, RejectsBadParameters) {
  const auto one = GridFunction::sample(8, 1.0, [](double) { return Complex(1.0); });
  EXPECT_EQ(kind_of([&] { heat_evolve(one, 0.0, 1.0); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([&] { heat_evolve(one, 1.0, -1.0); }), ErrorKind::InvalidInput);
}

TEST(ColeHopf, ConstantGivesZero) {
  const auto c = GridFunction::sample(16, 1.0, [](double) { return Complex(2.5); });
  for (auto conv : {ColeHopfConvention::Paper, ColeHopfConvention::Classical})
    EXPECT_LT(cole_hopf_transform(c, 0.4, conv).values.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ColeHopf, ChainRuleOracle) {
  const double L = 2.0, mu = 0.3;
  const double k = 2 * kPi / L;
  // g = 0.4 sin(kx) keeps e^{g} well resolved on 64 points.
  const auto phi = GridFunction::sample(64, L, [&](double x) { return Complex(std::exp(0.4 * std::sin(k * x))); });
  for (auto conv : {ColeHopfConvention::Paper, ColeHopfConvention::Classical}) {
    const double p = cole_hopf_exponent(conv);
    const auto expected =
        GridFunction::sample(64, L, [&](double x) { return Complex(-2 * std::pow(mu, p) * 0.4 * k * std::cos(k * x)); });
    EXPECT_LT(max_abs_diff(cole_hopf_transform(phi, mu, conv).values, expected.values), 1e-12);
  }
}

TEST(ColeHopf, IdentityResidual) {
  const double L = 1.0, mu = 0.25;
  const auto phi = GridFunction::sample(32, L, [&](double x) { return Complex(1.0 + 0.5 * std::cos(2 * kPi * x / L)); });
  for (auto conv : {ColeHopfConvention::Paper, ColeHopfConvention::Classical}) {
    const auto a = cole_hopf_transform(phi, mu, conv);
    EXPECT_LE(cole_hopf_identity_residual(phi, a, mu, conv), 1e-12);
  }
  const auto front = heat_evolve(heat_front(128, L, 0.5), 0.1, 0.3);
  for (auto conv : {ColeHopfConvention::Paper, ColeHopfConvention::Classical})
    EXPECT_LE(cole_hopf_identity_residual(front, cole_hopf_transform(front, 0.1, conv), 0.1, conv), 1e-11);
}

TEST(ColeHopf, ConventionsDifferBySqrtMu) {
  const double mu = 0.1;
  const auto phi = heat_front(128, 1.0, 0.2);
  const auto paper = cole_hopf_transform(phi, mu, ColeHopfConvention::Paper);
  const auto classical = cole_hopf_transform(phi, mu, ColeHopfConvention::Classical);
  EXPECT_LT(max_abs_diff(classical.values, std::sqrt(mu) * paper.values), 1e-13);
}

TEST(ColeHopf, VanishingDenominator) {
  const auto phi = GridFunction::sample(16, 1.0, [](double x) { return Complex(std::cos(2 * kPi * x)); });
  EXPECT_EQ(kind_of([&] { cole_hopf_transform(phi, 1.0, ColeHopfConvention::Classical); }),
            ErrorKind::VanishingDenominator);
}

TEST(Burgers, ZeroFieldHasZeroResidual) {
  auto zero = [](double) { return GridFunction(1.0, Eigen::VectorXcd::Zero(16)); };
  EXPECT_EQ(burgers_residual(zero, 0.1, 0.5), 0.0);
}

TEST(Burgers, ClassicalHeatFrontSolvesBurgers) {
  const auto phi0 = heat_front(128, 1.0, 0.5);
  for (double t : {0.0, 0.01, 0.1}) {
    const auto rep = cole_hopf_report(phi0, 0.1, t, ColeHopfConvention::Classical);
    EXPECT_LE(rep.burgers_residual, 1e-6) << "t = " << t;
    EXPECT_LE(rep.heat_residual, 1e-6) << "t = " << t;
    EXPECT_LE(rep.identity_residual, 1e-11) << "t = " << t;
  }
}

TEST(Burgers, HeatFieldIsNegativeControl) {
  const auto phi0 = heat_front(128, 1.0, 0.5);
  auto phi_of_t = [&](double t) { return heat_evolve(phi0, 0.1, t); };
  EXPECT_GE(burgers_residual(phi_of_t, 0.1, 0.1), 1e-1);
}

TEST(Burgers, PaperConventionIsNotABurgersSolution) {
  const auto rep = cole_hopf_report(heat_front(128, 1.0, 0.5), 0.1, 0.1, ColeHopfConvention::Paper);
  EXPECT_LE(rep.identity_residual, 1e-11);
  EXPECT_GE(rep.burgers_residual, 1e-3);
}

TEST(StripLog, IdentityChain) {
  const auto res = strip_double_log(OperatorMatrix::scalar(3, std::exp(1.0)));
  EXPECT_LT(oracle::rel(res.inner, Dense::Identity(3, 3)), 1e-12);
  EXPECT_LT(res.outer.dense().norm(), 1e-12);
  EXPECT_TRUE(res.round_trip_ok());
}

TEST(StripLog, DiagonalChain) {
  const auto res = strip_double_log(OperatorMatrix::diagonal(std::vector<Complex>{std::exp(2.0), std::exp(3.0)}));
  EXPECT_LT(oracle::rel(res.outer, OperatorMatrix::diagonal(std::vector<Complex>{std::log(2.0), std::log(3.0)}).dense()), 1e-12);
  EXPECT_FALSE(res.inner_split);
  EXPECT_FALSE(res.outer_split);
  EXPECT_TRUE(res.round_trip_ok());
}

TEST(StripLog, SkewGeneratorNeedsSplitContour) {
  std::mt19937_64 rng(11);
  const int n = 8;
  Dense g = oracle::random_matrix(rng, n, 1.0);
  Eigen::HouseholderQR<Dense> qr(g.real().cast<Complex>());
  const Dense q = qr.householderQ();
  Dense blocks = Dense::Zero(n, n);
  const double omegas[] = {0.3, 0.55, 0.8, 1.0};
  for (int b = 0; b < n / 2; ++b) {
    blocks(2 * b, 2 * b + 1) = omegas[b];
    blocks(2 * b + 1, 2 * b) = -omegas[b];
  }
  const Dense skew = q * blocks * q.adjoint();
  const auto res = strip_double_log(mat_exp(OperatorMatrix(skew)));
  EXPECT_LT(oracle::rel(res.inner, skew), 1e-10);
  EXPECT_TRUE(res.outer_split);
  EXPECT_LE(res.round_trip, 1e-9);
  EXPECT_LT(oracle::rel(res.outer, oracle::eigen_log(skew)), 1e-9);
}

TEST(StripLog, RoundTripOnRandomSectorial) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const Dense a = oracle::random_diagonalizable(rng, 6, Complex(20.0, 0.0), 3.0);
    const auto res = strip_double_log(OperatorMatrix(a));
    EXPECT_LE(res.round_trip, 1e-9);
  }
}
