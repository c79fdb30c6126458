#include <gtest/gtest.h>

#include <random>

#include "oplog/funcalc.hpp"
#include "oracles.hpp"

using namespace oplog;
using Dense = OperatorMatrix::Dense;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidInput;
}

OperatorMatrix diag(std::initializer_list<Complex> d) {
  return OperatorMatrix::diagonal(std::span<const Complex>(d.begin(), d.size()));
}

}  // namespace

TEST(Contour, NodesOnCircleAndClosedPath) {
  const auto c = Contour::circle({2.0, 1.0}, 0.75, 64);
  Complex sum{};
  for (std::size_t k = 0; k < c.nodes().size(); ++k) {
    EXPECT_NEAR(std::abs(c.nodes()[k] - c.center()), 0.75, 1e-15);
    sum += c.weights()[k];
  }
  EXPECT_LT(std::abs(sum), 1e-14);
  EXPECT_THROW(Contour::circle(0.0, 1.0, 8), Error);
  EXPECT_THROW(Contour::circle(0.0, 1.0, 48), Error);
  EXPECT_THROW(Contour::circle(0.0, -1.0, 64), Error);
}

TEST(BuildLogContour, Examples) {
  const auto c = build_log_contour(SpectralEnclosure{2.0, 0.5, {}}, 0.2);
  EXPECT_EQ(c.center(), Complex(2.0));
  EXPECT_NEAR(c.radius(), 0.6, 1e-15);
  EXPECT_EQ(c.node_count(), 64);
  EXPECT_TRUE(disc_excludes_origin(c.center(), c.radius()));

  EXPECT_EQ(kind_of([] { build_log_contour(SpectralEnclosure{-1.0, 0.5, {}}, 0.2); }),
            ErrorKind::SpectrumHitsBranchCut);
  EXPECT_EQ(kind_of([] { build_log_contour(SpectralEnclosure{0.4, 0.5, {}}, 0.2); }), ErrorKind::OriginEnclosed);
  // Off-axis disc that dips below the negative real axis.
  EXPECT_EQ(kind_of([] { build_log_contour(SpectralEnclosure{{-1.0, 0.2}, 0.2, {}}, 0.2); }),
            ErrorKind::SpectrumHitsBranchCut);
  EXPECT_NO_THROW(build_log_contour(SpectralEnclosure{{-1.0, 0.5}, 0.2, {}}, 0.2));
}

TEST(ValidateContour, Examples) {
  const auto a = diag({1.0, 3.0});
  auto v = validate_contour(a, Contour::circle(2.0, 2.5));
  EXPECT_EQ(v.eigencount, 2);
  EXPECT_TRUE(v.encloses_spectrum);
  EXPECT_FALSE(v.excludes_origin);

  v = validate_contour(a, Contour::circle(2.0, 1.5));
  EXPECT_EQ(v.eigencount, 2);
  EXPECT_TRUE(v.excludes_origin);
  EXPECT_TRUE(v.avoids_branch_cut);
  // 1/‖R‖_F bounds σ_min(λ − A) from below within a factor √n.
  EXPECT_LE(v.min_resolvent_distance, 0.5 + 1e-12);
  EXPECT_GE(v.min_resolvent_distance, 0.5 / std::sqrt(2.0));

  v = validate_contour(diag({1.0, 5.0}), Contour::circle(1.0, 1.0));
  EXPECT_EQ(v.eigencount, 1);
  EXPECT_FALSE(v.encloses_spectrum);
  EXPECT_TRUE(v.integral());

  EXPECT_EQ(kind_of([&] { validate_contour(a, Contour::circle(2.0, 1.0, 64)); }), ErrorKind::ResolventBlowup);
}

TEST(DunfordIntegral, CauchyReproduction) {
  const auto a = diag({2.0, 3.0});
  const auto c = Contour::circle(2.5, 1.5);
  EXPECT_LT(oracle::rel(dunford_integral([](Complex) { return Complex(1.0); }, a, c), Dense::Identity(2, 2)),
            1e-12);
  EXPECT_LT(oracle::rel(dunford_integral([](Complex z) { return z; }, a, c), a.dense()), 1e-12);

  const OperatorMatrix b(Dense{{2.0, 1.0}, {0.0, 3.0}});
  const auto sq = dunford_integral([](Complex z) { return z * z; }, b, Contour::circle(2.5, 2.0));
  EXPECT_LT(oracle::rel(sq, b.dense() * b.dense()), 1e-10);

  EXPECT_EQ(kind_of([&] { dunford_integral([](Complex z) { return z; }, diag({1.0, 5.0}), Contour::circle(1.0, 1.0)); }),
            ErrorKind::InvalidContour);
}

TEST(DunfordIntegral, ReproductionOnRandomMatrices) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const OperatorMatrix a(oracle::random_matrix(rng, 6, 2.0));
    const auto enc = gershgorin_enclosure(a);
    const auto c = Contour::circle(enc.center, enc.radius * 1.5, 256);
    EXPECT_LT(oracle::rel(dunford_integral([](Complex) { return Complex(1.0); }, a, c), Dense::Identity(6, 6)),
              1e-11);
    EXPECT_LT(oracle::rel(dunford_integral([](Complex z) { return z; }, a, c), a.dense()), 1e-11);
  }
}

TEST(OpLog, Examples) {
  EXPECT_LT(op_log(OperatorMatrix::identity(3)).frobenius_norm(), 1e-14);
  const auto l = op_log(diag({2.0, 4.0}));
  EXPECT_LT(oracle::rel(l, diag({std::log(2.0), std::log(4.0)}).dense()), 1e-12);
  // log [[a, b], [0, a]] = [[ln a, b/a], [0, ln a]]
  const OperatorMatrix jordan(Dense{{0.5, 0.1}, {0.0, 0.5}});
  const Dense expected{{std::log(0.5), 0.2}, {0.0, std::log(0.5)}};
  EXPECT_LT(oracle::rel(op_log(jordan), expected), 1e-10);
}

TEST(OpLog, Failures) {
  EXPECT_EQ(kind_of([] { op_log(diag({-1.0, -2.0})); }), ErrorKind::SpectrumHitsBranchCut);
  EXPECT_EQ(kind_of([] { op_log(diag({0.0, 1.0})); }), ErrorKind::OriginEnclosed);
}

TEST(OpLog, NodeCapForcesNoConvergence) {
  setenv("OPLOG_NODE_CAP", "64", 1);
  const auto kind = kind_of([] { op_log(diag({1.0, 3.0})); });
  unsetenv("OPLOG_NODE_CAP");
  EXPECT_EQ(kind, ErrorKind::NoConvergence);
}

TEST(OpLog, MatchesEigenOracleAndRoundTrips) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 << (trial % 4);
    const Dense a = oracle::random_diagonalizable(rng, n, 3.0, 1.0);
    const auto l = op_log(OperatorMatrix(a));
    EXPECT_LT(oracle::rel(l, oracle::eigen_log(a)), 1e-10) << "n=" << n;
    EXPECT_LT(oracle::rel(mat_exp(l), a), 1e-9);
  }
}

TEST(OpLog, ScalarPullOut) {
  std::mt19937_64 rng(4);
  const Dense a = oracle::random_diagonalizable(rng, 4, 3.0, 1.0);
  for (double c : {0.5, 2.0, 7.0}) {
    const auto lhs = op_log(OperatorMatrix(c * a));
    const auto rhs = op_log(OperatorMatrix(a)).shifted(std::log(c));
    EXPECT_LT(relative_error(lhs, rhs), 1e-9);
  }
}

TEST(OpLog, GeometricQuadratureConvergence) {
  const auto a = diag({1.5, 2.0, 2.5, 3.2});
  const Dense ref = oracle::eigen_log(a.dense());
  const auto c = log_contour_for(a);
  double prev = 1.0;
  for (int nodes : {16, 32, 64}) {
    const auto rule = c.with_nodes(nodes);
    Dense val = Dense::Zero(4, 4);
    for (int k = 0; k < nodes; ++k) {
      const Complex z = rule.nodes()[k];
      const Dense shifted = z * Dense::Identity(4, 4) - a.dense();
      val += rule.weights()[k] * std::log(z) * shifted.inverse();
    }
    const double err = oracle::rel(val, ref);
    EXPECT_LT(err, 0.5 * prev) << nodes;
    prev = err;
  }
}

TEST(OpLogSplit, StripSpectrum) {
  const OperatorMatrix skew(Dense{{0.0, 2.0}, {-2.0, 0.0}});
  EXPECT_EQ(kind_of([&] { op_log(skew); }), ErrorKind::OriginEnclosed);
  const auto l = op_log_split(skew);
  EXPECT_LT(oracle::rel(l, oracle::eigen_log(skew.dense())), 1e-10);
  EXPECT_LT(oracle::rel(mat_exp(l), skew.dense()), 1e-10);
}

TEST(Richardson, Examples) {
  const OperatorMatrix m(Dense{{1.0, 2.0}, {3.0, 4.0}});
  auto d = richardson_derivative([&](double t) { return (t * t) * m; }, 1.0, default_step(1.0));
  EXPECT_LT(oracle::rel(d.value, (2.0 * m).dense()), 1e-13);

  const auto b = diag({1.0, -1.0});
  auto e = richardson_derivative([&](double t) { return mat_exp(t * b); }, 0.3, default_step(0.3));
  EXPECT_LT(oracle::rel(e.value, (b * mat_exp(0.3 * b)).dense()), 1e-10);

  auto z = richardson_derivative([&](double) { return m; }, 0.0, 1e-3);
  EXPECT_EQ(z.value.frobenius_norm(), 0.0);

  auto s = richardson_derivative([](double t) { return std::sin(t); }, 0.4, 1e-2);
  EXPECT_NEAR(s.value, std::cos(0.4), 1e-12);
}

TEST(Richardson, Failures) {
  EXPECT_EQ(kind_of([] { richardson_derivative([](double t) { return t; }, 0.0, 1e-11); }), ErrorKind::StepUnderflow);
  EXPECT_EQ(kind_of([] {
              richardson_derivative(
                  [](double t) {
                    if (t > 0.0) throw std::runtime_error("boom");
                    return t;
                  },
                  0.0, 1e-3);
            }),
            ErrorKind::EvaluationFailed);
}
