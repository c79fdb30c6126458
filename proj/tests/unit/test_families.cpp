#include <gtest/gtest.h>

#include <random>

#include "oplog/families.hpp"
#include "oracles.hpp"

using namespace oplog;
using Dense = OperatorMatrix::Dense;

namespace {

constexpr double kTwoPi = 6.283185307179586;

double two_norm(const OperatorMatrix& m) {
  Eigen::JacobiSVD<Dense> svd(m.dense());
  return svd.singularValues()(0);
}

}  // namespace

TEST(FamilyConstant, Examples) {
  const auto zero = family_constant(OperatorMatrix::zero(3));
  EXPECT_LT(oracle::rel(zero(0.7, 0.1), Dense::Identity(3, 3)), 1e-16);

  const Complex d[] = {1.0, -1.0};
  const auto fam = family_constant(OperatorMatrix::diagonal(d));
  const Complex expected[] = {2.0, 0.5};
  EXPECT_LT(oracle::rel(fam(std::log(2.0), 0.0), OperatorMatrix::diagonal(expected).dense()), 1e-14);
  EXPECT_TRUE(fam.has_oracle());
  EXPECT_TRUE(fam.commuting);

  std::mt19937_64 rng(9);
  const auto random = family_constant(OperatorMatrix(oracle::random_matrix(rng, 5)));
  const auto rep = check_family_invariants(random);
  EXPECT_LE(rep.semigroup_max, 1e-10);
  EXPECT_LE(rep.identity_max, 1e-12);
  EXPECT_LE(rep.inverse_max, 1e-9);
}

TEST(FamilyCommuting, OracleAndReduction) {
  const Complex d[] = {1.0, -0.5};
  const OperatorMatrix b = OperatorMatrix::diagonal(d);
  const auto fam = family_commuting_time_dependent(b, rate_profile("linear"));
  EXPECT_LT(oracle::rel(fam.generator_oracle(1.0), (2.0 * b).dense()), 1e-16);
  // U(t,s) = exp((t² − s²) B)
  EXPECT_LT(oracle::rel(fam(0.9, 0.2), mat_exp((0.81 - 0.04) * b).dense()), 1e-14);

  const auto unit = family_commuting_time_dependent(b, rate_profile("const"));
  const auto plain = family_constant(b);
  EXPECT_LT(oracle::rel(unit(0.8, 0.3), plain(0.8, 0.3).dense()), 1e-15);

  EXPECT_LE(check_family_invariants(fam).semigroup_max, 1e-10);
  EXPECT_LE(check_family_invariants(family_commuting_time_dependent(b, rate_profile("cosine"))).semigroup_max,
            1e-10);
}

TEST(SpectralDifferentiation, MatchesFourierSymbol) {
  for (int n : {8, 16, 32}) {
    const double length = 3.0;
    const auto d = spectral_differentiation_matrix(n, length);
    const auto symbol = circulant_from_symbol(
        n, [&](int k) { return 2 * k == n ? Complex(0.0) : Complex(0.0, kTwoPi * k / length); }, true);
    EXPECT_LT(oracle::rel(d, symbol.dense()), 1e-12) << n;
    // Skew-symmetric.
    EXPECT_LT((d.dense() + d.dense().transpose()).norm(), 1e-12 * d.frobenius_norm());
  }
}

TEST(FamilyAdvection, SpectrumAndUnitarity) {
  const int n = 16;
  const auto fam = family_advection(n, 1.0, kTwoPi);
  const Dense b = fam.generator_oracle(0.0).dense();
  Eigen::ComplexEigenSolver<Dense> es(b);
  std::vector<double> imag;
  for (int i = 0; i < n; ++i) {
    EXPECT_LT(std::abs(es.eigenvalues()(i).real()), 1e-10);
    imag.push_back(es.eigenvalues()(i).imag());
  }
  std::sort(imag.begin(), imag.end());
  // {k : |k| < n/2} plus the annihilated Nyquist mode at 0.
  std::vector<double> expected;
  for (int k = -n / 2 + 1; k < n / 2; ++k) expected.push_back(k);
  expected.push_back(0.0);
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < n; ++i) EXPECT_NEAR(imag[i], expected[i], 1e-9);

  const auto u = fam(1.3, 0.2);
  EXPECT_NEAR(two_norm(u), 1.0, 1e-10);
  std::mt19937_64 rng(1);
  const Eigen::VectorXcd x = oracle::random_matrix(rng, n).col(0);
  EXPECT_NEAR((u.dense() * x).norm(), x.norm(), 1e-9 * x.norm());

  // Exact circulant evolution agrees with the dense exponential of the generator.
  EXPECT_LT(oracle::rel(u, mat_exp(1.1 * OperatorMatrix(b)).dense()), 1e-11);
  const auto rep = check_family_invariants(fam);
  EXPECT_LE(rep.semigroup_max, 1e-10);
  EXPECT_LE(rep.identity_max, 1e-12);
  EXPECT_LE(rep.inverse_max, 1e-9);
}

TEST(FamilyAdvection, RefinementDoublesSpectralRadius) {
  double prev = 0.0;
  for (int n : {8, 16, 32, 64, 128}) {
    const Dense b = family_advection(n, 1.0, kTwoPi).generator_oracle(0.0).dense();
    Eigen::ComplexEigenSolver<Dense> es(b, false);
    const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_GE(radius, 2.0 * prev - 1e-6 * radius) << n;
    prev = radius;
  }
}

TEST(FamilyHeat, ConservationDecayAndInvertibility) {
  const auto fam = family_heat(16, 1.0, kTwoPi);
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(16);
  for (double tau : {0.01, 0.5, 2.0}) {
    const auto u = fam(tau, 0.0);
    EXPECT_LT((u.dense() * ones - ones).norm(), 1e-12);
    EXPECT_LE(two_norm(u), 1.0 + 1e-12);
  }
  EXPECT_LT(oracle::rel(fam(0.3, 0.0), mat_exp(0.3 * fam.generator_oracle(0.0)).dense()), 1e-11);
  EXPECT_TRUE(fam.invertible_at(0.01, 0.0));
  EXPECT_FALSE(fam.invertible_at(2.0, 0.0));
  EXPECT_LT(singular_value_ratio(fam(2.0, 0.0)), 1e-15);
  const auto rep = check_family_invariants(fam);
  EXPECT_LE(rep.semigroup_max, 1e-10);
  EXPECT_LE(rep.identity_max, 1e-12);
}

TEST(FamilyNoncommuting, SemigroupAndControl) {
  const auto fam = family_noncommuting(2);
  EXPECT_FALSE(fam.commuting);
  const auto rep = check_family_invariants(fam);
  EXPECT_LE(rep.semigroup_max, 1e-9);
  EXPECT_LE(rep.identity_max, 1e-12);
  EXPECT_LE(rep.inverse_max, 1e-9);

  // Step-halving oracle: ∂_t U(t,s) = A(t) U(t,s).
  const auto deriv = (fam(0.6 + 1e-4, 0.1) - fam(0.6 - 1e-4, 0.1)) * (0.5e4);
  const auto expected = fam.generator_oracle(0.6) * fam(0.6, 0.1);
  EXPECT_LT(relative_error(deriv, expected), 1e-6);

  // Commuting B₀, B₁ reduce to an exponential of the integrated generator.
  const Complex d0[] = {1.0, -2.0};
  const Complex d1[] = {0.5, 0.25};
  const auto b0 = OperatorMatrix::diagonal(d0);
  const auto b1 = OperatorMatrix::diagonal(d1);
  const auto degenerate = family_noncommuting(b0, b1);
  EXPECT_TRUE(degenerate.commuting);
  const double t = 0.9, s = 0.2;
  EXPECT_LT(relative_error(degenerate(t, s), mat_exp((t - s) * b0 + (0.5 * (t * t - s * s)) * b1)), 1e-9);
}

TEST(ParseFamily, RoundTripsAndErrors) {
  const auto adv = parse_family("advection:n=16,c=1,L=6.283185307179586");
  EXPECT_EQ(adv.dim, 16);
  EXPECT_EQ(adv.name, "advection:n=16,c=1,L=6.2831853071795862");
  EXPECT_EQ(parse_family("constant:B=diag(-50;1)").dim, 2);
  EXPECT_EQ(parse_family("constant:B=random,n=6,seed=3").dim, 6);
  EXPECT_EQ(parse_family("heat:n=8,mu=0.5").dim, 8);
  EXPECT_EQ(parse_family("identity:n=3").dim, 3);
  EXPECT_EQ(parse_family("scalar:rate=2").dim, 1);
  EXPECT_FALSE(parse_family("noncommuting:n=3").commuting);
  for (const char* bad : {"bogus", "advection:n=7", "advection:n=16,q=1", "constant:B=foo", "heat:mu=-1",
                          "advection:n=abc", "commuting:f=quartic"}) {
    try {
      parse_family(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidInput) << bad;
    }
  }
  for (const auto& entry : family_catalogue()) EXPECT_NO_THROW(parse_family(entry.example)) << entry.example;
}

TEST(Catalogue, AllFamiliesSatisfyInvariants) {
  for (const auto& entry : family_catalogue()) {
    const auto fam = parse_family(entry.example);
    const auto rep = check_family_invariants(fam);
    EXPECT_LE(rep.semigroup_max, fam.commuting ? 1e-10 : 1e-9) << entry.example;
    EXPECT_LE(rep.identity_max, 1e-12) << entry.example;
    if (fam.invertible) EXPECT_LE(rep.inverse_max, 1e-9) << entry.example;
  }
}
