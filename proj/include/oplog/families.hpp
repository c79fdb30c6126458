#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "oplog/linops.hpp"

namespace oplog {

/// Two-parameter evolution family (t, s) ↦ U(t, s) with U(t,r)U(r,s) = U(t,s).
///
/// `invertible` is the static (mathematical) flag; numerical invertibility at a
/// given (t, s) is certified separately by `invertible_at`.
struct EvolutionFamily {
  std::string name;
  Eigen::Index dim = 0;
  std::function<OperatorMatrix(double t, double s)> eval;
  std::function<OperatorMatrix(double t)> generator_oracle;  ///< empty when unknown
  bool commuting = true;
  bool invertible = true;
  std::pair<double, double> t_range{0.0, 1.0};

  OperatorMatrix operator()(double t, double s) const { return eval(t, s); }
  bool has_oracle() const { return static_cast<bool>(generator_oracle); }
  bool invertible_at(double t, double s) const;
};

/// Scalar rate function f with its closed-form antiderivative F.
struct RateProfile {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> antiderivative;
};

RateProfile rate_profile(const std::string& name);

EvolutionFamily family_constant(const OperatorMatrix& b, std::string name = "constant");
EvolutionFamily family_commuting_time_dependent(const OperatorMatrix& b, RateProfile rate,
                                                std::string name = "commuting");
EvolutionFamily family_identity(Eigen::Index n);

/// ∂_t u = c ∂_x u on n periodic points; B = c·D is skew with imaginary spectrum.
EvolutionFamily family_advection(int n, double c, double length);

/// ∂_t u = μ ∂_x² u on n periodic points; B = μ·D².
EvolutionFamily family_heat(int n, double mu, double length);

/// U from time-stepping ∂_t U = (B₀ + t·B₁) U with [B₀, B₁] ≠ 0 generically.
EvolutionFamily family_noncommuting(int n);
EvolutionFamily family_noncommuting(const OperatorMatrix& b0, const OperatorMatrix& b1,
                                    std::string name = "noncommuting");

/// Fourier-collocation first-derivative matrix on n (even) points of [0, L).
/// The Nyquist mode is annihilated, so the spectrum is {i·2πk/L : |k| < n/2} ∪ {0}.
OperatorMatrix spectral_differentiation_matrix(int n, double length);

/// Circulant operator with Fourier symbol σ(k), k ∈ {−n/2+1, …, n/2}.
/// `real_valued` drops the (round-off) imaginary part for Hermitian symbols.
OperatorMatrix circulant_from_symbol(int n, const std::function<Complex(int)>& symbol, bool real_valued);

/// Builds a family from "kind:key=value,…", e.g. "advection:n=16,c=1,L=6.283185307179586".
EvolutionFamily parse_family(const std::string& spec);

/// Named B presets understood by "constant:B=…" and "commuting:B=…".
OperatorMatrix matrix_preset(const std::string& preset, int n, unsigned seed, double scale);

struct CatalogueEntry {
  std::string kind;
  std::string example;
  std::string description;
};

std::vector<CatalogueEntry> family_catalogue();

struct FamilyInvariantReport {
  double semigroup_max = 0.0;  ///< max ‖U(t,r)U(r,s) − U(t,s)‖ / ‖U(t,s)‖
  double identity_max = 0.0;   ///< max ‖U(t,t) − I‖
  double inverse_max = 0.0;    ///< max ‖U(t,s)U(s,t) − I‖ (invertible families)
  int triples = 0;
};

/// Samples a grid × grid lattice of t_range.
FamilyInvariantReport check_family_invariants(const EvolutionFamily& family, int grid = 5);

}  // namespace oplog
