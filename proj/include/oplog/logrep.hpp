#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oplog/families.hpp"
#include "oplog/funcalc.hpp"
#include "oplog/linops.hpp"

namespace oplog {

/// Resolvent parameter η and translation ν, with the certificates obtained
/// at the (t, s) where they were checked.
struct ShiftParams {
  Complex eta;
  Complex nu;
  bool eta_in_resolvent_set = false;
  bool nu_valid_for_a1 = false;
  bool nu_valid_for_a2 = false;

  bool certified() const { return eta_in_resolvent_set && nu_valid_for_a1 && nu_valid_for_a2; }
};

/// I_η = (I − η⁻¹U)⁻¹. Throws EtaInSpectrum when ηI − U is singular or
/// ill-conditioned, InvalidInput for η = 0.
OperatorMatrix resolvent_approx(const OperatorMatrix& u, Complex eta);

/// ‖(I_η − I) − η⁻¹·U·I_η‖_F / ‖I_η‖_F
double resolvent_identity_residual(const OperatorMatrix& u, Complex eta, const OperatorMatrix& i_eta);

/// Real η = 2(r + |c|) + 1 from the Gershgorin disc (c, r) of U, multiplied
/// by 1.37 (up to 8 times) while ηI − U stays singular. Throws NoEtaFound.
Complex select_eta(const OperatorMatrix& u);
Complex select_eta(const EvolutionFamily& family, double t, double s);

/// ν = η/(1 − η); throws EtaEqualsOne.
Complex nu_from_eta(Complex eta);

/// Real ν = 2(r + |c|) + 1 from the worse of the discs of η(I_η − I) and I_η,
/// jittered until both translated operators admit log contours. Throws NoNuFound.
Complex select_nu(const OperatorMatrix& u, Complex eta);

/// Checks η and ν at one U without throwing.
ShiftParams certify_params(const OperatorMatrix& u, Complex eta, Complex nu);

/// select_eta and select_nu at (t, s), certified.
ShiftParams select_params(const EvolutionFamily& family, double t, double s);

/// η (and ν = η/(1 − η)) for the collapsed representations. Searches a fixed
/// candidate list for the η whose translated operators I_η + νI admit the
/// tightest shared log contour over the derivative stencil around t.
/// Throws NoEtaFound when no candidate works (for instance when 1 ∈ spec U).
ShiftParams select_collapse_params(const EvolutionFamily& family, double t, double s);

/// I_η + ((ν − η)/η)·I, the operator whose log carries a₁.
OperatorMatrix a1_argument(const OperatorMatrix& i_eta, Complex eta, Complex nu);
/// I_η + ν·I
OperatorMatrix a2_argument(const OperatorMatrix& i_eta, Complex nu);

struct A1Result {
  /// Log(η)·I + Log[I_η + ((ν − η)/η)I], a logarithm of ηI_η + (ν − η)I.
  OperatorMatrix shifted;
  /// Log[η(I_η − I)] when that operator admits its own contour.
  std::optional<OperatorMatrix> direct;
  std::string direct_status;  ///< "ok" or the reason the direct log is unavailable
};

A1Result alt_generator_a1(const OperatorMatrix& u, const ShiftParams& p);

struct A2Result {
  OperatorMatrix value;  ///< Log[I_η + νI]
  double exp_norm = 0.0;  ///< ‖e^{a₂}‖₂
  double bound = 0.0;     ///< ‖I_η‖₂ + |ν|
  bool bound_holds() const { return exp_norm <= bound + 1e-9; }
};

A2Result alt_generator_a2(const OperatorMatrix& u, const ShiftParams& p);

// ---------------------------------------------------------------------------
// Generator representations.

enum class Representation { Lemma1, Corollary1, Theorem1, Corollary2 };

inline constexpr Representation kAllRepresentations[] = {Representation::Lemma1, Representation::Corollary1,
                                                         Representation::Theorem1, Representation::Corollary2};

std::string to_string(Representation r);

struct GeneratorOptions {
  /// Base step of the Richardson stencil; 0 selects it from the family.
  double h0 = 0.0;
};

/// Base step for ∂_t at (t, s): default_step(t), reduced to 0.05/ω when the
/// family oscillates or decays at rate ω ≈ ‖∂_t U‖ / ‖U‖.
double generator_step(const EvolutionFamily& family, double t, double s);

/// A = (I + νη⁻¹(I_η − I)⁻¹)·∂_t Log[I_η + ((ν−η)/η)I] − (I + νI_η⁻¹)·∂_t Log[I_η + νI].
/// Throws NotInvertible, SingularResolventGap, EtaInSpectrum, contour errors.
OperatorMatrix generator_lemma1(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                const GeneratorOptions& opts = {});

/// A = (I_η² − I_η)⁻¹(I_η + νI)·∂_t Log[I_η + νI] with ν = η/(1 − η).
/// Throws NuMismatch, NotInvertible, SingularCollapse.
OperatorMatrix generator_corollary1(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                    const GeneratorOptions& opts = {});

/// A = (I − νe^{−a₁})⁻¹·∂_t a₁ − (I − νe^{−a₂})⁻¹·∂_t a₂, i.e. prefactors
/// I + ν(e^{aᵢ} − νI)⁻¹. Throws SingularPrefactor when e^{a₁} − νI = U·I_η
/// is numerically singular.
OperatorMatrix generator_theorem1(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                  const GeneratorOptions& opts = {});

/// A = (e^{a} − (2ν+1)I + (ν²+ν)e^{−a})⁻¹·∂_t a with a = a₂ and ν = η/(1 − η).
/// Throws NuMismatch, SingularCombination.
OperatorMatrix generator_corollary2(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                    const GeneratorOptions& opts = {});

OperatorMatrix generator(Representation r, const EvolutionFamily& family, double t, double s,
                         const ShiftParams& p, const GeneratorOptions& opts = {});

struct RepresentationOutcome {
  std::optional<OperatorMatrix> value;
  std::optional<ErrorKind> error;
  std::string message;
};

struct GeneratorReport {
  double t = 0.0;
  double s = 0.0;
  double h0 = 0.0;
  ShiftParams params;
  std::map<Representation, RepresentationOutcome> outcomes;
  std::optional<OperatorMatrix> oracle;
  std::map<std::pair<Representation, Representation>, double> pairwise_discrepancies;
  std::map<Representation, double> oracle_errors;

  const std::optional<OperatorMatrix>& value(Representation r) const;
};

/// Evaluates the requested representations on one shared stencil; failures
/// are recorded per representation instead of thrown.
GeneratorReport generator_report(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                 std::span<const Representation> which = kAllRepresentations,
                                 const GeneratorOptions& opts = {});

// ---------------------------------------------------------------------------
// Diagnostics.

struct LogAttempt {
  std::optional<OperatorMatrix> value;
  std::optional<ErrorKind> error;
  std::string message;
};

struct FormalLogRecord {
  Complex eta;
  LogAttempt log_u_ieta;  ///< Log[U·I_η]
  LogAttempt log_ieta;    ///< Log[I_η]
  LogAttempt log_u;       ///< Log[U]
  /// ‖(Log[U I_η] − Log[I_η]) − Log U‖_F / ‖Log U‖_F when all three exist.
  std::optional<double> discrepancy;
  std::optional<ErrorKind> resolvent_error;  ///< set when I_η itself does not exist
};

/// Log U := Log[U·I_η] − Log[I_η] attempted without any translation.
FormalLogRecord formal_log_decomposition(const OperatorMatrix& u, Complex eta);

struct PropertyPoint {
  double t = 0.0;
  double s = 0.0;
  double bound_a1 = 0.0;        ///< ‖I + νe^{−a₁}‖₂
  double bound_a2 = 0.0;        ///< ‖I + νe^{−a₂}‖₂
  double continuity_t = 0.0;    ///< max_i ‖aᵢ(t+δ,s) − aᵢ(t,s)‖ / δ
  double continuity_s = 0.0;    ///< max_i ‖aᵢ(t,s+δ) − aᵢ(t,s)‖ / δ
  double commutator_a1 = 0.0;   ///< ‖[e^{−a₁}, ∂_t a₁]‖ / (‖e^{−a₁}‖‖∂_t a₁‖)
  double commutator_a2 = 0.0;
};

struct PropertyReport {
  std::vector<PropertyPoint> points;
  double max_bound = 0.0;
  double max_continuity = 0.0;
  double max_commutator = 0.0;
  bool commuting_flag = true;  ///< family's declared flag
  /// Commutator threshold separating commuting behaviour from the control.
  static constexpr double kCommutingTolerance = 1e-8;
  static constexpr double kNoncommutingFlag = 1e-3;
  bool flagged_noncommuting() const { return max_commutator >= kNoncommutingFlag; }
};

/// The three B(X)-module checks (boundedness, continuity, commutation) over a
/// grid of (t, s). Commutators are normalised by ‖e^{−aᵢ}‖·‖∂_t aᵢ‖.
PropertyReport algebraic_property_report(const EvolutionFamily& family,
                                         std::span<const std::pair<double, double>> grid, const ShiftParams& p,
                                         const GeneratorOptions& opts = {});

/// η and ν that are certified at every grid point.
ShiftParams select_params_for_grid(const EvolutionFamily& family, std::span<const std::pair<double, double>> grid);

}  // namespace oplog
