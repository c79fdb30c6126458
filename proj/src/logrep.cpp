#include "oplog/logrep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace oplog {

namespace {

using Dense = OperatorMatrix::Dense;

constexpr int kJitterAttempts = 8;
constexpr double kJitter = 1.37;
constexpr double kCollapseTolerance = 1e-14;

std::string describe(Complex z) {
  std::ostringstream os;
  os.precision(6);
  if (z.imag() == 0.0) {
    os << z.real();
  } else {
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  }
  return os.str();
}

bool is_contour_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::SpectrumHitsBranchCut:
    case ErrorKind::OriginEnclosed:
    case ErrorKind::InvalidContour:
    case ErrorKind::NoConvergence:
    case ErrorKind::ResolventBlowup:
      return true;
    default:
      return false;
  }
}

/// A log contour exists for m: the Gershgorin disc clears the cut, or the
/// disc fitted to eigen estimates does and the argument principle agrees.
bool log_admissible(const OperatorMatrix& m) {
  try {
    build_log_contour(gershgorin_enclosure(m));
    return true;
  } catch (const Error&) {
  }
  try {
    const auto tight = tightened(spectral_enclosure(m));
    if (!tight) return false;
    const Contour c = build_log_contour(*tight);
    return validate_contour(m, c.with_nodes(256)).encloses_spectrum;
  } catch (const Error&) {
    return false;
  }
}

/// I_η + νI has cancelled to round-off, as for U = I under ν = η/(1−η).
bool cancelled(const OperatorMatrix& translated, const OperatorMatrix& i_eta, Complex nu) {
  const double scale = i_eta.frobenius_norm() + std::abs(nu) * std::sqrt(static_cast<double>(i_eta.dim()));
  return translated.frobenius_norm() <= 1e-8 * scale;
}

double cut_distance(Complex c) { return c.real() > 0.0 ? std::abs(c) : std::abs(c.imag()); }

void require_collapse(const ShiftParams& p) {
  const Complex expected = nu_from_eta(p.eta);
  if (std::abs(p.nu - expected) > kCollapseTolerance * std::max(1.0, std::abs(expected))) {
    throw Error(ErrorKind::NuMismatch,
                "nu = " + describe(p.nu) + " but eta/(1-eta) = " + describe(expected));
  }
}

/// Stencil {t, t±h0, t±h0/2, t±h0/4}: U, I_η and the two logs at every point,
/// computed once and shared by all representations.
class Stencil {
 public:
  Stencil(const EvolutionFamily& family, double t, double s, const ShiftParams& p, double h0)
      : t_(t), h0_(h0), p_(p) {
    if (!(h0 >= kMinStep)) throw Error(ErrorKind::StepUnderflow, "stencil step below 1e-10");
    taus_ = {t, t + h0, t - h0, t + 0.5 * h0, t - 0.5 * h0, t + 0.25 * h0, t - 0.25 * h0};
    for (double tau : taus_) {
      us_.push_back(family(tau, s));
      ietas_.push_back(resolvent_approx(us_.back(), p.eta));
    }
  }

  double h0() const { return h0_; }
  const OperatorMatrix& u() const { return us_.front(); }
  const OperatorMatrix& i_eta() const { return ietas_.front(); }

  /// Log[I_η + νI] at τ = t + offset-index
  const OperatorMatrix& log2(std::size_t i = 0) { return logs2().at(i); }
  const OperatorMatrix& log1(std::size_t i = 0) { return logs1().at(i); }

  OperatorMatrix a2() { return log2(0); }
  OperatorMatrix a1() { return log1(0).shifted(principal_log(p_.eta)); }

  const OperatorMatrix& d2() {
    if (!d2_) d2_ = differentiate(logs2());
    return *d2_;
  }
  const OperatorMatrix& d1() {
    if (!d1_) d1_ = differentiate(logs1());
    return *d1_;
  }

 private:
  const std::vector<OperatorMatrix>& logs2() {
    if (!logs2_) {
      logs2_ = batch_logs("a2", [&](const OperatorMatrix& ie) {
        OperatorMatrix m = a2_argument(ie, p_.nu);
        if (cancelled(m, ie, p_.nu))
          throw Error(ErrorKind::ContourInvalid, "I_eta + nu I cancels to round-off (1 is an eigenvalue of U)");
        return m;
      });
    }
    return *logs2_;
  }

  const std::vector<OperatorMatrix>& logs1() {
    if (!logs1_) {
      const Complex shift = (p_.nu - p_.eta) / p_.eta;
      if (std::abs(shift - p_.nu) <= kCollapseTolerance * std::max(1.0, std::abs(p_.nu))) {
        logs1_ = logs2();
      } else {
        logs1_ = batch_logs("a1", [&](const OperatorMatrix& ie) { return a1_argument(ie, p_.eta, p_.nu); });
      }
    }
    return *logs1_;
  }

  template <class Build>
  std::vector<OperatorMatrix> batch_logs(const char* label, Build build) {
    std::vector<OperatorMatrix> mats;
    mats.reserve(ietas_.size());
    for (const auto& ie : ietas_) mats.push_back(build(ie));
    try {
      return op_log_batch(mats, shared_log_contour(mats));
    } catch (const Error& e) {
      if (!is_contour_kind(e.kind())) throw;
      throw Error(ErrorKind::ContourInvalid, std::string(label) + " over the derivative stencil: " + e.what());
    }
  }

  OperatorMatrix differentiate(const std::vector<OperatorMatrix>& values) const {
    auto lookup = [&](double x) -> OperatorMatrix {
      for (std::size_t i = 1; i < taus_.size(); ++i)
        if (taus_[i] == x) return values[i];
      throw Error(ErrorKind::EvaluationFailed, "point outside the precomputed stencil");
    };
    return richardson_derivative(lookup, t_, h0_).value;
  }

  double t_;
  double h0_;
  ShiftParams p_;
  std::vector<double> taus_;
  std::vector<OperatorMatrix> us_;
  std::vector<OperatorMatrix> ietas_;
  std::optional<std::vector<OperatorMatrix>> logs1_;
  std::optional<std::vector<OperatorMatrix>> logs2_;
  std::optional<OperatorMatrix> d1_;
  std::optional<OperatorMatrix> d2_;
};

void require_invertible(const Stencil& st) {
  if (!numerically_invertible(st.u())) {
    std::ostringstream os;
    os << "U(t,s) is numerically singular (sigma_min/sigma_max = " << singular_value_ratio(st.u()) << ")";
    throw Error(ErrorKind::NotInvertible, os.str());
  }
}

OperatorMatrix lemma1_on(Stencil& st, const ShiftParams& p) {
  require_invertible(st);
  const Eigen::Index n = st.u().dim();
  const OperatorMatrix gap = st.i_eta() - OperatorMatrix::identity(n);
  const OperatorMatrix& d1 = st.d1();
  const OperatorMatrix& d2 = st.d2();
  const OperatorMatrix first =
      d1 + (p.nu / p.eta) * solve_strict(gap, d1, ErrorKind::SingularResolventGap, "I_eta - I");
  // I_η⁻¹ = I − η⁻¹U exactly.
  const OperatorMatrix i_eta_inv = OperatorMatrix::identity(n) - (1.0 / p.eta) * st.u();
  const OperatorMatrix second = d2 + p.nu * (i_eta_inv * d2);
  return first - second;
}

OperatorMatrix corollary1_on(Stencil& st, const ShiftParams& p) {
  require_collapse(p);
  require_invertible(st);
  const OperatorMatrix& ie = st.i_eta();
  const OperatorMatrix collapse = ie * ie - ie;
  return solve_strict(collapse, ie.shifted(p.nu) * st.d2(), ErrorKind::SingularCollapse, "I_eta^2 - I_eta");
}

OperatorMatrix theorem1_on(Stencil& st, const ShiftParams& p) {
  const OperatorMatrix e1 = mat_exp(st.a1());
  const OperatorMatrix e2 = mat_exp(st.a2());
  // (I − νe^{−a})⁻¹ = (e^{a} − νI)⁻¹ e^{a}
  const OperatorMatrix p1 = solve_strict(e1.shifted(-p.nu), e1, ErrorKind::SingularPrefactor, "e^{a1} - nu I");
  const OperatorMatrix p2 = solve_strict(e2.shifted(-p.nu), e2, ErrorKind::SingularPrefactor, "e^{a2} - nu I");
  return p1 * st.d1() - p2 * st.d2();
}

OperatorMatrix corollary2_on(Stencil& st, const ShiftParams& p) {
  require_collapse(p);
  const OperatorMatrix a = st.a2();
  const OperatorMatrix e = mat_exp(a);
  const OperatorMatrix e_inv = mat_exp(-a);
  const OperatorMatrix combination = e.shifted(-(2.0 * p.nu + 1.0)) + (p.nu * p.nu + p.nu) * e_inv;
  return solve_strict(combination, st.d2(), ErrorKind::SingularCombination,
                      "e^a - (2nu+1)I + (nu^2+nu)e^{-a}");
}

OperatorMatrix dispatch(Representation r, Stencil& st, const ShiftParams& p) {
  switch (r) {
    case Representation::Lemma1:
      return lemma1_on(st, p);
    case Representation::Corollary1:
      return corollary1_on(st, p);
    case Representation::Theorem1:
      return theorem1_on(st, p);
    case Representation::Corollary2:
      return corollary2_on(st, p);
  }
  throw Error(ErrorKind::InvalidInput, "unknown representation");
}

double resolve_step(const EvolutionFamily& family, double t, double s, const GeneratorOptions& opts) {
  return opts.h0 > 0.0 ? opts.h0 : generator_step(family, t, s);
}

LogAttempt attempt_log(const OperatorMatrix& m) {
  LogAttempt a;
  try {
    a.value = op_log(m);
    a.message = "ok";
  } catch (const Error& e) {
    a.error = e.kind();
    a.message = e.what();
  }
  return a;
}

}  // namespace

OperatorMatrix resolvent_approx(const OperatorMatrix& u, Complex eta) {
  if (eta == Complex(0.0)) throw Error(ErrorKind::InvalidInput, "eta must be nonzero");
  const Eigen::Index n = u.dim();
  const OperatorMatrix gap = OperatorMatrix::identity(n) - (1.0 / eta) * u;
  return solve_strict(gap, OperatorMatrix::identity(n), ErrorKind::EtaInSpectrum,
                      ("I - U/eta at eta = " + describe(eta)).c_str());
}

double resolvent_identity_residual(const OperatorMatrix& u, Complex eta, const OperatorMatrix& i_eta) {
  const OperatorMatrix lhs = i_eta.shifted(-1.0);
  const OperatorMatrix rhs = (1.0 / eta) * (u * i_eta);
  return (lhs - rhs).frobenius_norm() / i_eta.frobenius_norm();
}

Complex select_eta(const OperatorMatrix& u) {
  const SpectralEnclosure enc = gershgorin_enclosure(u);
  double eta = 2.0 * (enc.radius + std::abs(enc.center)) + 1.0;
  for (int attempt = 0; attempt <= kJitterAttempts; ++attempt) {
    try {
      resolvent_approx(u, eta);
      return eta;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EtaInSpectrum) throw;
    }
    eta *= kJitter;
  }
  throw Error(ErrorKind::NoEtaFound, "no eta in the resolvent set after jitter");
}

Complex select_eta(const EvolutionFamily& family, double t, double s) { return select_eta(family(t, s)); }

Complex nu_from_eta(Complex eta) {
  if (eta == Complex(1.0)) throw Error(ErrorKind::EtaEqualsOne, "nu = eta/(1-eta) is undefined at eta = 1");
  return eta / (1.0 - eta);
}

OperatorMatrix a1_argument(const OperatorMatrix& i_eta, Complex eta, Complex nu) {
  return i_eta.shifted((nu - eta) / eta);
}

OperatorMatrix a2_argument(const OperatorMatrix& i_eta, Complex nu) { return i_eta.shifted(nu); }

ShiftParams certify_params(const OperatorMatrix& u, Complex eta, Complex nu) {
  ShiftParams p{eta, nu};
  std::optional<OperatorMatrix> ie;
  try {
    ie = resolvent_approx(u, eta);
  } catch (const Error&) {
    return p;
  }
  p.eta_in_resolvent_set = true;
  p.nu_valid_for_a1 = log_admissible(a1_argument(*ie, eta, nu));
  p.nu_valid_for_a2 = log_admissible(a2_argument(*ie, nu));
  return p;
}

Complex select_nu(const OperatorMatrix& u, Complex eta) {
  const OperatorMatrix ie = resolvent_approx(u, eta);
  const SpectralEnclosure gap = gershgorin_enclosure(u * ie);
  const SpectralEnclosure res = gershgorin_enclosure(ie);
  const double worst = std::max(gap.radius + std::abs(gap.center), res.radius + std::abs(res.center));
  double nu = 2.0 * worst + 1.0;
  for (int attempt = 0; attempt <= kJitterAttempts; ++attempt) {
    const ShiftParams p = certify_params(u, eta, nu);
    if (p.nu_valid_for_a1 && p.nu_valid_for_a2) return nu;
    nu *= kJitter;
  }
  throw Error(ErrorKind::NoNuFound, "no translation nu validates both shifted logs");
}

ShiftParams select_params(const EvolutionFamily& family, double t, double s) {
  const OperatorMatrix u = family(t, s);
  const Complex eta = select_eta(u);
  return certify_params(u, eta, select_nu(u, eta));
}

ShiftParams select_params_for_grid(const EvolutionFamily& family,
                                   std::span<const std::pair<double, double>> grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidInput, "empty (t, s) grid");
  std::vector<OperatorMatrix> us;
  for (const auto& [t, s] : grid) us.push_back(family(t, s));
  double eta = 0.0;
  for (const auto& u : us) eta = std::max(eta, select_eta(u).real());
  double nu = 0.0;
  for (const auto& u : us) nu = std::max(nu, select_nu(u, eta).real());
  for (int attempt = 0; attempt <= kJitterAttempts; ++attempt) {
    bool all = true;
    ShiftParams p;
    for (const auto& u : us) {
      p = certify_params(u, eta, nu);
      if (!p.certified()) {
        all = false;
        break;
      }
    }
    if (all) return p;
    nu *= kJitter;
  }
  throw Error(ErrorKind::NoNuFound, "no translation nu is certified on the whole grid");
}

ShiftParams select_collapse_params(const EvolutionFamily& family, double t, double s) {
  const double h0 = generator_step(family, t, s);
  const double taus[] = {t, t + h0, t - h0, t + 0.5 * h0, t - 0.5 * h0, t + 0.25 * h0, t - 0.25 * h0};
  std::vector<OperatorMatrix> us;
  for (double tau : taus) us.push_back(family(tau, s));

  std::vector<Complex> candidates;
  for (double r : {-16.0, -8.0, -4.0, -2.0, -1.0, -0.5, -0.25, -0.1}) candidates.emplace_back(r);
  for (int k = 1; k <= 19; ++k) candidates.emplace_back(0.05 * k);
  for (double r : {1.5, 2.0, 3.0, 4.0, 8.0, 16.0}) candidates.emplace_back(r);
  double rho = 0.0;
  for (const auto& u : us) {
    const auto enc = gershgorin_enclosure(u);
    rho = std::max(rho, enc.radius + std::abs(enc.center));
  }
  candidates.emplace_back(2.0 * rho + 1.0);
  candidates.emplace_back(4.0 * rho + 1.0);
  for (double r : {0.5, 1.0, 2.0, 4.0})
    for (double theta : {0.25, 0.5, 0.75, -0.25, -0.5, -0.75})
      candidates.push_back(std::polar(r, theta * std::numbers::pi));

  double best_score = std::numeric_limits<double>::infinity();
  std::optional<Complex> best;
  for (const Complex eta : candidates) {
    if (eta == Complex(1.0)) continue;
    try {
      const Complex nu = nu_from_eta(eta);
      std::vector<OperatorMatrix> mats;
      bool degenerate = false;
      for (const auto& u : us) {
        const OperatorMatrix ie = resolvent_approx(u, eta);
        mats.push_back(a2_argument(ie, nu));
        degenerate = degenerate || cancelled(mats.back(), ie, nu);
      }
      if (degenerate) continue;
      const Contour c = shared_log_contour(mats);
      const OperatorMatrix ie = mats.front().shifted(-nu);
      const auto collapse = mat_solve(ie * ie - ie, OperatorMatrix::identity(ie.dim()));
      if (collapse.rcond < 1e-10) continue;
      const double score = c.radius() / cut_distance(c.center());
      if (score < best_score) {
        best_score = score;
        best = eta;
      }
    } catch (const Error&) {
    }
  }
  if (!best) {
    throw Error(ErrorKind::NoEtaFound,
                "no eta makes I_eta + eta/(1-eta) I loggable over the stencil (is 1 an eigenvalue of U?)");
  }
  return certify_params(us.front(), *best, nu_from_eta(*best));
}

A1Result alt_generator_a1(const OperatorMatrix& u, const ShiftParams& p) {
  const OperatorMatrix ie = resolvent_approx(u, p.eta);
  A1Result r{OperatorMatrix::zero(u.dim()), std::nullopt, {}};
  try {
    r.shifted = op_log(a1_argument(ie, p.eta, p.nu)).shifted(principal_log(p.eta));
  } catch (const Error& e) {
    if (!is_contour_kind(e.kind())) throw;
    throw Error(ErrorKind::ContourInvalid, std::string("a1: ") + e.what());
  }
  const OperatorMatrix gap = p.eta * ie.shifted(-1.0);
  if (!numerically_invertible(gap)) {
    r.direct_status = std::string(to_string(ErrorKind::DirectLogUnavailable)) + ": eta(I_eta - I) is singular";
    return r;
  }
  try {
    r.direct = op_log(gap);
    r.direct_status = "ok";
  } catch (const Error& e) {
    r.direct_status = std::string(to_string(ErrorKind::DirectLogUnavailable)) + ": " + e.what();
  }
  return r;
}

A2Result alt_generator_a2(const OperatorMatrix& u, const ShiftParams& p) {
  const OperatorMatrix ie = resolvent_approx(u, p.eta);
  A2Result r{OperatorMatrix::zero(u.dim())};
  try {
    r.value = op_log(a2_argument(ie, p.nu));
  } catch (const Error& e) {
    if (!is_contour_kind(e.kind())) throw;
    throw Error(ErrorKind::ContourInvalid, std::string("a2: ") + e.what());
  }
  r.exp_norm = spectral_norm(mat_exp(r.value));
  r.bound = spectral_norm(ie) + std::abs(p.nu);
  return r;
}

std::string to_string(Representation r) {
  switch (r) {
    case Representation::Lemma1:
      return "lemma1";
    case Representation::Corollary1:
      return "corollary1";
    case Representation::Theorem1:
      return "theorem1";
    case Representation::Corollary2:
      return "corollary2";
  }
  return "unknown";
}

double generator_step(const EvolutionFamily& family, double t, double s) {
  double h0 = default_step(t);
  const double delta = 1e-6 * std::max(1.0, std::abs(t));
  const OperatorMatrix u = family(t, s);
  const double rate =
      (family(t + delta, s) - family(t - delta, s)).frobenius_norm() / (2.0 * delta * u.frobenius_norm());
  if (rate * h0 > 0.05) h0 = std::exp2(std::floor(std::log2(0.05 / rate)));
  return h0;
}

OperatorMatrix generator(Representation r, const EvolutionFamily& family, double t, double s,
                         const ShiftParams& p, const GeneratorOptions& opts) {
  Stencil st(family, t, s, p, resolve_step(family, t, s, opts));
  return dispatch(r, st, p);
}

OperatorMatrix generator_lemma1(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                const GeneratorOptions& opts) {
  return generator(Representation::Lemma1, family, t, s, p, opts);
}

OperatorMatrix generator_corollary1(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                    const GeneratorOptions& opts) {
  require_collapse(p);
  return generator(Representation::Corollary1, family, t, s, p, opts);
}

OperatorMatrix generator_theorem1(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                  const GeneratorOptions& opts) {
  return generator(Representation::Theorem1, family, t, s, p, opts);
}

OperatorMatrix generator_corollary2(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                    const GeneratorOptions& opts) {
  require_collapse(p);
  return generator(Representation::Corollary2, family, t, s, p, opts);
}

const std::optional<OperatorMatrix>& GeneratorReport::value(Representation r) const {
  static const std::optional<OperatorMatrix> none;
  const auto it = outcomes.find(r);
  return it == outcomes.end() ? none : it->second.value;
}

GeneratorReport generator_report(const EvolutionFamily& family, double t, double s, const ShiftParams& p,
                                 std::span<const Representation> which, const GeneratorOptions& opts) {
  GeneratorReport report;
  report.t = t;
  report.s = s;
  report.params = p;
  report.h0 = resolve_step(family, t, s, opts);
  if (family.has_oracle()) report.oracle = family.generator_oracle(t);

  std::optional<Stencil> st;
  std::optional<Error> setup_error;
  try {
    st.emplace(family, t, s, p, report.h0);
  } catch (const Error& e) {
    setup_error = e;
  }
  for (Representation r : which) {
    RepresentationOutcome out;
    try {
      if (setup_error) throw *setup_error;
      out.value = dispatch(r, *st, p);
      out.message = "ok";
    } catch (const Error& e) {
      out.error = e.kind();
      out.message = e.what();
    }
    report.outcomes[r] = std::move(out);
  }

  for (auto i = report.outcomes.begin(); i != report.outcomes.end(); ++i) {
    if (!i->second.value) continue;
    if (report.oracle) report.oracle_errors[i->first] = relative_error(*i->second.value, *report.oracle);
    for (auto j = std::next(i); j != report.outcomes.end(); ++j) {
      if (!j->second.value) continue;
      report.pairwise_discrepancies[{i->first, j->first}] =
          relative_discrepancy(*i->second.value, *j->second.value);
    }
  }
  return report;
}

FormalLogRecord formal_log_decomposition(const OperatorMatrix& u, Complex eta) {
  FormalLogRecord rec;
  rec.eta = eta;
  rec.log_u = attempt_log(u);
  std::optional<OperatorMatrix> ie;
  try {
    ie = resolvent_approx(u, eta);
  } catch (const Error& e) {
    rec.resolvent_error = e.kind();
    rec.log_u_ieta.error = e.kind();
    rec.log_u_ieta.message = e.what();
    rec.log_ieta = rec.log_u_ieta;
    return rec;
  }
  rec.log_u_ieta = attempt_log(u * *ie);
  rec.log_ieta = attempt_log(*ie);
  if (rec.log_u_ieta.value && rec.log_ieta.value && rec.log_u.value) {
    rec.discrepancy = relative_error(*rec.log_u_ieta.value - *rec.log_ieta.value, *rec.log_u.value);
  }
  return rec;
}

PropertyReport algebraic_property_report(const EvolutionFamily& family,
                                         std::span<const std::pair<double, double>> grid, const ShiftParams& p,
                                         const GeneratorOptions& opts) {
  PropertyReport report;
  report.commuting_flag = family.commuting;
  for (const auto& [t, s] : grid) {
    const double h0 = resolve_step(family, t, s, opts);
    Stencil st(family, t, s, p, h0);
    PropertyPoint pt;
    pt.t = t;
    pt.s = s;
    const OperatorMatrix a1 = st.a1();
    const OperatorMatrix a2 = st.a2();
    const OperatorMatrix e1_inv = mat_exp(-a1);
    const OperatorMatrix e2_inv = mat_exp(-a2);
    const Eigen::Index n = a1.dim();
    pt.bound_a1 = spectral_norm(OperatorMatrix::identity(n) + p.nu * e1_inv);
    pt.bound_a2 = spectral_norm(OperatorMatrix::identity(n) + p.nu * e2_inv);

    // Stencil index 1 is t + h0.
    pt.continuity_t = std::max((st.log1(1) - st.log1(0)).frobenius_norm(),
                               (st.log2(1) - st.log2(0)).frobenius_norm()) / h0;
    const OperatorMatrix ie_s = resolvent_approx(family(t, s + h0), p.eta);
    const OperatorMatrix l1_s = op_log(a1_argument(ie_s, p.eta, p.nu));
    const OperatorMatrix l2_s = op_log(a2_argument(ie_s, p.nu));
    pt.continuity_s =
        std::max((l1_s - st.log1(0)).frobenius_norm(), (l2_s - st.log2(0)).frobenius_norm()) / h0;

    auto commutator = [](const OperatorMatrix& e, const OperatorMatrix& d) {
      const double scale = e.frobenius_norm() * d.frobenius_norm();
      if (scale == 0.0) return 0.0;
      return (e * d - d * e).frobenius_norm() / scale;
    };
    pt.commutator_a1 = commutator(e1_inv, st.d1());
    pt.commutator_a2 = commutator(e2_inv, st.d2());

    report.max_bound = std::max({report.max_bound, pt.bound_a1, pt.bound_a2});
    report.max_continuity = std::max({report.max_continuity, pt.continuity_t, pt.continuity_s});
    report.max_commutator = std::max({report.max_commutator, pt.commutator_a1, pt.commutator_a2});
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace oplog
