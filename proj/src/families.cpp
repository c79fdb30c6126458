#include "oplog/families.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace oplog {

namespace {

using Dense = OperatorMatrix::Dense;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Classical RK4 step for Y' = A(τ) Y.
Dense rk4_step(const std::function<Dense(double)>& gen, const Dense& y, double tau, double h) {
  const Dense a0 = gen(tau);
  const Dense ah = gen(tau + 0.5 * h);
  const Dense a1 = gen(tau + h);
  const Dense k1 = a0 * y;
  const Dense k2 = ah * (y + 0.5 * h * k1);
  const Dense k3 = ah * (y + 0.5 * h * k2);
  const Dense k4 = a1 * (y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Step-doubling RK4 with local extrapolation; local error target 1e-10.
Dense propagate(const std::function<Dense(double)>& gen, Eigen::Index n, double s, double t) {
  constexpr double kLocalTolerance = 1e-10;
  Dense y = Dense::Identity(n, n);
  if (t == s) return y;
  const double direction = t > s ? 1.0 : -1.0;
  double tau = s;
  double h = direction * std::min(0.05, std::abs(t - s));
  while (direction * (t - tau) > 0.0) {
    if (direction * (tau + h - t) > 0.0) h = t - tau;
    const Dense full = rk4_step(gen, y, tau, h);
    const Dense half = rk4_step(gen, rk4_step(gen, y, tau, 0.5 * h), tau + 0.5 * h, 0.5 * h);
    const double err = (half - full).norm() / 15.0;
    if (err <= kLocalTolerance || std::abs(h) < 1e-12) {
      y = half + (half - full) / 15.0;
      tau += h;
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(kLocalTolerance / err, 0.2) : 2.0;
    h *= std::clamp(factor, 0.2, 2.0);
  }
  return y;
}

std::map<std::string, std::string> parse_params(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  int depth = 0;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    const auto eq = current.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorKind::InvalidInput, "malformed family parameter '" + current + "'");
    out[current.substr(0, eq)] = current.substr(eq + 1);
    current.clear();
  };
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      flush();
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidInput, "parameter " + key + " is not a number: '" + value + "'");
  }
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e6)
    throw Error(ErrorKind::InvalidInput, "parameter " + key + " is not an integer: '" + value + "'");
  return static_cast<int>(v);
}

template <class Map>
std::string take(Map& params, const std::string& key, const std::string& fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::string v = it->second;
  params.erase(it);
  return v;
}

void require_even_grid(int n) {
  if (n < 8 || n % 2 != 0)
    throw Error(ErrorKind::InvalidInput, "periodic grid size must be even and >= 8, got " + std::to_string(n));
}

}  // namespace

bool EvolutionFamily::invertible_at(double t, double s) const { return numerically_invertible(eval(t, s)); }

RateProfile rate_profile(const std::string& name) {
  if (name == "const") return {name, [](double) { return 1.0; }, [](double t) { return t; }};
  if (name == "linear") return {name, [](double t) { return 2.0 * t; }, [](double t) { return t * t; }};
  if (name == "cosine")
    return {name, [](double t) { return 1.0 + 0.5 * std::cos(t); },
            [](double t) { return t + 0.5 * std::sin(t); }};
  throw Error(ErrorKind::InvalidInput, "unknown rate profile '" + name + "' (const|linear|cosine)");
}

EvolutionFamily family_constant(const OperatorMatrix& b, std::string name) {
  EvolutionFamily fam;
  fam.name = std::move(name);
  fam.dim = b.dim();
  fam.eval = [b](double t, double s) { return mat_exp((t - s) * b); };
  fam.generator_oracle = [b](double) { return b; };
  return fam;
}

EvolutionFamily family_commuting_time_dependent(const OperatorMatrix& b, RateProfile rate, std::string name) {
  EvolutionFamily fam;
  fam.name = std::move(name);
  fam.dim = b.dim();
  fam.eval = [b, F = rate.antiderivative](double t, double s) { return mat_exp((F(t) - F(s)) * b); };
  fam.generator_oracle = [b, f = rate.f](double t) { return f(t) * b; };
  return fam;
}

EvolutionFamily family_identity(Eigen::Index n) {
  EvolutionFamily fam = family_constant(OperatorMatrix::zero(n), "identity:n=" + std::to_string(n));
  fam.eval = [n](double, double) { return OperatorMatrix::identity(n); };
  return fam;
}

OperatorMatrix spectral_differentiation_matrix(int n, double length) {
  require_even_grid(n);
  const double h = kTwoPi / n;
  const double scale = kTwoPi / length;
  Dense d = Dense::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = scale * 0.5 * sign / std::tan(0.5 * k * h);
    }
  }
  return OperatorMatrix(std::move(d));
}

OperatorMatrix circulant_from_symbol(int n, const std::function<Complex(int)>& symbol, bool real_valued) {
  std::vector<Complex> sigma(n);
  for (int k = -n / 2 + 1; k <= n / 2; ++k) sigma[k + n / 2 - 1] = symbol(k);
  std::vector<Complex> column(n);
  for (int m = 0; m < n; ++m) {
    Complex acc{};
    for (int k = -n / 2 + 1; k <= n / 2; ++k) {
      const long phase = ((static_cast<long>(k) * m) % n + n) % n;
      const double angle = kTwoPi * static_cast<double>(phase) / n;
      acc += sigma[k + n / 2 - 1] * Complex(std::cos(angle), std::sin(angle));
    }
    column[m] = acc / static_cast<double>(n);
    if (real_valued) column[m] = column[m].real();
  }
  Dense u(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) u(j, l) = column[((j - l) % n + n) % n];
  return OperatorMatrix(std::move(u));
}

EvolutionFamily family_advection(int n, double c, double length) {
  require_even_grid(n);
  if (!(length > 0.0)) throw Error(ErrorKind::InvalidInput, "domain length must be positive");
  EvolutionFamily fam;
  fam.name = "advection:n=" + std::to_string(n) + ",c=" + format_number(c) + ",L=" + format_number(length);
  fam.dim = n;
  const OperatorMatrix b = c * spectral_differentiation_matrix(n, length);
  fam.eval = [n, c, length](double t, double s) {
    const double tau = t - s;
    return circulant_from_symbol(
        n,
        [&](int k) {
          if (2 * k == n) return Complex(1.0);
          const double omega = c * kTwoPi * k / length;
          return Complex(std::cos(omega * tau), std::sin(omega * tau));
        },
        true);
  };
  fam.generator_oracle = [b](double) { return b; };
  return fam;
}

EvolutionFamily family_heat(int n, double mu, double length) {
  require_even_grid(n);
  if (!(mu > 0.0)) throw Error(ErrorKind::InvalidInput, "diffusivity must be positive");
  if (!(length > 0.0)) throw Error(ErrorKind::InvalidInput, "domain length must be positive");
  EvolutionFamily fam;
  fam.name = "heat:n=" + std::to_string(n) + ",mu=" + format_number(mu) + ",L=" + format_number(length);
  fam.dim = n;
  fam.invertible = false;  // per-(t, s) certificate only
  const OperatorMatrix d = spectral_differentiation_matrix(n, length);
  const OperatorMatrix b = mu * (d * d);
  fam.eval = [n, mu, length](double t, double s) {
    const double tau = t - s;
    return circulant_from_symbol(
        n,
        [&](int k) {
          if (2 * k == n) return Complex(1.0);
          const double kappa = kTwoPi * k / length;
          return Complex(std::exp(-mu * kappa * kappa * tau));
        },
        true);
  };
  fam.generator_oracle = [b](double) { return b; };
  fam.t_range = {0.0, 2.0};
  return fam;
}

EvolutionFamily family_noncommuting(const OperatorMatrix& b0, const OperatorMatrix& b1, std::string name) {
  if (b0.dim() != b1.dim()) throw Error(ErrorKind::InvalidInput, "B0 and B1 must have equal size");
  EvolutionFamily fam;
  fam.name = std::move(name);
  fam.dim = b0.dim();
  const double commutator = (b0.dense() * b1.dense() - b1.dense() * b0.dense()).norm();
  fam.commuting = commutator <= 1e-14 * std::max(1.0, b0.frobenius_norm() * b1.frobenius_norm());
  const Dense d0 = b0.dense();
  const Dense d1 = b1.dense();
  const Eigen::Index n = b0.dim();
  fam.eval = [d0, d1, n](double t, double s) {
    std::function<Dense(double)> gen = [&](double tau) -> Dense { return d0 + tau * d1; };
    return OperatorMatrix(propagate(gen, n, s, t));
  };
  fam.generator_oracle = [b0, b1](double t) { return b0 + t * b1; };
  return fam;
}

EvolutionFamily family_noncommuting(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidInput, "non-commuting family needs n >= 2");
  Dense b0 = Dense::Zero(n, n);
  Dense b1 = Dense::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    b0(i, i + 1) = 1.0;
    b0(i + 1, i) = -1.0;
  }
  for (int i = 0; i < n; ++i) b1(i, i) = -1.0 + 2.0 * i / (n - 1);
  return family_noncommuting(OperatorMatrix(b0), OperatorMatrix(b1), "noncommuting:n=" + std::to_string(n));
}

OperatorMatrix matrix_preset(const std::string& preset, int n, unsigned seed, double scale) {
  if (preset == "rot") return OperatorMatrix(Dense{{0.0, 1.0}, {-1.0, 0.0}});
  if (preset == "nilpotent") return OperatorMatrix(Dense{{0.0, 1.0}, {0.0, 0.0}});
  if (preset == "growth") return OperatorMatrix(Dense{{1.0, 0.5}, {0.0, 2.0}});
  if (preset == "decay") return OperatorMatrix(Dense{{-1.0, 0.3}, {0.0, -2.0}});
  if (preset == "zero") return OperatorMatrix::zero(n);
  if (preset == "random") {
    if (n < 1) throw Error(ErrorKind::InvalidInput, "random preset needs n >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Dense b(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) b(i, j) = scale * normal(rng) / std::sqrt(static_cast<double>(n));
    return OperatorMatrix(std::move(b));
  }
  if (preset.rfind("diag(", 0) == 0 && preset.back() == ')') {
    std::vector<Complex> entries;
    std::stringstream ss(preset.substr(5, preset.size() - 6));
    std::string item;
    while (std::getline(ss, item, ';')) entries.emplace_back(to_double("diag", item));
    if (entries.empty()) throw Error(ErrorKind::InvalidInput, "empty diag() preset");
    return OperatorMatrix::diagonal(entries);
  }
  throw Error(ErrorKind::InvalidInput,
              "unknown matrix preset '" + preset + "' (rot|nilpotent|growth|decay|zero|random|diag(a;b;...))");
}

EvolutionFamily parse_family(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  auto params = parse_params(colon == std::string::npos ? std::string{} : spec.substr(colon + 1));

  auto finish = [&](EvolutionFamily fam) {
    if (!params.empty())
      throw Error(ErrorKind::InvalidInput, "unknown parameter '" + params.begin()->first + "' for " + kind);
    return fam;
  };
  auto matrix_param = [&] {
    const std::string preset = take(params, "B", "rot");
    const int n = to_int("n", take(params, "n", "4"));
    const unsigned seed = static_cast<unsigned>(to_int("seed", take(params, "seed", "1")));
    const double scale = to_double("scale", take(params, "scale", "1"));
    return matrix_preset(preset, n, seed, scale);
  };

  if (kind == "identity") {
    const int n = to_int("n", take(params, "n", "2"));
    if (n < 1) throw Error(ErrorKind::InvalidInput, "n must be positive");
    return finish(family_identity(n));
  }
  if (kind == "scalar") {
    const double rate = to_double("rate", take(params, "rate", "2"));
    const Complex r(rate);
    EvolutionFamily fam = family_constant(OperatorMatrix::diagonal(std::span<const Complex>(&r, 1)),
                                          "scalar:rate=" + format_number(rate));
    return finish(std::move(fam));
  }
  if (kind == "constant") {
    EvolutionFamily fam = family_constant(matrix_param(), spec);
    return finish(std::move(fam));
  }
  if (kind == "commuting") {
    const RateProfile rate = rate_profile(take(params, "f", "linear"));
    EvolutionFamily fam = family_commuting_time_dependent(matrix_param(), rate, spec);
    return finish(std::move(fam));
  }
  if (kind == "advection") {
    const int n = to_int("n", take(params, "n", "16"));
    const double c = to_double("c", take(params, "c", "1"));
    const double length = to_double("L", take(params, "L", format_number(kTwoPi)));
    return finish(family_advection(n, c, length));
  }
  if (kind == "heat") {
    const int n = to_int("n", take(params, "n", "16"));
    const double mu = to_double("mu", take(params, "mu", "1"));
    const double length = to_double("L", take(params, "L", format_number(kTwoPi)));
    return finish(family_heat(n, mu, length));
  }
  if (kind == "noncommuting") {
    const int n = to_int("n", take(params, "n", "2"));
    return finish(family_noncommuting(n));
  }
  throw Error(ErrorKind::InvalidInput, "unknown family kind '" + kind + "'");
}

std::vector<CatalogueEntry> family_catalogue() {
  return {
      {"identity", "identity:n=2", "U(t,s) = I; zero generator"},
      {"scalar", "scalar:rate=2", "1x1 family U(t,s) = exp(rate (t-s))"},
      {"constant", "constant:B=rot",
       "U(t,s) = exp((t-s) B); B in rot|nilpotent|growth|decay|zero|random|diag(a;b;...), "
       "random takes n, seed, scale"},
      {"commuting", "commuting:B=diag(1;-0.5),f=linear",
       "U(t,s) = exp((F(t)-F(s)) B), generator f(t) B; f in const|linear|cosine"},
      {"advection", "advection:n=16,c=1,L=6.283185307179586",
       "periodic spectral advection, skew generator with imaginary spectrum (non-sectorial)"},
      {"heat", "heat:n=16,mu=1,L=6.283185307179586",
       "periodic spectral heat flow; numerically non-invertible for large t-s"},
      {"noncommuting", "noncommuting:n=2", "RK4-propagated U for A(t) = B0 + t B1 with [B0,B1] != 0"},
  };
}

FamilyInvariantReport check_family_invariants(const EvolutionFamily& family, int grid) {
  FamilyInvariantReport report;
  const auto [lo, hi] = family.t_range;
  std::vector<double> ts(grid);
  for (int i = 0; i < grid; ++i) ts[i] = lo + (hi - lo) * i / std::max(grid - 1, 1);
  const OperatorMatrix id = OperatorMatrix::identity(family.dim);
  for (double t : ts) report.identity_max = std::max(report.identity_max, (family(t, t) - id).frobenius_norm());
  for (int i = 0; i < grid; ++i) {
    for (int k = i + 1; k < grid; ++k) {
      const double s = ts[i];
      const double t = ts[k];
      const OperatorMatrix uts = family(t, s);
      for (int j = i + 1; j < k; ++j) {
        const double r = ts[j];
        const double err = (family(t, r) * family(r, s) - uts).frobenius_norm() / uts.frobenius_norm();
        report.semigroup_max = std::max(report.semigroup_max, err);
        ++report.triples;
      }
      if (family.invertible)
        report.inverse_max = std::max(report.inverse_max, (uts * family(s, t) - id).frobenius_norm());
    }
  }
  return report;
}

}  // namespace oplog
