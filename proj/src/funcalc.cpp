#include "oplog/funcalc.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace oplog {

namespace {

using Dense = OperatorMatrix::Dense;

constexpr double kMinRelativeRadius = 1e-3;
constexpr double kBlowupRcond = 1.0 / kConditionLimit;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Complex node_direction(int k, int total) {
  const double theta = (2.0 * std::numbers::pi * k) / total;
  return {std::cos(theta), std::sin(theta)};
}

/// Running sums over the nodes of one circle. Nodes at level N are the even
/// nodes of level 2N, so refinement only visits the odd ones.
struct CircleSweep {
  Complex center;
  double radius;
  int nodes = 0;
  Dense weighted{};  // Σ (λ_k − c) f(λ_k) (λ_k − A)⁻¹
  Complex trace{};   // Σ (λ_k − c) tr (λ_k − A)⁻¹
  double min_distance = std::numeric_limits<double>::infinity();

  void visit(const Dense& a, const ScalarFunction* f, int total, int begin, int step) {
    const Eigen::Index n = a.rows();
    if (f != nullptr && weighted.size() == 0) weighted = Dense::Zero(n, n);
    Dense shifted(n, n);
    for (int k = begin; k < total; k += step) {
      const Complex offset = radius * node_direction(k, total);
      const Complex lambda = center + offset;
      shifted = -a;
      shifted.diagonal().array() += lambda;
      Eigen::PartialPivLU<Dense> lu(shifted);
      const double rcond = lu_rcond(lu);
      if (!(rcond >= kBlowupRcond)) {
        std::ostringstream os;
        os << "resolvent at node " << lambda << " is singular or ill-conditioned (rcond " << rcond << ")";
        throw Error(ErrorKind::ResolventBlowup, os.str());
      }
      const Dense resolvent = lu.inverse();
      trace += offset * resolvent.trace();
      if (f != nullptr) weighted.noalias() += (offset * (*f)(lambda)) * resolvent;
      min_distance = std::min(min_distance, 1.0 / resolvent.norm());
    }
    nodes = total;
  }

  void start(const Dense& a, const ScalarFunction* f, int total) { visit(a, f, total, 0, 1); }
  void refine(const Dense& a, const ScalarFunction* f) { visit(a, f, 2 * nodes, 1, 2); }

  Dense value() const { return weighted / static_cast<double>(nodes); }
  Complex count() const { return trace / static_cast<double>(nodes); }
};

bool count_is_integral(Complex raw) {
  return std::abs(raw.real() - std::round(raw.real())) < 1e-6 && std::abs(raw.imag()) < 1e-6;
}

/// Distance from z to the ray (−∞, 0].
double cut_distance(Complex z) { return z.real() > 0.0 ? std::abs(z) : std::abs(z.imag()); }

/// Padded radius, kept at most halfway between the enclosure and the cut so
/// the trapezoidal rule converges geometrically.
double contour_radius(const SpectralEnclosure& enc, double margin) {
  const double padded = std::max(enc.radius * (1.0 + margin), kMinRelativeRadius * std::abs(enc.center));
  const double distance = cut_distance(enc.center);
  return distance > enc.radius ? std::min(padded, 0.5 * (enc.radius + distance)) : padded;
}

SpectralEnclosure union_enclosure(std::span<const SpectralEnclosure> encs) {
  SpectralEnclosure u{encs.front().center, 0.0, {}};
  for (const auto& e : encs) u.radius = std::max(u.radius, std::abs(e.center - u.center) + e.radius);
  return u;
}

const ScalarFunction& log_kernel() {
  static const ScalarFunction f = [](Complex z) { return principal_log(z); };
  return f;
}

}  // namespace

Contour::Contour(Complex center, double radius, int node_count)
    : center_(center), radius_(radius), node_count_(node_count) {
  nodes_.reserve(node_count);
  weights_.reserve(node_count);
  for (int k = 0; k < node_count; ++k) {
    const Complex offset = radius * node_direction(k, node_count);
    nodes_.push_back(center + offset);
    weights_.push_back(offset / static_cast<double>(node_count));
  }
}

Contour Contour::circle(Complex center, double radius, int node_count) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorKind::InvalidInput, "contour radius must be positive and finite");
  if (node_count < kMinNodes || !is_power_of_two(node_count))
    throw Error(ErrorKind::InvalidInput, "node count must be a power of two >= 16");
  return Contour(center, radius, node_count);
}

bool ContourValidity::integral() const { return count_is_integral(raw_eigencount); }

int node_cap() {
  if (const char* env = std::getenv("OPLOG_NODE_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= Contour::kMinNodes && v <= (1L << 24)) return static_cast<int>(v);
  }
  return kDefaultNodeCap;
}

Complex principal_log(Complex z) {
  if (z.imag() == 0.0 && z.real() < 0.0) return {std::log(-z.real()), std::numbers::pi};
  return std::log(z);
}

bool disc_excludes_origin(Complex center, double radius) { return std::abs(center) > radius; }

bool disc_avoids_branch_cut(Complex center, double radius) { return cut_distance(center) > radius; }

void require_log_geometry(Complex center, double radius) {
  std::ostringstream os;
  os << "disc centre " << center << " radius " << radius;
  if (!disc_excludes_origin(center, radius)) throw Error(ErrorKind::OriginEnclosed, os.str());
  if (!disc_avoids_branch_cut(center, radius)) throw Error(ErrorKind::SpectrumHitsBranchCut, os.str());
}

Contour build_log_contour(const SpectralEnclosure& enc, double margin) {
  if (!(margin > 0.0)) throw Error(ErrorKind::InvalidInput, "margin must be positive");
  const double radius = contour_radius(enc, margin);
  require_log_geometry(enc.center, radius);
  return Contour::circle(enc.center, radius, Contour::kInitialNodes);
}

ContourValidity validate_contour(const OperatorMatrix& a, const Contour& c) {
  CircleSweep sweep{c.center(), c.radius()};
  sweep.start(a.dense(), nullptr, c.node_count());
  // Refine until the count settles; eigenvalues close to the circle slow the
  // trapezoidal rule down.
  const int cap = node_cap();
  Complex previous = sweep.count();
  while (2 * sweep.nodes <= cap) {
    sweep.refine(a.dense(), nullptr);
    const Complex current = sweep.count();
    const bool settled = std::abs(current - previous) < 1e-9;
    previous = current;
    if (settled) break;
  }
  ContourValidity v;
  v.raw_eigencount = sweep.count();
  v.eigencount = static_cast<int>(std::lround(v.raw_eigencount.real()));
  v.encloses_spectrum = v.eigencount == a.dim() && v.integral();
  v.excludes_origin = disc_excludes_origin(c.center(), c.radius());
  v.avoids_branch_cut = disc_avoids_branch_cut(c.center(), c.radius());
  v.min_resolvent_distance = sweep.min_distance;
  return v;
}

OperatorMatrix dunford_integral(const ScalarFunction& f, const OperatorMatrix& a, const Contour& c) {
  CircleSweep sweep{c.center(), c.radius()};
  sweep.start(a.dense(), &f, c.node_count());
  const Complex count = sweep.count();
  if (!count_is_integral(count) || std::lround(count.real()) != a.dim()) {
    std::ostringstream os;
    os << "argument principle counts " << count << " eigenvalues inside, expected " << a.dim();
    throw Error(ErrorKind::InvalidContour, os.str());
  }
  return OperatorMatrix(sweep.value());
}

Contour log_contour_for(const OperatorMatrix& a, double margin) {
  try {
    return build_log_contour(gershgorin_enclosure(a), margin);
  } catch (const Error&) {
    const auto tight = tightened(spectral_enclosure(a));
    if (!tight) throw;
    return build_log_contour(*tight, margin);
  }
}

Contour shared_log_contour(std::span<const OperatorMatrix> mats, double margin) {
  if (mats.empty()) throw Error(ErrorKind::InvalidInput, "shared contour needs at least one matrix");
  std::vector<SpectralEnclosure> encs;
  encs.reserve(mats.size());
  for (const auto& m : mats) encs.push_back(gershgorin_enclosure(m));
  try {
    return build_log_contour(union_enclosure(encs), margin);
  } catch (const Error&) {
    std::vector<SpectralEnclosure> tight;
    tight.reserve(mats.size());
    for (const auto& m : mats) {
      auto t = tightened(spectral_enclosure(m));
      if (!t) throw;
      tight.push_back(std::move(*t));
    }
    return build_log_contour(union_enclosure(tight), margin);
  }
}

LogResult op_log_on(const OperatorMatrix& a, const Contour& start) {
  const int cap = node_cap();
  const Dense& m = a.dense();
  CircleSweep sweep{start.center(), start.radius()};
  sweep.start(m, &log_kernel(), start.node_count());
  Dense previous = sweep.value();
  double change = std::numeric_limits<double>::infinity();
  while (true) {
    if (2 * sweep.nodes > cap) {
      std::ostringstream os;
      os << "quadrature did not converge within " << cap << " nodes (last change " << change << ")";
      throw Error(ErrorKind::NoConvergence, os.str());
    }
    sweep.refine(m, &log_kernel());
    Dense current = sweep.value();
    change = (current - previous).norm() / std::max(current.norm(), 1.0);
    previous = std::move(current);
    if (change < kLogTolerance) break;
  }
  const Complex count = sweep.count();
  if (!count_is_integral(count) || std::lround(count.real()) != a.dim()) {
    std::ostringstream os;
    os << "argument principle counts " << count << " eigenvalues inside, expected " << a.dim();
    throw Error(ErrorKind::InvalidContour, os.str());
  }
  return LogResult{OperatorMatrix(std::move(previous)), start.with_nodes(sweep.nodes), change};
}

std::vector<OperatorMatrix> op_log_batch(std::span<const OperatorMatrix> mats, const Contour& start) {
  const int cap = node_cap();
  std::vector<CircleSweep> sweeps(mats.size(), CircleSweep{start.center(), start.radius()});
  std::vector<Dense> previous(mats.size());
  for (std::size_t i = 0; i < mats.size(); ++i) {
    sweeps[i].start(mats[i].dense(), &log_kernel(), start.node_count());
    previous[i] = sweeps[i].value();
  }
  double change = std::numeric_limits<double>::infinity();
  while (!(change < kLogTolerance)) {
    if (2 * sweeps.front().nodes > cap) {
      std::ostringstream os;
      os << "batched quadrature did not converge within " << cap << " nodes (last change " << change << ")";
      throw Error(ErrorKind::NoConvergence, os.str());
    }
    change = 0.0;
    for (std::size_t i = 0; i < mats.size(); ++i) {
      sweeps[i].refine(mats[i].dense(), &log_kernel());
      Dense current = sweeps[i].value();
      change = std::max(change, (current - previous[i]).norm() / std::max(current.norm(), 1.0));
      previous[i] = std::move(current);
    }
  }
  std::vector<OperatorMatrix> out;
  out.reserve(mats.size());
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const Complex count = sweeps[i].count();
    if (!count_is_integral(count) || std::lround(count.real()) != mats[i].dim()) {
      std::ostringstream os;
      os << "argument principle counts " << count << " eigenvalues inside, expected " << mats[i].dim();
      throw Error(ErrorKind::InvalidContour, os.str());
    }
    out.emplace_back(std::move(previous[i]));
  }
  return out;
}

LogResult op_log_detailed(const OperatorMatrix& a) { return op_log_on(a, log_contour_for(a)); }

OperatorMatrix op_log(const OperatorMatrix& a) { return op_log_detailed(a).value; }

OperatorMatrix op_log_split(const OperatorMatrix& a, double margin) {
  const SpectralEnclosure enc = spectral_enclosure(a);
  if (enc.eigen_estimates.empty())
    throw Error(ErrorKind::InvalidInput, "split contour needs eigen estimates (n <= 128)");

  double scale = 0.0;
  for (const Complex& z : enc.eigen_estimates) scale = std::max(scale, std::abs(z));
  const double real_axis_tol = 1e-10 * std::max(scale, 1e-300);

  std::vector<Complex> upper, lower, positive;
  for (const Complex& z : enc.eigen_estimates) {
    if (z.imag() > real_axis_tol) {
      upper.push_back(z);
    } else if (z.imag() < -real_axis_tol) {
      lower.push_back(z);
    } else if (z.real() > real_axis_tol) {
      positive.push_back(z);
    } else {
      std::ostringstream os;
      os << "eigenvalue estimate " << z << " lies on the branch cut";
      throw Error(std::abs(z) <= real_axis_tol ? ErrorKind::OriginEnclosed : ErrorKind::SpectrumHitsBranchCut,
                  os.str());
    }
  }

  struct Part {
    CircleSweep sweep;
    std::size_t expected;
  };
  std::vector<Part> parts;
  for (const auto* cluster : {&upper, &lower, &positive}) {
    if (cluster->empty()) continue;
    SpectralEnclosure probe{Complex{}, std::numeric_limits<double>::infinity(), *cluster};
    const auto tight = tightened(probe);
    const double radius = contour_radius(*tight, margin);
    require_log_geometry(tight->center, radius);
    parts.push_back(Part{CircleSweep{tight->center, radius}, cluster->size()});
  }

  const Dense& m = a.dense();
  auto total = [&] {
    Dense sum = Dense::Zero(m.rows(), m.cols());
    for (const auto& p : parts) sum += p.sweep.value();
    return sum;
  };
  for (auto& p : parts) p.sweep.start(m, &log_kernel(), Contour::kInitialNodes);
  Dense previous = total();
  const int cap = node_cap();
  while (true) {
    if (2 * parts.front().sweep.nodes > cap)
      throw Error(ErrorKind::NoConvergence, "split-contour quadrature did not converge");
    for (auto& p : parts) p.sweep.refine(m, &log_kernel());
    Dense current = total();
    const double change = (current - previous).norm() / std::max(current.norm(), 1.0);
    previous = std::move(current);
    if (change < kLogTolerance) break;
  }
  for (const auto& p : parts) {
    const Complex count = p.sweep.count();
    if (!count_is_integral(count) || std::lround(count.real()) != static_cast<long>(p.expected)) {
      std::ostringstream os;
      os << "circle about " << p.sweep.center << " counts " << count << " eigenvalues, expected "
         << p.expected;
      throw Error(ErrorKind::InvalidContour, os.str());
    }
  }
  return OperatorMatrix(std::move(previous));
}

}  // namespace oplog
