#include "oplog/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "oplog/acceptance.hpp"
#include "oplog/applications.hpp"
#include "oplog/families.hpp"
#include "oplog/funcalc.hpp"
#include "oplog/logrep.hpp"

namespace oplog {

namespace {

[[noreturn]] void usage(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

class Command {
 public:
  explicit Command(const RunConfig& config) : cfg_(config) {
    report_.command = config.command;
    Json& p = report_.params;
    p["family"] = config.family_spec ? Json(*config.family_spec) : Json(nullptr);
    p["matrix"] = config.matrix_path ? Json(config.matrix_path->string()) : Json(nullptr);
    p["t"] = config.t;
    p["s"] = config.s;
    p["eta"] = config.eta ? complex_to_json(*config.eta) : Json(nullptr);
    p["nu"] = config.nu ? complex_to_json(*config.nu) : Json(nullptr);
    p["seed"] = config.seed;
    p["tolerance"] = config.tolerance ? Json(*config.tolerance) : Json(nullptr);
  }

  double tol(double nominal) const { return cfg_.tolerance.value_or(nominal); }
  const RunConfig& cfg() const { return cfg_; }
  Report& report() { return report_; }
  Json& payload() { return report_.payload; }

  void at_most(const std::string& name, double value, double nominal) {
    report_.expect_at_most(name, value, tol(nominal));
  }

  void failed(const std::string& what, ErrorKind kind, const std::string& message) {
    report_.require(what + ": " + std::string(to_string(kind)), false);
    payload()["errors"].push_back(Json{{"stage", what}, {"kind", to_string(kind)}, {"message", message}});
  }

  EvolutionFamily family() const {
    if (cfg_.matrix_path) usage(cfg_.command + " needs --family, not --matrix");
    if (!cfg_.family_spec) usage(cfg_.command + " needs --family");
    return parse_family(*cfg_.family_spec);
  }

  /// U from --matrix, or U(t, s) from --family.
  OperatorMatrix operator_u() const {
    if (cfg_.family_spec && cfg_.matrix_path) usage("give exactly one of --family and --matrix");
    if (cfg_.matrix_path) return read_matrix_file(*cfg_.matrix_path);
    if (cfg_.family_spec) return parse_family(*cfg_.family_spec)(cfg_.t, cfg_.s);
    usage(cfg_.command + " needs --family or --matrix");
  }

 private:
  const RunConfig& cfg_;
  Report report_;
};

Json outcome_json(const RepresentationOutcome& out) {
  if (out.value) return Json{{"status", "ok"}, {"matrix", matrix_to_json(*out.value)}};
  return Json{{"status", to_string(*out.error)}, {"message", out.message}};
}

Json params_json(const ShiftParams& p) {
  return Json{{"eta", complex_to_json(p.eta)},
              {"nu", complex_to_json(p.nu)},
              {"eta_in_resolvent_set", p.eta_in_resolvent_set},
              {"nu_valid_for_a1", p.nu_valid_for_a1},
              {"nu_valid_for_a2", p.nu_valid_for_a2}};
}

/// Shared body of verify-gen and equivalence.
void generator_checks(Command& cmd, const EvolutionFamily& fam, const ShiftParams& p,
                      std::span<const Representation> which) {
  const auto& cfg = cmd.cfg();
  cmd.report().require("shift parameters certified", p.certified());
  const auto rep = generator_report(fam, cfg.t, cfg.s, p, which);
  Json reps = Json::object();
  CsvTable table{{"representation", "other", "quantity", "value"}, {}};
  for (const auto& [r, out] : rep.outcomes) {
    reps[to_string(r)] = outcome_json(out);
    if (!out.value) cmd.failed(to_string(r), *out.error, out.message);
  }
  for (const auto& [r, e] : rep.oracle_errors) {
    cmd.at_most(to_string(r) + " oracle error", e, 1e-4);
    table.rows.push_back({to_string(r), "", "oracle_error", format_double(e)});
  }
  Json pairs = Json::array();
  for (const auto& [pr, d] : rep.pairwise_discrepancies) {
    cmd.at_most(to_string(pr.first) + "/" + to_string(pr.second) + " discrepancy", d, 1e-7);
    pairs.push_back(Json{{"a", to_string(pr.first)}, {"b", to_string(pr.second)}, {"value", d}});
    table.rows.push_back({to_string(pr.first), to_string(pr.second), "discrepancy", format_double(d)});
  }
  Json oracle_errors = Json::object();
  for (const auto& [r, e] : rep.oracle_errors) oracle_errors[to_string(r)] = e;
  cmd.payload()["shift"] = params_json(p);
  cmd.payload()["h0"] = rep.h0;
  cmd.payload()["representations"] = std::move(reps);
  cmd.payload()["oracle"] = rep.oracle ? matrix_to_json(*rep.oracle) : Json(nullptr);
  cmd.payload()["oracle_errors"] = std::move(oracle_errors);
  cmd.payload()["pairwise_discrepancies"] = std::move(pairs);
  cmd.report().table = std::move(table);
}

void cmd_logm(Command& cmd) {
  const OperatorMatrix u = cmd.operator_u();
  cmd.payload()["input"] = matrix_to_json(u);
  try {
    const auto res = op_log_detailed(u);
    cmd.at_most("exp(log U) round trip", relative_error(mat_exp(res.value), u), 1e-9);
    cmd.payload()["log"] = matrix_to_json(res.value);
    cmd.payload()["contour"] = Json{{"center", complex_to_json(res.contour.center())},
                                    {"radius", res.contour.radius()},
                                    {"nodes", res.contour.node_count()}};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) throw;
    if (e.kind() != ErrorKind::OriginEnclosed) {
      cmd.failed("op_log", e.kind(), e.what());
      return;
    }
    try {
      // One circle per spectral cluster keeps the origin outside every contour.
      const OperatorMatrix log = op_log_split(u);
      cmd.at_most("exp(log U) round trip", relative_error(mat_exp(log), u), 1e-9);
      cmd.payload()["log"] = matrix_to_json(log);
      cmd.payload()["contour"] = "split";
    } catch (const Error& e2) {
      cmd.failed("op_log_split", e2.kind(), e2.what());
    }
  }
}

void cmd_verify_gen(Command& cmd) {
  const auto fam = cmd.family();
  const auto& cfg = cmd.cfg();
  const OperatorMatrix u = fam(cfg.t, cfg.s);
  const Complex eta = cfg.eta ? *cfg.eta : select_eta(fam, cfg.t, cfg.s);
  const Complex nu = cfg.nu ? *cfg.nu : select_nu(u, eta);
  const Representation which[] = {Representation::Lemma1, Representation::Theorem1};
  generator_checks(cmd, fam, certify_params(u, eta, nu), which);
}

void cmd_equivalence(Command& cmd) {
  const auto fam = cmd.family();
  const auto& cfg = cmd.cfg();
  ShiftParams p;
  if (cfg.eta) {
    p = certify_params(fam(cfg.t, cfg.s), *cfg.eta, cfg.nu ? *cfg.nu : nu_from_eta(*cfg.eta));
  } else {
    if (cfg.nu) usage("equivalence takes --nu only together with --eta");
    p = select_collapse_params(fam, cfg.t, cfg.s);
  }
  generator_checks(cmd, fam, p, kAllRepresentations);
}

Json attempt_json(const LogAttempt& a) {
  if (a.value) return Json{{"status", "ok"}, {"matrix", matrix_to_json(*a.value)}};
  return Json{{"status", a.error ? Json(to_string(*a.error)) : Json("skipped")}, {"message", a.message}};
}

void cmd_formal_log(Command& cmd) {
  const auto& cfg = cmd.cfg();
  const OperatorMatrix u = cmd.operator_u();
  const Complex eta = cfg.eta ? *cfg.eta : select_eta(u);
  const auto rec = formal_log_decomposition(u, eta);
  Json formal{{"eta", complex_to_json(rec.eta)},
              {"log_u_ieta", attempt_json(rec.log_u_ieta)},
              {"log_ieta", attempt_json(rec.log_ieta)},
              {"log_u", attempt_json(rec.log_u)},
              {"discrepancy", rec.discrepancy ? Json(*rec.discrepancy) : Json(nullptr)},
              {"resolvent_error", rec.resolvent_error ? Json(to_string(*rec.resolvent_error)) : Json(nullptr)}};
  cmd.payload()["formal"] = std::move(formal);

  const Complex nu = cfg.nu ? *cfg.nu : select_nu(u, eta);
  const ShiftParams p = certify_params(u, eta, nu);
  cmd.report().require("translation certified", p.certified());
  Json translated = params_json(p);
  try {
    const auto a1 = alt_generator_a1(u, p);
    cmd.report().require("translated a1 computed", true);
    translated["a1"] = matrix_to_json(a1.shifted);
    translated["a1_direct"] = a1.direct_status;
  } catch (const Error& e) {
    cmd.failed("translated a1", e.kind(), e.what());
  }
  try {
    const auto a2 = alt_generator_a2(u, p);
    cmd.report().require("translated a2 computed", true);
    cmd.report().require("norm of exp(a2) within the I_eta bound", a2.bound_holds());
    translated["a2"] = matrix_to_json(a2.value);
    translated["exp_a2_norm"] = a2.exp_norm;
    translated["bound"] = a2.bound;
  } catch (const Error& e) {
    cmd.failed("translated a2", e.kind(), e.what());
  }
  cmd.payload()["translated"] = std::move(translated);
}

void cmd_algebra(Command& cmd) {
  const auto fam = cmd.family();
  const auto& cfg = cmd.cfg();
  const std::vector<std::pair<double, double>> grid = {
      {cfg.t, cfg.s}, {cfg.t + 0.25, cfg.s}, {cfg.t, cfg.s + 0.25}, {cfg.t + 0.25, cfg.s + 0.25}};
  ShiftParams p;
  if (cfg.eta || cfg.nu) {
    if (!cfg.eta || !cfg.nu) usage("algebra takes --eta and --nu together");
    p.eta = *cfg.eta;
    p.nu = *cfg.nu;
    p.eta_in_resolvent_set = p.nu_valid_for_a1 = p.nu_valid_for_a2 = true;
    for (const auto& [t, s] : grid) {
      const auto c = certify_params(fam(t, s), p.eta, p.nu);
      p.eta_in_resolvent_set &= c.eta_in_resolvent_set;
      p.nu_valid_for_a1 &= c.nu_valid_for_a1;
      p.nu_valid_for_a2 &= c.nu_valid_for_a2;
    }
  } else {
    p = select_params_for_grid(fam, grid);
  }
  cmd.report().require("shift parameters certified on the grid", p.certified());
  const auto rep = algebraic_property_report(fam, grid, p);
  cmd.report().require("bound finite", std::isfinite(rep.max_bound));
  cmd.report().require("continuity modulus finite", std::isfinite(rep.max_continuity));
  if (fam.commuting)
    cmd.at_most("normalised commutator", rep.max_commutator, PropertyReport::kCommutingTolerance);
  else
    cmd.report().expect_at_least("normalised commutator (non-commuting family)", rep.max_commutator,
                                 PropertyReport::kNoncommutingFlag);
  Json points = Json::array();
  CsvTable table{{"t", "s", "bound_a1", "bound_a2", "continuity_t", "continuity_s", "commutator_a1", "commutator_a2"},
                 {}};
  for (const auto& pt : rep.points) {
    points.push_back(Json{{"t", pt.t},
                          {"s", pt.s},
                          {"bound_a1", pt.bound_a1},
                          {"bound_a2", pt.bound_a2},
                          {"continuity_t", pt.continuity_t},
                          {"continuity_s", pt.continuity_s},
                          {"commutator_a1", pt.commutator_a1},
                          {"commutator_a2", pt.commutator_a2}});
    table.rows.push_back({format_double(pt.t), format_double(pt.s), format_double(pt.bound_a1),
                          format_double(pt.bound_a2), format_double(pt.continuity_t), format_double(pt.continuity_s),
                          format_double(pt.commutator_a1), format_double(pt.commutator_a2)});
  }
  cmd.payload()["shift"] = params_json(p);
  cmd.payload()["commuting_flag"] = fam.commuting;
  cmd.payload()["flagged_noncommuting"] = rep.flagged_noncommuting();
  cmd.payload()["max_bound"] = rep.max_bound;
  cmd.payload()["max_continuity"] = rep.max_continuity;
  cmd.payload()["max_commutator"] = rep.max_commutator;
  cmd.payload()["points"] = std::move(points);
  cmd.report().table = std::move(table);
}

GridFunction read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) usage("cannot open grid file " + path.string());
  try {
    return grid_from_json(Json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    usage("grid file " + path.string() + " is not valid JSON: " + e.what());
  }
}

void cmd_cole_hopf(Command& cmd) {
  const auto& cfg = cmd.cfg();
  if (!(cfg.t >= 0.0)) usage("cole-hopf needs --t >= 0");
  const GridFunction phi0 =
      cfg.grid_path ? read_grid_file(*cfg.grid_path) : heat_front(cfg.grid_points, cfg.length, 0.5 * cfg.length);
  cmd.report().params["mu"] = cfg.mu;
  cmd.report().params["n"] = phi0.n;
  cmd.report().params["L"] = phi0.length;
  cmd.report().params["grid"] = cfg.grid_path ? Json(cfg.grid_path->string()) : Json(nullptr);
  constexpr int kSteps = 10;
  CsvTable table{{"t", "identity_residual", "burgers_residual", "identity_residual_paper", "burgers_residual_paper"},
                 {}};
  Json series = Json::array();
  double worst_burgers = 0.0, worst_identity = 0.0, worst_ratio = 0.0;
  for (int k = 0; k <= kSteps; ++k) {
    const double t = cfg.t * k / kSteps;
    const auto classical = cole_hopf_report(phi0, cfg.mu, t, ColeHopfConvention::Classical);
    const auto paper = cole_hopf_report(phi0, cfg.mu, t, ColeHopfConvention::Paper);
    const auto phi = heat_evolve(phi0, cfg.mu, t);
    const auto uc = cole_hopf_transform(phi, cfg.mu, ColeHopfConvention::Classical);
    const auto up = cole_hopf_transform(phi, cfg.mu, ColeHopfConvention::Paper);
    const double ratio = (uc.values - std::sqrt(cfg.mu) * up.values).cwiseAbs().maxCoeff() /
                         std::max(uc.values.cwiseAbs().maxCoeff(), 1.0);
    worst_burgers = std::max(worst_burgers, classical.burgers_residual);
    worst_identity = std::max({worst_identity, classical.identity_residual, paper.identity_residual});
    worst_ratio = std::max(worst_ratio, ratio);
    series.push_back(Json{{"t", t},
                          {"identity_residual", classical.identity_residual},
                          {"burgers_residual", classical.burgers_residual},
                          {"heat_residual", classical.heat_residual},
                          {"identity_residual_paper", paper.identity_residual},
                          {"burgers_residual_paper", paper.burgers_residual}});
    table.rows.push_back({format_double(t), format_double(classical.identity_residual),
                          format_double(classical.burgers_residual), format_double(paper.identity_residual),
                          format_double(paper.burgers_residual)});
  }
  cmd.at_most("max Burgers residual (classical)", worst_burgers, 1e-6);
  cmd.at_most("max identity residual (both conventions)", worst_identity, 1e-11);
  cmd.at_most("conventions differ by sqrt(mu)", worst_ratio, 1e-13);
  cmd.payload()["series"] = std::move(series);
  cmd.report().table = std::move(table);
}

void cmd_striplog(Command& cmd) {
  const OperatorMatrix u = cmd.operator_u();
  cmd.payload()["input"] = matrix_to_json(u);
  try {
    const auto res = strip_double_log(u);
    cmd.at_most("exp(Log A) = A round trip", res.round_trip, 1e-9);
    cmd.payload()["inner"] = matrix_to_json(res.inner);
    cmd.payload()["outer"] = matrix_to_json(res.outer);
    cmd.payload()["inner_split"] = res.inner_split;
    cmd.payload()["outer_split"] = res.outer_split;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) throw;
    cmd.failed("strip_double_log", e.kind(), e.what());
  }
}

void cmd_suite(Command& cmd) {
  SuiteOptions opts;
  opts.seed = cmd.cfg().seed;
  opts.tolerance = cmd.cfg().tolerance;
  const auto result = run_acceptance(opts);
  Report rep = result.report(opts);
  CsvTable table{{"criterion", "title", "pass"}, {}};
  for (const auto& c : result.criteria)
    table.rows.push_back({std::to_string(c.id), c.title, c.pass() ? "true" : "false"});
  rep.table = std::move(table);
  cmd.report() = std::move(rep);
}

void cmd_families(Command& cmd) {
  Json list = Json::array();
  CsvTable table{{"kind", "example", "description"}, {}};
  for (const auto& e : family_catalogue()) {
    list.push_back(Json{{"kind", e.kind}, {"example", e.example}, {"description", e.description}});
    table.rows.push_back({e.kind, e.example, e.description});
  }
  cmd.payload()["families"] = std::move(list);
  cmd.report().table = std::move(table);
}

using Handler = void (*)(Command&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"logm", cmd_logm},           {"verify-gen", cmd_verify_gen}, {"equivalence", cmd_equivalence},
      {"formal-log", cmd_formal_log}, {"algebra", cmd_algebra},     {"cole-hopf", cmd_cole_hopf},
      {"striplog", cmd_striplog},   {"suite", cmd_suite},           {"families", cmd_families},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"logm",      "verify-gen", "equivalence", "formal-log", "algebra",
                                                 "cole-hopf", "striplog",   "suite",       "families"};
  return names;
}

Report run_command(const RunConfig& config) {
  const auto it = handlers().find(config.command);
  if (it == handlers().end()) usage("unknown command '" + config.command + "'");
  if (config.tolerance && !(*config.tolerance > 0.0)) usage("--tolerance must be positive");
  Command cmd(config);
  try {
    it->second(cmd);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) throw;
    cmd.failed(config.command, e.kind(), e.what());
  }
  return std::move(cmd.report());
}

std::string render(const Report& report, OutputFormat format) {
  return format == OutputFormat::Json ? report.to_json().dump(2) + "\n" : report.to_csv();
}

int exit_code(const Report& report) { return report.passed() ? 0 : 1; }

}  // namespace oplog
