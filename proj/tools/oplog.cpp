#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oplog/commands.hpp"

namespace {

constexpr int kUsageError = 2;

int usage_error(const std::string& message) {
  std::cerr << "oplog: " << message << "\n";
  return kUsageError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator logarithms and generator recovery for evolution families"};
  app.set_help_all_flag("--help-all");

  oplog::RunConfig cfg;
  std::string action;
  std::string family, matrix, eta, nu, format = "json", output, grid;
  double tolerance = 0.0;

  app.add_option("command", cfg.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(oplog::command_names()));
  app.add_option("action", action, "Only 'list', for the families command");
  app.add_option("--family", family, "Family spec kind:key=value,... (see 'oplog families')");
  app.add_option("--matrix", matrix, "Matrix JSON file {\"n\", \"entries\"}");
  app.add_option("--t", cfg.t, "Evaluation time t")->capture_default_str();
  app.add_option("--s", cfg.s, "Initial time s")->capture_default_str();
  app.add_option("--eta", eta, "Resolvent parameter, e.g. 4 or -1+2i");
  app.add_option("--nu", nu, "Translation parameter");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--output", output, "Report path (stdout when omitted)");
  app.add_option("--seed", cfg.seed, "Seed for randomised inputs")->capture_default_str();
  auto* tol_opt = app.add_option("--tolerance", tolerance, "Override every upper-bound tolerance");
  app.add_option("--mu", cfg.mu, "Diffusivity for cole-hopf")->capture_default_str();
  app.add_option("--n", cfg.grid_points, "Grid points for cole-hopf")->capture_default_str();
  app.add_option("--L", cfg.length, "Period for cole-hopf")->capture_default_str();
  app.add_option("--grid", grid, "Initial data for cole-hopf as grid JSON {\"n\", \"L\", \"values\"}");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  if (!action.empty() && !(cfg.command == "families" && action == "list"))
    return usage_error("unexpected argument '" + action + "'");
  if (!family.empty()) cfg.family_spec = family;
  if (!matrix.empty()) cfg.matrix_path = matrix;
  if (!grid.empty()) cfg.grid_path = grid;
  if (!output.empty()) cfg.output_path = output;
  if (*tol_opt) cfg.tolerance = tolerance;
  cfg.output_format = format == "csv" ? oplog::OutputFormat::Csv : oplog::OutputFormat::Json;

  oplog::Report report;
  try {
    if (!eta.empty()) cfg.eta = oplog::parse_complex(eta);
    if (!nu.empty()) cfg.nu = oplog::parse_complex(nu);
    report = oplog::run_command(cfg);
  } catch (const oplog::Error& e) {
    return usage_error(e.what());
  }

  const std::string text = oplog::render(report, cfg.output_format);
  if (cfg.output_path) {
    std::ofstream out(*cfg.output_path, std::ios::binary);
    if (!out) return usage_error("cannot write " + cfg.output_path->string());
    out << text;
  } else {
    std::cout << text;
  }

  const int code = oplog::exit_code(report);
  if (code != 0) {
    std::string names;
    for (const auto& f : report.failures()) names += (names.empty() ? "" : "; ") + f;
    std::cerr << "oplog: " << cfg.command << " failed: " << names << "\n";
  }
  return code;
}
