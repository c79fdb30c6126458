#include <gtest/gtest.h>

#include <cmath>

#include "oplog/commands.hpp"
#include "oplog/io.hpp"
#include "oplog/report.hpp"

using namespace oplog;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::EvaluationFailed;
}

}  // namespace

TEST(ParseComplex, AcceptedForms) {
  EXPECT_EQ(parse_complex("2"), Complex(2.0, 0.0));
  EXPECT_EQ(parse_complex("-0.5"), Complex(-0.5, 0.0));
  EXPECT_EQ(parse_complex("1+2i"), Complex(1.0, 2.0));
  EXPECT_EQ(parse_complex("3-4j"), Complex(3.0, -4.0));
  EXPECT_EQ(parse_complex("i"), Complex(0.0, 1.0));
  EXPECT_EQ(parse_complex("-i"), Complex(0.0, -1.0));
  EXPECT_EQ(parse_complex("-2.5i"), Complex(0.0, -2.5));
  EXPECT_EQ(parse_complex("1e-3+2e+1i"), Complex(1e-3, 20.0));
  EXPECT_EQ(parse_complex(" 1 - i "), Complex(1.0, -1.0));
}

TEST(ParseComplex, Rejects) {
  for (const char* bad : {"", "x", "1+zi", "1+2", "inf", "nan", "1..2"})
    EXPECT_EQ(kind_of([&] { parse_complex(bad); }), ErrorKind::InvalidInput) << bad;
}

TEST(MatrixJson, RoundTrip) {
  OperatorMatrix::Dense d(2, 2);
  d << Complex(1, 2), Complex(-3, 0.5), Complex(0, 0), Complex(1e-300, -7);
  const OperatorMatrix m(d);
  const auto j = matrix_to_json(m);
  EXPECT_EQ(j["n"], 2);
  EXPECT_EQ(j["entries"][0][1][0], -3.0);
  const auto back = matrix_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.dense(), d);
}

TEST(MatrixJson, Rejects) {
  const char* cases[] = {
      R"({"entries": [[[1, 0]]]})",
      R"({"n": 2, "entries": [[[1, 0], [0, 0]]]})",
      R"({"n": 2, "entries": [[[1, 0]], [[0, 0], [1, 0]]]})",
      R"({"n": 1, "entries": [[["nan", 0]]]})",
      R"({"n": 1, "entries": [[[1, 0, 0]]]})",
      R"({"n": 0, "entries": []})",
      R"([1, 2])",
  };
  for (const char* c : cases)
    EXPECT_EQ(kind_of([&] { matrix_from_json(Json::parse(c)); }), ErrorKind::InvalidInput) << c;
}

TEST(GridJson, RoundTripAndRejects) {
  const auto f = GridFunction::sample(4, 2.0, [](double x) { return Complex(x, -x); });
  const auto j = grid_to_json(f);
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(j["L"], 2.0);
  const auto back = grid_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.values, f.values);
  EXPECT_EQ(back.length, 2.0);
  EXPECT_EQ(kind_of([] { grid_from_json(Json::parse(R"({"n": 3, "L": 1, "values": [[1,0],[1,0]]})")); }),
            ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { grid_from_json(Json::parse(R"({"n": 2, "L": -1, "values": [[1,0],[1,0]]})")); }),
            ErrorKind::InvalidInput);
}

TEST(Report, SchemaAndPassLogic) {
  Report r;
  r.command = "demo";
  r.params["x"] = 1;
  r.expect_at_most("small", 1e-12, 1e-10);
  r.expect_at_least("large", 2.0, 1.0);
  r.require("held", true);
  EXPECT_TRUE(r.passed());
  r.expect_at_most("nan is never within tolerance", std::nan(""), 1.0);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.failures(), std::vector<std::string>{"nan is never within tolerance"});

  const auto j = r.to_json();
  auto it = j.begin();
  EXPECT_EQ(it.key(), "command");
  EXPECT_EQ((++it).key(), "params");
  EXPECT_EQ((++it).key(), "checks");
  EXPECT_EQ(j["checks"].size(), 4u);
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("name"));
    EXPECT_TRUE(c.contains("value"));
    EXPECT_TRUE(c.contains("tolerance"));
    EXPECT_TRUE(c.contains("pass"));
  }
  EXPECT_EQ(j["checks"][3]["value"], "nan");
}

TEST(Report, CsvQuotesAndTable) {
  Report r;
  r.command = "demo";
  r.expect_at_most("a, b", 0.5, 1.0);
  r.table = CsvTable{{"t", "v"}, {{"0", "1"}}};
  EXPECT_EQ(r.to_csv(), "name,value,tolerance,pass\n\"a, b\",0.5,1,true\n\nt,v\n0,1\n");
}

TEST(Commands, UsageErrorsThrowInvalidInput) {
  RunConfig cfg;
  cfg.command = "nope";
  EXPECT_EQ(kind_of([&] { run_command(cfg); }), ErrorKind::InvalidInput);
  cfg.command = "verify-gen";
  EXPECT_EQ(kind_of([&] { run_command(cfg); }), ErrorKind::InvalidInput);
  cfg.command = "logm";
  cfg.family_spec = "constant:B=rot";
  cfg.tolerance = -1.0;
  EXPECT_EQ(kind_of([&] { run_command(cfg); }), ErrorKind::InvalidInput);
}

TEST(Commands, LibraryErrorsBecomeFailedChecks) {
  RunConfig cfg;
  cfg.command = "logm";
  cfg.family_spec = "constant:B=rot";
  cfg.t = M_PI;  // U = −I
  const auto rep = run_command(cfg);
  EXPECT_EQ(exit_code(rep), 1);
  ASSERT_EQ(rep.failures().size(), 1u);
  EXPECT_NE(rep.failures()[0].find("SpectrumHitsBranchCut"), std::string::npos);
}

TEST(Commands, VerifyGenMeetsOracle) {
  RunConfig cfg;
  cfg.command = "verify-gen";
  cfg.family_spec = "constant:B=rot";
  cfg.t = 1.0;
  cfg.s = 0.5;
  const auto rep = run_command(cfg);
  EXPECT_EQ(exit_code(rep), 0);
  const auto j = rep.to_json();
  EXPECT_LE(j["oracle_errors"]["lemma1"].get<double>(), 1e-4);
  EXPECT_LE(j["oracle_errors"]["theorem1"].get<double>(), 1e-4);
  EXPECT_EQ(render(rep, OutputFormat::Json), render(run_command(cfg), OutputFormat::Json));
}
