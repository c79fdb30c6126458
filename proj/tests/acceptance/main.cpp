// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "oplog/acceptance.hpp"

int main(int argc, char** argv) {
  oplog::SuiteOptions opts;
  if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);
  const auto result = oplog::run_acceptance(opts);
  for (const auto& c : result.criteria) {
    std::printf("criterion %2d: %s  %s (%.2f s)\n", c.id, c.pass() ? "PASS" : "FAIL", c.title.c_str(), c.seconds);
    for (const auto& k : c.checks)
      if (!k.pass)
        std::printf("    failed: %s  value=%s tolerance=%s\n", k.name.c_str(), oplog::format_double(k.value).c_str(),
                    oplog::format_double(k.tolerance).c_str());
  }
  std::printf("total %.2f s, %s\n", result.seconds, result.passed() ? "all criteria pass" : "some criteria fail");
  return result.passed() ? 0 : 1;
}
