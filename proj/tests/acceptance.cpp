// Acceptance run: one line per criterion, failing on wrong results or on a
// blown runtime budget.
#include <array>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "substrat/selftest.hpp"

namespace {

constexpr std::array<double, substrat::kCriterionCount> kBudgetSeconds = {
    5.0, 1.0, 120.0, 10.0, 30.0, 60.0, 600.0, 1.0, 60.0, 60.0};

}  // namespace

int main(int argc, char** argv) {
  substrat::SelftestOptions opts;
  opts.level = substrat::SelftestLevel::Full;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--level") == 0 && i + 1 < argc) {
      const std::string v = argv[++i];
      if (v == "quick") {
        opts.level = substrat::SelftestLevel::Quick;
      } else if (v != "full") {
        std::fprintf(stderr, "usage: %s [--level quick|full]\n", argv[0]);
        return 1;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--level quick|full]\n", argv[0]);
      return 1;
    }
  }

  int failures = 0;
  for (int id = 1; id <= substrat::kCriterionCount; ++id) {
    const auto start = std::chrono::steady_clock::now();
    const substrat::CriterionResult r = substrat::run_criterion(id, opts);
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double budget = kBudgetSeconds[id - 1];
    const char* status = "PASS";
    std::string why;
    if (r.skipped) {
      status = "SKIP";
    } else if (!r.passed) {
      status = "FAIL";
      why = r.detail.empty() ? "check failed" : r.detail;
    } else if (sec > budget) {
      status = "FAIL";
      why = "runtime budget exceeded";
    }
    if (std::strcmp(status, "FAIL") == 0) ++failures;
    std::printf("criterion %2d %-30s %s  %.3f s (budget %.0f s)%s%s\n", id, r.name.c_str(),
                status, sec, budget, why.empty() ? "" : "  ", why.c_str());
    std::printf("    measured: %s\n", r.measured.dump().c_str());
    std::fflush(stdout);
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
