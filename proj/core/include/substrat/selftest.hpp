#pragma once

#include <string>
#include <vector>

#include "substrat/report.hpp"

namespace substrat {

enum class SelftestLevel { Quick, Full };

struct SelftestOptions {
  SelftestLevel level = SelftestLevel::Quick;
  /// Fault injection: corrupt one Bernoulli coefficient fed to the Hankel
  /// check, which must then fail.
  bool tamper_bernoulli = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool skipped = false;
  /// Measured values next to their tolerances.
  Json measured = Json::object();
  std::string detail;
  /// Wall time; kept out of reports for byte-stable output.
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

/// Runs one acceptance criterion (1..10). Criterion 7 is skipped at the
/// quick level. Criterion 10 runs criteria 1..9 twice at the quick level and
/// compares the rendered reports.
CriterionResult run_criterion(int id, const SelftestOptions& opts);

struct SelftestReport {
  SelftestLevel level = SelftestLevel::Quick;
  std::vector<CriterionResult> criteria;

  bool all_passed() const;
};

SelftestReport run_selftest(const SelftestOptions& opts,
                            const std::vector<int>& ids = {});

Json to_json(const SelftestReport& report);

}  // namespace substrat
