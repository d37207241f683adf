#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "substrat/error.hpp"
#include "substrat/parallel.hpp"
#include "substrat/report.hpp"
#include "substrat/selftest.hpp"

using namespace substrat;

TEST(Report, FixedFormatting) {
  Json doc = {{"a", 0.1}, {"b", 2.0}, {"c", 1e-300}, {"n", 3}, {"s", "x"}};
  const std::string out = dump_report(doc);
  EXPECT_NE(out.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(out.find("2.0"), std::string::npos);
  EXPECT_NE(out.find("\"c\": 1e-300"), std::string::npos);
  EXPECT_NE(out.find("\"n\": 3"), std::string::npos);
  EXPECT_LT(out.find("\"a\""), out.find("\"s\""));
  EXPECT_EQ(out, dump_report(doc));
}

TEST(Report, RejectsNonFinite) {
  Json doc = {{"x", {1.0, std::numeric_limits<double>::quiet_NaN()}}};
  EXPECT_THROW(dump_report(doc), Error);
  EXPECT_THROW(finite(std::numeric_limits<double>::infinity(), "x"), Error);
}

TEST(Parallel, DeterministicSumIndependentOfThreads) {
  auto term = [](std::size_t i) { return std::sin(0.37 * static_cast<double>(i)) / (1.0 + i); };
  parallel::set_max_threads(1);
  const double a = parallel::deterministic_sum(100000, term, 0.0);
  parallel::set_max_threads(4);
  const double b = parallel::deterministic_sum(100000, term, 0.0);
  parallel::set_max_threads(1);
  EXPECT_EQ(a, b);
}

TEST(Selftest, CheapCriteriaPassAndTamperFails) {
  SelftestOptions opts;
  for (int id : {2, 4, 8}) {
    const CriterionResult r = run_criterion(id, opts);
    EXPECT_TRUE(r.passed) << id << " " << r.detail;
  }
  opts.tamper_bernoulli = true;
  const CriterionResult bad = run_criterion(1, opts);
  EXPECT_FALSE(bad.passed);
  const Json j = to_json(run_selftest(opts, {1}));
  EXPECT_EQ(j["criteria"][0]["status"], "FAIL");
  EXPECT_EQ(j["passed"], false);
  EXPECT_EQ(j.find("seconds"), j.end());
}
