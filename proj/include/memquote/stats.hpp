#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace memquote::stats {

struct TestResult {
  std::string test_name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::uint64_t n = 0;
};

/// Exact two-tailed sign test at p = 1/2. Ties must be excluded by the
/// caller. Returns nullopt when wins + losses == 0.
std::optional<TestResult> sign_test(std::uint64_t wins, std::uint64_t losses);

/// One-sided exact binomial test: P(X >= correct) for X ~ Bin(n, chance).
TestResult binomial_test(std::uint64_t correct, std::uint64_t n, double chance);

/// Two-tailed paired t-test on a - b. All-zero differences give p = 1;
/// zero variance with nonzero mean gives p = 0 and an infinite statistic.
TestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// log C(n, k).
double log_choose(std::uint64_t n, std::uint64_t k);

/// P(X <= k) for X ~ Bin(n, p), summed in log space.
double binomial_cdf(std::uint64_t k, std::uint64_t n, double p);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-tailed p-value of Student's t with `df` degrees of freedom.
double student_t_two_tailed(double t, double df);

/// "***" for p < .001, "**" for p < .01, "*" for p < .05, else "".
std::string significance_stars(std::optional<double> p_value);

}  // namespace memquote::stats
