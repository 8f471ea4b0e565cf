#include "memquote/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "memquote/error.hpp"

namespace memquote::stats {
namespace {

double log_sum_exp(const std::vector<double>& terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(terms.begin(), terms.end());
  if (std::isinf(top)) return top;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

double log_binomial_term(std::uint64_t i, std::uint64_t n, double log_p,
                         double log_q) {
  return log_choose(n, i) + static_cast<double>(i) * log_p +
         static_cast<double>(n - i) * log_q;
}

// P(X >= k), summed directly over the upper tail so small p-values keep
// their relative precision.
double binomial_upper_tail(std::uint64_t k, std::uint64_t n, double p) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  std::vector<double> terms;
  terms.reserve(n - k + 1);
  for (std::uint64_t i = k; i <= n; ++i) {
    terms.push_back(log_binomial_term(i, n, log_p, log_q));
  }
  return std::min(1.0, std::exp(log_sum_exp(terms)));
}

// Continued fraction for the incomplete beta, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  return h;
}

}  // namespace

double log_choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
         std::lgamma(nd - kd + 1.0);
}

double binomial_cdf(std::uint64_t k, std::uint64_t n, double p) {
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  std::vector<double> terms;
  terms.reserve(k + 1);
  for (std::uint64_t i = 0; i <= k; ++i) {
    terms.push_back(log_binomial_term(i, n, log_p, log_q));
  }
  return std::min(1.0, std::exp(log_sum_exp(terms)));
}

std::optional<TestResult> sign_test(std::uint64_t wins, std::uint64_t losses) {
  const std::uint64_t n = wins + losses;
  if (n == 0) return std::nullopt;
  const std::uint64_t k = std::min(wins, losses);
  TestResult r;
  r.test_name = "sign_test";
  r.n = n;
  r.statistic = static_cast<double>(wins);
  r.p_value = std::min(1.0, 2.0 * binomial_cdf(k, n, 0.5));
  return r;
}

TestResult binomial_test(std::uint64_t correct, std::uint64_t n, double chance) {
  if (correct > n) throw ConfigError("binomial_test: correct exceeds n");
  if (!(chance >= 0.0 && chance <= 1.0)) {
    throw ConfigError("binomial_test: chance outside [0, 1]");
  }
  TestResult r;
  r.test_name = "binomial_test";
  r.n = n;
  r.statistic = static_cast<double>(correct);
  r.p_value = binomial_upper_tail(correct, n, chance);
  return r;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("paired_t_test: length mismatch");
  if (a.size() < 2) throw ConfigError("paired_t_test: need at least two pairs");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean =
      std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double var = ss / static_cast<double>(n - 1);

  TestResult r;
  r.test_name = "paired_t_test";
  r.n = n;
  if (var == 0.0) {
    if (mean == 0.0) {
      r.statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.statistic = mean > 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.statistic = mean / std::sqrt(var / static_cast<double>(n));
  r.p_value = student_t_two_tailed(r.statistic, static_cast<double>(n - 1));
  return r;
}

std::string significance_stars(std::optional<double> p_value) {
  if (!p_value) return "";
  if (*p_value < 0.001) return "***";
  if (*p_value < 0.01) return "**";
  if (*p_value < 0.05) return "*";
  return "";
}

}  // namespace memquote::stats
