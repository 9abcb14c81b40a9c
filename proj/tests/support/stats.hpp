#ifndef RECAL_TESTS_SUPPORT_STATS_HPP
#define RECAL_TESTS_SUPPORT_STATS_HPP

// Test-only statistics helpers: tail probabilities for the chi-square and
// normal checks the suites run against sampled data. Kept independent of the
// library under test.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace test_stats {

// Regularized upper incomplete gamma Q(a, x) by series / continued fraction.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad args");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a,x) series, return 1 - P.
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(a,x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - lg);
}

// Survival function of chi-square with k degrees of freedom.
inline double chi2_sf(double x, double k) { return gamma_q(k / 2.0, x / 2.0); }

// Two-sided normal tail.
inline double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

// Chi-square goodness-of-fit p-value of observed counts vs expected
// probabilities (expected counts must all be comfortably above ~5).
inline double chi2_gof_p(std::span<const std::uint64_t> counts,
                         std::span<const double> probabilities) {
  if (counts.size() != probabilities.size() || counts.empty())
    throw std::invalid_argument("chi2_gof_p: size mismatch");
  double total = 0.0;
  for (std::uint64_t c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probabilities[i];
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
  }
  return chi2_sf(stat, static_cast<double>(counts.size() - 1));
}

// Two-sample z-test on means (large samples).
inline double two_sample_p(std::span<const double> a, std::span<const double> b) {
  auto mean_var = [](std::span<const double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() - 1);
    return std::pair{mean, var};
  };
  const auto [ma, va] = mean_var(a);
  const auto [mb, vb] = mean_var(b);
  const double se = std::sqrt(va / static_cast<double>(a.size()) +
                              vb / static_cast<double>(b.size()));
  if (se == 0.0) return ma == mb ? 1.0 : 0.0;
  return normal_two_sided_p((ma - mb) / se);
}

}  // namespace test_stats

#endif
