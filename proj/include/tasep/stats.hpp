#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace tasep::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean: empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("variance: need at least two values");
  double m = mean(x), s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Lag-h sample autocorrelation with the usual 1/n normalization.
inline double autocorrelation(std::span<const double> x, std::size_t h) {
  if (x.size() <= h + 1) throw std::invalid_argument("autocorrelation: series too short");
  double m = mean(x), den = 0, num = 0;
  for (double v : x) den += (v - m) * (v - m);
  if (den == 0) return 0;
  for (std::size_t i = 0; i + h < x.size(); ++i) num += (x[i] - m) * (x[i + h] - m);
  return num / den;
}

// Lag-h sample cross-correlation corr(x_i, y_{i+h}).
inline double cross_correlation(std::span<const double> x, std::span<const double> y, std::size_t h) {
  if (x.size() != y.size() || x.size() <= h + 1) throw std::invalid_argument("cross_correlation: bad lengths");
  double mx = mean(x), my = mean(y), sx = 0, sy = 0, num = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += (x[i] - mx) * (x[i] - mx);
    sy += (y[i] - my) * (y[i] - my);
  }
  if (sx == 0 || sy == 0) return 0;
  for (std::size_t i = 0; i + h < x.size(); ++i) num += (x[i] - mx) * (y[i + h] - my);
  return num / std::sqrt(sx * sy);
}

// P(K > lambda) for the Kolmogorov distribution.
inline double kolmogorov_sf(double lambda) {
  if (lambda <= 0) return 1;
  if (lambda < 0.3) {
    // Small-lambda form converges faster: P(K <= l) = sqrt(2 pi)/l sum exp(-(2k-1)^2 pi^2 / (8 l^2)).
    double s = 0;
    for (int k = 1; k <= 50; ++k) {
      double t = (2.0 * k - 1) * std::numbers::pi / lambda;
      s += std::exp(-t * t / 8);
    }
    return std::clamp(1 - std::sqrt(2 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 1 : -1) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2 * s, 0.0, 1.0);
}

struct TestResult {
  double statistic = 0;
  double p_value = 1;
  double dof = 0;  // where meaningful
};

// One-sample KS against cdf. Ties are grouped so atoms in the target law are handled exactly:
// at each distinct value v the empirical right limit is compared with cdf(v) and the left limit
// with cdf_left(v) (defaults to cdf, i.e. a continuous target).
inline TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf,
                                const std::function<double(double)>& cdf_left = {}) {
  if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(xs.begin(), xs.end());
  auto n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size();) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    double fl = cdf_left ? cdf_left(xs[i]) : cdf(xs[i]);
    d = std::max({d, std::abs(cdf(xs[i]) - static_cast<double>(j) / n), std::abs(fl - static_cast<double>(i) / n)});
    i = j;
  }
  double sn = std::sqrt(n);
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d), 0};
}

inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() || j < b.size()) {
    double v = std::min(i < a.size() ? a[i] : std::numeric_limits<double>::infinity(),
                        j < b.size() ? b[j] : std::numeric_limits<double>::infinity());
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d), 0};
}

inline double chi_square_sf(double x, double dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_sf: dof must be positive");
  if (x <= 0) return 1;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
}

// Pearson goodness of fit. dof = bins - 1 - fitted.
inline TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                                 std::size_t fitted = 0) {
  if (observed.size() != expected.size() || observed.size() < 2 + fitted) {
    throw std::invalid_argument("chi_square_gof: bad bins");
  }
  double s = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0)) throw std::invalid_argument("chi_square_gof: expected counts must be positive");
    s += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  }
  double dof = static_cast<double>(observed.size() - 1 - fitted);
  return {s, chi_square_sf(s, dof), dof};
}

// Merge adjacent bins from the right until every expected count reaches min_expected.
inline void merge_small_bins(std::vector<double>& observed, std::vector<double>& expected, double min_expected = 5) {
  std::vector<double> o, e;
  double co = 0, ce = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    co += observed[i];
    ce += expected[i];
    if (ce >= min_expected) {
      o.push_back(co), e.push_back(ce);
      co = ce = 0;
    }
  }
  if (ce > 0 || co > 0) {
    if (e.empty()) {
      o.push_back(co), e.push_back(ce);
    } else {
      o.back() += co, e.back() += ce;
    }
  }
  observed = std::move(o);
  expected = std::move(e);
}

// Two-sided one-sample t test of mean(x) == mu0.
inline TestResult t_test(std::span<const double> x, double mu0 = 0) {
  if (x.size() < 2) throw std::invalid_argument("t_test: need at least two values");
  double n = static_cast<double>(x.size());
  double m = mean(x), v = variance(x);
  if (v == 0) return {0, m == mu0 ? 1.0 : 0.0, n - 1};
  double t = (m - mu0) / std::sqrt(v / n);
  boost::math::students_t dist(n - 1);
  double p = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return {t, std::min(1.0, p), n - 1};
}

inline TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: length mismatch");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return t_test(d);
}

// Two-sided z test of an observed count against Binomial(n, p).
inline TestResult binomial_z_test(double successes, double n, double p) {
  if (!(n > 0) || !(p > 0 && p < 1)) throw std::invalid_argument("binomial_z_test: bad parameters");
  double z = (successes - n * p) / std::sqrt(n * p * (1 - p));
  double pv = 2 * boost::math::cdf(boost::math::complement(boost::math::normal(), std::abs(z)));
  return {z, std::min(1.0, pv), 0};
}

inline double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

inline double bonferroni(double alpha, std::size_t m) { return m == 0 ? alpha : alpha / static_cast<double>(m); }

}  // namespace tasep::stats
