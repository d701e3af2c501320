#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sle {

// P(K > lambda) for the Kolmogorov distribution (asymptotic two-sided).
inline double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

struct KsResult {
  double statistic = 0.0;
  size_t n = 0, m = 0;  // m == 0 for one-sample
  double p_value = 1.0;
  double threshold = 1.0;
  bool pass = true;
};

inline KsResult ks_one_sample(std::vector<double> samples,
                              const std::function<double(double)>& cdf, double threshold = 1.0) {
  if (samples.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(samples.begin(), samples.end());
  size_t n = samples.size();
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - double(i) / double(n)));
    d = std::max(d, std::abs(double(i + 1) / double(n) - f));
  }
  KsResult r;
  r.statistic = d;
  r.n = n;
  double sn = std::sqrt(double(n));
  r.p_value = kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
  r.threshold = threshold;
  r.pass = d <= threshold;
  return r;
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                              double threshold = 1.0) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  KsResult r;
  r.statistic = d;
  r.n = a.size();
  r.m = b.size();
  double ne = double(a.size()) * double(b.size()) / double(a.size() + b.size());
  double sn = std::sqrt(ne);
  r.p_value = kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
  r.threshold = threshold;
  r.pass = d <= threshold;
  return r;
}

struct SampleSummary {
  size_t n = 0;
  double mean = 0.0, sd = 0.0, se = 0.0, min = 0.0, max = 0.0, median = 0.0;
};

inline SampleSummary summarize(std::vector<double> xs) {
  SampleSummary s;
  if (xs.empty()) return s;
  s.n = xs.size();
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / double(s.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.sd = s.n > 1 ? std::sqrt(ss / double(s.n - 1)) : 0.0;
  s.se = s.sd / std::sqrt(double(s.n));
  std::sort(xs.begin(), xs.end());
  s.min = xs.front();
  s.max = xs.back();
  s.median = s.n % 2 ? xs[s.n / 2] : 0.5 * (xs[s.n / 2 - 1] + xs[s.n / 2]);
  return s;
}

inline double sample_variance(const std::vector<double>& xs) {
  SampleSummary s = summarize(xs);
  return s.sd * s.sd;
}

}  // namespace sle
