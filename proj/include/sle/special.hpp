#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace sle {

inline double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("log_beta: need a,b > 0");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double beta_function(double a, double b) { return std::exp(log_beta(a, b)); }

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz).
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIt = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIt; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("betacf: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a,b).
inline double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("reg_inc_beta: need a,b > 0");
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("reg_inc_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::betacf(a, b, x) / a;
  }
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                   detail::betacf(b, a, 1.0 - x) / b;
}

// Inverse of I_x(a,b) in x, by bisection (monotone, fully robust).
inline double inv_reg_inc_beta(double a, double b, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("inv_reg_inc_beta: p outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (reg_inc_beta(a, b, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace detail {

inline bool near_nonpositive_integer(double c, double tol = 1e-10) {
  if (c > 0.5) return false;
  double r = std::round(c);
  return r <= 0.0 && std::abs(c - r) < tol;
}

inline double hyp2f1_series(double a, double b, double c, double u, double tol = 1e-14) {
  if (near_nonpositive_integer(c)) {
    // Only usable if the series terminates first.
    double ra = std::round(a), rb = std::round(b);
    bool term_a = std::abs(a - ra) < 1e-13 && ra <= 0.0 && ra > c;
    bool term_b = std::abs(b - rb) < 1e-13 && rb <= 0.0 && rb > c;
    if (!term_a && !term_b)
      throw std::runtime_error("hyp2f1: parameter c at a non-positive integer");
  }
  double term = 1.0, sum = 1.0;
  constexpr int kMaxTerms = 400000;
  for (int n = 0; n < kMaxTerms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * u;
    sum += term;
    if (term == 0.0) return sum;
    if (n > 8 && std::abs(term) < tol * std::abs(sum)) return sum;
  }
  throw std::runtime_error("hyp2f1: series did not converge");
}

}  // namespace detail

// Gauss hypergeometric 2F1(a,b;c;u) for real parameters on u in [0,1).
// Power series up to u = 1/2; for larger u the standard u <-> 1-u connection
// when its gamma coefficients are regular, otherwise the direct series (which
// still converges absolutely on (0,1), just more slowly).
inline double hyp2f1(double a, double b, double c, double u, double tol = 1e-14) {
  if (!(u >= 0.0) || u >= 1.0) throw std::invalid_argument("hyp2f1: u outside [0,1)");
  if (u <= 0.5) return detail::hyp2f1_series(a, b, c, u, tol);
  double cab = c - a - b;
  double r = std::round(cab);
  if (std::abs(cab - r) > 1e-8 && !detail::near_nonpositive_integer(a + b - c + 1.0) &&
      !detail::near_nonpositive_integer(cab + 1.0)) {
    double g1 = std::tgamma(c) * std::tgamma(cab) / (std::tgamma(c - a) * std::tgamma(c - b));
    double g2 = std::tgamma(c) * std::tgamma(-cab) / (std::tgamma(a) * std::tgamma(b));
    double v = 1.0 - u;
    return g1 * detail::hyp2f1_series(a, b, a + b - c + 1.0, v, tol) +
           g2 * std::pow(v, cab) * detail::hyp2f1_series(c - a, c - b, cab + 1.0, v, tol);
  }
  // Degenerate connection coefficients: fall back to the direct series.
  return detail::hyp2f1_series(a, b, c, u, tol);
}

// Adaptive Simpson quadrature; enough for the smooth interior integrands here.
namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double lo, double hi, double flo,
                          double fmid, double fhi, double whole, double tol, int depth) {
  double mid = 0.5 * (lo + hi);
  double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
  double flm = f(lm), frm = f(rm);
  double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double lo, double hi,
                        double tol = 1e-11, int depth = 48) {
  if (lo == hi) return 0.0;
  double mid = 0.5 * (lo + hi);
  double flo = f(lo), fmid = f(mid), fhi = f(hi);
  double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return detail::simpson_rec(f, lo, hi, flo, fmid, fhi, whole, tol, depth);
}

}  // namespace sle
