#pragma once

// Test-only oracles, independent of the library evaluation paths they check.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "sle/driving_path.hpp"
#include "sle/loewner.hpp"

namespace test_oracle {

// Double-exponential (tanh-sinh) quadrature on (lo, hi); handles integrable
// endpoint singularities such as u^{a-1}(1-u)^{b-1} with a,b < 1.
inline double tanh_sinh(const std::function<double(double)>& f, double lo, double hi) {
  double c = 0.5 * (hi - lo);
  const double pi_half = 1.5707963267948966;
  const double h = 1.0 / 64.0;
  double sum = 0.0;
  for (double t = 0.0; t <= 6.5; t += h) {
    double s = pi_half * std::sinh(t);
    // Distance of tanh(s) from 1 in cancellation-free form.
    double delta2 = 2.0 / (1.0 + std::exp(2.0 * s));
    double ch = std::cosh(s);
    double w = pi_half * std::cosh(t) / (ch * ch);
    if (!(w > 0.0) || !std::isfinite(w) || delta2 == 0.0) break;
    double um = lo + c * delta2;  // node mirrored toward the left endpoint
    double up = hi - c * delta2;  // node toward the right endpoint
    double contrib = 0.0;
    if (um > lo && um < hi) contrib += f(um);
    if (t > 0.0 && up > lo && up < hi) contrib += f(up);
    sum += contrib * w;
  }
  return c * h * sum;
}

// Fine-grid replay of the Loewner flow for a driver given in closed form;
// used as the independent reference for coarse-grid point evolution.
struct FineEvolveResult {
  double g = 0.0;
  double log_deriv = 0.0;
  bool swallowed = false;
  double swallow_time = 0.0;
};

inline FineEvolveResult fine_evolve(const std::function<double(double)>& w, double z, double t_end,
                                    double dt, double eps_swallow = 1e-6) {
  FineEvolveResult out;
  double g = z, ld = 0.0, t = 0.0;
  while (t < t_end) {
    double h = std::min(dt, t_end - t);
    double wt = w(t);
    double zz = g - wt;
    ld += -0.5 * std::log1p(4.0 * h / (zz * zz));
    g = zz >= 0 ? wt + std::sqrt(zz * zz + 4.0 * h) : wt - std::sqrt(zz * zz + 4.0 * h);
    t += h;
    if (std::abs(g - w(t)) < eps_swallow) {
      out.swallowed = true;
      out.swallow_time = t;
      break;
    }
  }
  out.g = g;
  out.log_deriv = ld;
  return out;
}

// Proper-crossing test for a polyline; consecutive segments are allowed to
// share their joint vertex.
inline bool polyline_self_intersects(const std::vector<std::complex<double>>& pts,
                                     double tol = 1e-12) {
  auto orient = [](std::complex<double> a, std::complex<double> b, std::complex<double> c) {
    double v = (b.real() - a.real()) * (c.imag() - a.imag()) -
               (b.imag() - a.imag()) * (c.real() - a.real());
    return v;
  };
  auto seg_intersect = [&](std::complex<double> a, std::complex<double> b, std::complex<double> c,
                           std::complex<double> d) {
    double o1 = orient(a, b, c), o2 = orient(a, b, d);
    double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol)) &&
           ((o3 > tol && o4 < -tol) || (o3 < -tol && o4 > tol));
  };
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    for (size_t j = i + 2; j + 1 < pts.size(); ++j)
      if (seg_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1])) return true;
  return false;
}

}  // namespace test_oracle
