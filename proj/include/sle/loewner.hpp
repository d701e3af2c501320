#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sle/driving_path.hpp"

namespace sle {

using complex = std::complex<double>;

constexpr double kEpsSwallowDefault = 1e-6;
constexpr double kEpsImDefault = 1e-9;

// ---------------------------------------------------------------------------
// Elementary vertical-slit maps. One step solves dg = 2 dt / (g - w) exactly
// for a constant driver value w over a capacity interval of length h.
// ---------------------------------------------------------------------------

// Forward step for a real point; the sign of (g - w) is preserved.
inline double slit_forward_real(double g, double w, double h) {
  double z = g - w;
  double r = std::sqrt(z * z + 4.0 * h);
  return z >= 0.0 ? w + r : w - r;
}

// Forward step for a point of the closed upper half-plane.
inline complex slit_forward(complex g, double w, double h) {
  complex z = g - w;
  if (z.imag() == 0.0) return complex(slit_forward_real(g.real(), w, h), 0.0);
  complex s = std::sqrt(z * z + 4.0 * h);
  if (s.imag() < 0.0) s = -s;
  return w + s;
}

// log g' increment of one forward step at a real point.
inline double slit_dlog_deriv(double g, double w, double h) {
  double z = g - w;
  return -0.5 * std::log1p(4.0 * h / (z * z));
}

// Inverse step: maps H onto H minus a vertical slit of half-plane capacity h
// rooted at w. Boundary inputs inside the swallowed window land on the slit.
inline complex slit_inverse(complex z, double w, double h) {
  double two_sqrt_h = 2.0 * std::sqrt(h);
  if (z.imag() == 0.0) {
    double zr = z.real() - w;
    double disc = zr * zr - 4.0 * h;
    if (disc <= 0.0) return complex(w, std::sqrt(-disc));  // onto the slit
    double r = std::sqrt(disc);
    return complex(zr >= 0.0 ? w + r : w - r, 0.0);
  }
  complex zc = z - complex(w, 0.0);
  double mag2 = std::norm(zc);
  if (mag2 < 1e-30 * h) return complex(w, two_sqrt_h);
  complex s = zc * std::sqrt(1.0 - 4.0 * h / (zc * zc));
  if (s.imag() < 0.0) s = -s;  // guard rounding at the boundary
  return complex(w, 0.0) + s;
}

// ---------------------------------------------------------------------------
// Point evolution under a discretized driving function.
// ---------------------------------------------------------------------------

struct PointTrajectory {
  std::vector<complex> g;  // g_{t_k}(z) on the grid, up to and incl. swallowing
  bool swallowed = false;
  double swallow_time = std::numeric_limits<double>::infinity();
  size_t swallow_index = 0;  // grid index at which swallowing was detected
};

// Evolve a point of the closed half-plane along the chain. A real point is
// declared swallowed when |g - W| < eps_swallow, a complex one when its image
// comes within eps_swallow of the real axis (it has been encircled).
inline PointTrajectory evolve_point(complex z, const DrivingPath& path,
                                    double eps_swallow = kEpsSwallowDefault) {
  path.validate();
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("evolve_point: non-finite input");
  bool is_real = z.imag() == 0.0;
  if (is_real && std::abs(z.real() - path.values.front()) < eps_swallow)
    throw std::invalid_argument("evolve_point: real point coincides with the seed");

  PointTrajectory out;
  out.g.reserve(path.times.size());
  out.g.push_back(z);
  complex g = z;
  for (size_t k = 0; k + 1 < path.times.size(); ++k) {
    double h = path.step_length(k);
    double w = path.values[k];
    g = is_real ? complex(slit_forward_real(g.real(), w, h), 0.0) : slit_forward(g, w, h);
    out.g.push_back(g);
    double w_next = path.values[k + 1];
    bool dead = is_real ? std::abs(g.real() - w_next) < eps_swallow : g.imag() < eps_swallow;
    if (dead) {
      out.swallowed = true;
      out.swallow_index = k + 1;
      out.swallow_time = path.times[k + 1];
      break;
    }
  }
  return out;
}

struct DerivativeTrajectory {
  std::vector<double> g;          // g_{t_k}(z)
  std::vector<double> log_deriv;  // log g'_{t_k}(z)
  bool swallowed = false;
  double swallow_time = std::numeric_limits<double>::infinity();
  size_t swallow_index = 0;
};

// Track log g'_t(z) for a real point together with g_t(z).
inline DerivativeTrajectory evolve_derivative(double z, const DrivingPath& path,
                                              double eps_swallow = kEpsSwallowDefault) {
  path.validate();
  if (!std::isfinite(z)) throw std::invalid_argument("evolve_derivative: non-finite input");
  if (std::abs(z - path.values.front()) < eps_swallow)
    throw std::invalid_argument("evolve_derivative: point already swallowed");
  DerivativeTrajectory out;
  out.g.push_back(z);
  out.log_deriv.push_back(0.0);
  double g = z, ld = 0.0;
  for (size_t k = 0; k + 1 < path.times.size(); ++k) {
    double h = path.step_length(k);
    double w = path.values[k];
    ld += slit_dlog_deriv(g, w, h);
    g = slit_forward_real(g, w, h);
    out.g.push_back(g);
    out.log_deriv.push_back(ld);
    if (std::abs(g - path.values[k + 1]) < eps_swallow) {
      out.swallowed = true;
      out.swallow_index = k + 1;
      out.swallow_time = path.times[k + 1];
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inverse map evaluation and trace construction.
// ---------------------------------------------------------------------------

// f_{t_k}(z): compose the inverse slit steps k-1, ..., 0.
inline complex inverse_map(const DrivingPath& path, size_t index, complex z) {
  for (size_t k = index; k-- > 0;) {
    z = slit_inverse(z, path.values[k], path.step_length(k));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::runtime_error("inverse_map: overflow at step " + std::to_string(k));
  }
  return z;
}

// Real-axis pullback for footprint-edge points. These graze the slit tips at
// their absorb steps, where rounding can push the discriminant slightly
// negative; clamping keeps the pullback on the real line instead of letting
// the sqrt singularity amplify the noise into a spurious imaginary part.
inline double inverse_map_real(const DrivingPath& path, size_t index, double s) {
  for (size_t k = index; k-- > 0;) {
    double w = path.values[k];
    double zr = s - w;
    double disc = zr * zr - 4.0 * path.step_length(k);
    if (disc <= 0.0) {
      s = w;
      continue;
    }
    double r = std::sqrt(disc);
    s = zr >= 0.0 ? w + r : w - r;
  }
  return s;
}

struct TracePolyline {
  std::vector<complex> points;
  std::vector<double> times;
};

// Trace point gamma(t_k) = f_{t_k}(W_{t_k}). Cost is O(n^2 / stride): the
// stride subsamples which grid times get a trace point.
inline TracePolyline compute_trace(const DrivingPath& path, size_t stride = 1) {
  path.validate();
  if (stride == 0) stride = 1;
  TracePolyline tr;
  size_t n = path.steps();
  tr.points.reserve(n / stride + 2);
  for (size_t k = 0;; k += stride) {
    if (k > n) k = n;
    tr.points.push_back(inverse_map(path, k, complex(path.values[k], 0.0)));
    tr.times.push_back(path.times[k]);
    if (k == n) break;
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Footprint envelopes: images a_t <= W_t <= b_t of the leftmost/rightmost
// points of the hull on the real line. Between visits they flow with the
// chain; a visit of the tip to the real axis absorbs them into W.
// ---------------------------------------------------------------------------

struct EnvelopePair {
  std::vector<double> a, b;  // per grid index
};

inline EnvelopePair footprint_envelopes(const DrivingPath& path, size_t end_index) {
  EnvelopePair env;
  env.a.reserve(end_index + 1);
  env.b.reserve(end_index + 1);
  double a = path.values[0], b = path.values[0];
  env.a.push_back(a);
  env.b.push_back(b);
  for (size_t k = 0; k < end_index; ++k) {
    double w = path.values[k], h = path.step_length(k);
    double da = a - w, db = b - w;
    a = w - std::sqrt(da * da + 4.0 * h);
    b = w + std::sqrt(db * db + 4.0 * h);
    double w_next = path.values[k + 1];
    if (w_next < a) a = w_next;
    if (w_next > b) b = w_next;
    env.a.push_back(a);
    env.b.push_back(b);
  }
  return env;
}

// ---------------------------------------------------------------------------
// Hull boundary arcs.
// ---------------------------------------------------------------------------

struct BoundaryArc {
  std::vector<complex> points;
  std::optional<double> endpoint_real_left;
  std::optional<double> endpoint_real_right;
};

namespace detail {

// Grid on [a,b]: uniform interior plus geometric refinement (ratio 0.5)
// toward both endpoints, where the inverse map has sqrt singularities.
inline std::vector<double> refined_grid(double a, double b, size_t resolution, int depth) {
  std::vector<double> s;
  if (resolution < 2) resolution = 2;
  double len = b - a;
  for (size_t j = 0; j <= resolution; ++j) s.push_back(a + len * double(j) / double(resolution));
  double frac = 1.0 / double(resolution);
  for (int d = 1; d <= depth; ++d) {
    frac *= 0.5;
    s.push_back(a + len * frac);
    s.push_back(b - len * frac);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace detail

// Pull back a real interval [a,b] of image coordinates through f_t. The
// interval must lie inside the swallowed window [a_t, b_t] of the chain.
inline BoundaryArc hull_boundary_arc(const DrivingPath& path, double t, double a, double b,
                                     size_t resolution = 64, int refine_depth = 20) {
  path.validate();
  if (!(a <= b)) throw std::invalid_argument("hull_boundary_arc: need a <= b");
  size_t idx = path.index_at(t);
  if (std::abs(path.times[idx] - t) > 1e-12 * std::max(1.0, std::abs(t)))
    throw std::invalid_argument("hull_boundary_arc: t not on the time grid");
  EnvelopePair env = footprint_envelopes(path, idx);
  double slack = 1e-12 * std::max({1.0, std::abs(env.a[idx]), std::abs(env.b[idx])});
  if (a < env.a[idx] - slack || b > env.b[idx] + slack)
    throw std::invalid_argument("hull_boundary_arc: interval outside the swallowed range");
  BoundaryArc arc;
  for (double s : detail::refined_grid(a, b, resolution, refine_depth))
    arc.points.push_back(inverse_map(path, idx, complex(s, 0.0)));
  const double eps_land = 1e-7;
  if (!arc.points.empty()) {
    if (std::abs(arc.points.front().imag()) < eps_land * std::max(1.0, std::abs(arc.points.front().real())))
      arc.endpoint_real_left = arc.points.front().real();
    if (std::abs(arc.points.back().imag()) < eps_land * std::max(1.0, std::abs(arc.points.back().real())))
      arc.endpoint_real_right = arc.points.back().real();
  }
  return arc;
}

}  // namespace sle
