#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sle/driver.hpp"
#include "sle/loewner.hpp"
#include "sle/params.hpp"

namespace sle {

// ---------------------------------------------------------------------------
// Replay classification of real points along a stored driving function.
// A point that gets enclosed shows up as |g - W| collapsing below eps_class
// during the closing pinch (or, on a coarse step, as a sign flip of g - W,
// which the true flow never does).
// ---------------------------------------------------------------------------

struct ReplayResult {
  bool swallowed = false;
  size_t index = 0;     // grid index of detection
  double time = 0.0;
  double min_absZ = std::numeric_limits<double>::infinity();
  double final_Z = 0.0;  // g - W at end_index (or at detection)
};

inline ReplayResult replay_real_point(const DrivingPath& path, double x, size_t end_index,
                                      double eps_class) {
  ReplayResult out;
  // Track Z = g - W in relative coordinates with the exact recorded driver
  // increments: absolute g would lose everything below eps(|W|) deep in a
  // pinch, where the classification has to look.
  double z = x - path.values[0];
  double sign0 = z;
  for (size_t k = 0; k < end_index; ++k) {
    double flow = std::sqrt(z * z + 4.0 * path.step_length(k));
    z = (z >= 0.0 ? flow : -flow) - path.step_increment(k);
    double az = std::abs(z);
    if (az < out.min_absZ) out.min_absZ = az;
    bool flipped = (z > 0.0) != (sign0 > 0.0);
    if (az < eps_class || flipped) {
      out.swallowed = true;
      out.index = k + 1;
      out.time = path.times[k + 1];
      out.final_Z = z;
      return out;
    }
  }
  out.index = end_index;
  out.time = path.times[end_index];
  out.final_Z = z;
  return out;
}

// g_{t_end}(x) - W_{t_end} for an alive point (no swallow checks).
inline double replay_value(const DrivingPath& path, double x, size_t end_index) {
  double z = x - path.values[0];
  for (size_t k = 0; k < end_index; ++k) {
    double flow = std::sqrt(z * z + 4.0 * path.step_length(k));
    z = (z >= 0.0 ? flow : -flow) - path.step_increment(k);
  }
  return z + path.values[end_index];
}

// ---------------------------------------------------------------------------
// Geometric observables of a chordal run in which the marked point 1 is
// watched until it is swallowed.
// ---------------------------------------------------------------------------

struct GeometryOptions {
  double eps_class = 1e-12;  // pinch classification threshold for replays
  double eps_D = 1e-4;       // bisection tolerance, in u = 1/x coordinates
  double delta_rel = 1e-4;   // relative capacity back-off before the stop time
  int max_doublings = 60;    // bracket search cap
};

struct SwallowReport {
  bool ok = false;
  std::string drop_reason;
  uint64_t seed = 0, stream = 0;
  double tau1 = 0.0;
  std::optional<double> D;  // leftmost visited point on (1, inf), 4<kappa<8
  std::optional<double> G;  // leftmost visited point on (-inf, 0), kappa>=8
  std::optional<double> E;  // real foot on (0,1) of the arc straddling 1
  std::optional<double> tauG;
  std::optional<double> R;  // right foot on (0,1) of the hull at tauG
  double tip_re = 0.0, tip_im = 0.0;
};

namespace detail {

// Grid index backed off a small multiple of tau before the stop index.
inline size_t backoff_index(const DrivingPath& path, size_t end_index, double delta_rel) {
  double t_end = path.times[end_index];
  size_t idx = path.index_at(t_end * (1.0 - delta_rel));
  if (idx >= end_index) idx = end_index > 0 ? end_index - 1 : 0;
  if (idx < 1) idx = 1;
  return idx;
}

// Last index <= limit at which the envelope was absorbed into the driver,
// i.e. the tip visited a new extreme point of the real footprint. The
// pullback of W there is exactly that physical point and is well conditioned
// (unlike pullbacks taken inside a closing pinch).
inline std::optional<size_t> last_absorb_index(const std::vector<double>& env,
                                               const DrivingPath& path, size_t limit) {
  for (size_t k = limit + 1; k-- > 1;)
    if (env[k] == path.values[k]) return k;
  return std::nullopt;
}

}  // namespace detail

// Bisection for D = sup{x > 1 : x swallowed together with 1}, run in the
// coordinate u = 1/x where the swallowing law lives on (0,1).
inline std::optional<double> bisect_D(const DrivingPath& path, size_t end_index,
                                      const GeometryOptions& opt) {
  double x_hi = 2.0;
  int tries = 0;
  while (replay_real_point(path, x_hi, end_index, opt.eps_class).swallowed) {
    x_hi *= 2.0;
    if (++tries > opt.max_doublings) return std::nullopt;
  }
  double u_lo = 1.0 / x_hi;  // not swallowed side
  double u_hi = 1.0;         // swallowed side (x = 1 itself)
  // The swallowing law has integrable singularities at both ends of (0,1);
  // refine to a tolerance relative to the distance from the endpoints so the
  // extreme tails are resolved too.
  for (int it = 0; it < 80; ++it) {
    double u_mid = 0.5 * (u_lo + u_hi);
    double local = std::min(1.0, 2.0 * std::min(u_mid, 1.0 - u_mid));
    if (u_hi - u_lo <= std::max(1e-9, opt.eps_D * local)) break;
    if (replay_real_point(path, 1.0 / u_mid, end_index, opt.eps_class).swallowed)
      u_hi = u_mid;
    else
      u_lo = u_mid;
  }
  return 2.0 / (u_lo + u_hi);
}

// One full path of chordal SLE_kappa, 4 < kappa < 8: swallowing time of 1,
// the landing point D, and the real foot E of the boundary arc straddling 1
// (the rightmost point of the hull footprint just before tau_1).
inline SwallowReport find_D_one_path(double kappa, const PathConfig& cfg_in,
                                     const GeometryOptions& opt = {}, bool want_E = true) {
  SwallowReport rep;
  rep.seed = cfg_in.seed;
  rep.stream = cfg_in.stream;
  SleParams params;
  params.kappa = kappa;
  params.force_points = {{1.0, 0.0, false, "one"}};
  PathConfig cfg = cfg_in;
  cfg.stop = {StopKind::FirstSwallow, {0}};
  cfg.track_envelopes = true;
  cfg.record_path = true;

  DriverResult dr = sample_driver(params, cfg);
  if (!dr.stop_satisfied || dr.final_state.points[0].alive) {
    rep.drop_reason = "no_swallow";
    return rep;
  }
  size_t end = dr.path.steps();
  rep.tau1 = dr.path.times[end];

  complex tip = inverse_map(dr.path, end, complex(dr.path.values[end], 0.0));
  rep.tip_re = tip.real();
  rep.tip_im = tip.imag();

  auto d = bisect_D(dr.path, end, opt);
  if (!d) {
    rep.drop_reason = "D_bracket";
    return rep;
  }
  rep.D = *d;

  if (want_E) {
    size_t idx = detail::backoff_index(dr.path, end, opt.delta_rel);
    auto ja = detail::last_absorb_index(dr.env_b, dr.path, idx);
    if (!ja) {
      rep.drop_reason = "E_no_visit";
      return rep;
    }
    double e = inverse_map_real(dr.path, *ja, dr.path.values[*ja]);
    if (!(e > 0.0 && e < 1.0)) {
      rep.drop_reason = "E_outside";
      return rep;
    }
    rep.E = e;
  }
  rep.ok = true;
  return rep;
}

// One full path of chordal SLE_kappa, kappa >= 8: swallowing time of 1, the
// leftmost visited point G before tau_1 with its visit time tau_G, and the
// right foot R of the hull at tau_G.
inline SwallowReport find_G_one_path(double kappa, const PathConfig& cfg_in,
                                     const GeometryOptions& opt = {}, bool want_R = true) {
  SwallowReport rep;
  rep.seed = cfg_in.seed;
  rep.stream = cfg_in.stream;
  SleParams params;
  params.kappa = kappa;
  params.force_points = {{1.0, 0.0, false, "one"}};
  PathConfig cfg = cfg_in;
  cfg.stop = {StopKind::FirstSwallow, {0}};
  cfg.track_envelopes = true;
  cfg.record_path = true;

  DriverResult dr = sample_driver(params, cfg);
  if (!dr.stop_satisfied || dr.final_state.points[0].alive) {
    rep.drop_reason = "no_swallow";
    return rep;
  }
  size_t end = dr.path.steps();
  rep.tau1 = dr.path.times[end];

  // G and tau_G: the last left-extreme visit of the footprint before tau_1.
  size_t idx = detail::backoff_index(dr.path, end, opt.delta_rel);
  auto jg = detail::last_absorb_index(dr.env_a, dr.path, idx);
  if (!jg) {
    rep.drop_reason = "G_no_visit";
    return rep;
  }
  double gpt = inverse_map_real(dr.path, *jg, dr.path.values[*jg]);
  if (!(gpt < 0.0)) {
    rep.drop_reason = "G_outside";
    return rep;
  }
  rep.G = gpt;
  rep.tauG = dr.path.times[*jg];

  if (want_R) {
    // Right foot of the hull at tau_G: the last right-extreme visit before it.
    auto jr = detail::last_absorb_index(dr.env_b, dr.path, *jg);
    if (!jr) {
      rep.drop_reason = "R_no_visit";
      return rep;
    }
    double rpt = inverse_map_real(dr.path, *jr, dr.path.values[*jr]);
    if (!(rpt > 0.0 && rpt < 1.0)) {
      rep.drop_reason = "R_outside";
      return rep;
    }
    rep.R = rpt;
  }
  rep.ok = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Boundary arcs of the stopped hulls.
// ---------------------------------------------------------------------------

// The arc seen by the point 1 just before its swallowing time: pull back the
// image interval [W_t, g_t(1)) at t = tau1 (1 - delta). Returns the arc from
// the trace tip to its real landing point E.
inline std::pair<BoundaryArc, double> arc_straddling_one(const DrivingPath& path, double tau1,
                                                         size_t resolution = 64,
                                                         double delta_rel = 1e-4,
                                                         double eps_swallow = kEpsSwallowDefault) {
  path.validate();
  size_t end = path.index_at(tau1);
  size_t idx = detail::backoff_index(path, end, delta_rel);
  double w = path.values[idx];
  PointTrajectory traj = evolve_point(complex(1.0, 0.0), path, eps_swallow);
  if (traj.swallowed && traj.swallow_index <= idx)
    throw std::runtime_error("arc_straddling_one: point 1 already swallowed at the back-off time");
  if (traj.g.size() <= idx) throw std::runtime_error("arc_straddling_one: trajectory too short");
  double g1 = traj.g[idx].real();
  if (!(g1 > w)) throw std::runtime_error("arc_straddling_one: empty image interval");

  auto land_real = [&](complex p) {
    return std::abs(p.imag()) <= 1e-6 * std::max(1.0, std::abs(p.real()));
  };
  // Coarse sweep from the tip toward g_t(1), then refine the lift-off point.
  std::vector<double> s_grid = detail::refined_grid(w, g1, resolution, 20);
  BoundaryArc arc;
  double e_value = std::numeric_limits<double>::quiet_NaN();
  size_t first_real = s_grid.size();
  std::vector<complex> images(s_grid.size());
  for (size_t j = 0; j < s_grid.size(); ++j) images[j] = inverse_map(path, idx, complex(s_grid[j], 0.0));
  for (size_t j = 0; j + 1 < s_grid.size(); ++j) {
    if (land_real(images[j]) && land_real(images[j + 1]) && j > 0) {
      first_real = j;
      break;
    }
  }
  double s_lo = first_real < s_grid.size() ? s_grid[first_real - 1] : s_grid[s_grid.size() - 2];
  double s_hi = first_real < s_grid.size() ? s_grid[first_real] : s_grid.back();
  for (int it = 0; it < 60 && s_hi - s_lo > 1e-14 * std::max(1.0, std::abs(s_hi)); ++it) {
    double mid = 0.5 * (s_lo + s_hi);
    if (land_real(inverse_map(path, idx, complex(mid, 0.0))))
      s_hi = mid;
    else
      s_lo = mid;
  }
  e_value = inverse_map(path, idx, complex(s_hi, 0.0)).real();
  for (size_t j = 0; j < s_grid.size() && s_grid[j] < s_lo; ++j) arc.points.push_back(images[j]);
  arc.points.push_back(complex(e_value, 0.0));
  arc.endpoint_real_right = e_value;  // the arc runs tip -> E; only E is on R
  return {arc, e_value};
}

// Boundary of the hull stopped at tau_G: pull back the full swallowed image
// window [a_t, b_t]. An arc between ~G and a point of (0,1).
inline BoundaryArc boundary_of_K_tauG(const DrivingPath& path, double tauG,
                                      size_t resolution = 128, double delta_rel = 1e-4) {
  path.validate();
  size_t end = path.index_at(tauG);
  size_t idx = detail::backoff_index(path, end, delta_rel);
  EnvelopePair env = footprint_envelopes(path, idx);
  return hull_boundary_arc(path, path.times[idx], env.a[idx], env.b[idx], resolution, 20);
}

}  // namespace sle
