#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sle/driving_path.hpp"
#include "sle/params.hpp"
#include "sle/rng.hpp"

namespace sle {

// dt = min(dt_base, c_adapt * min_i Z_i^2); dt_base when nothing is tracked.
inline double adaptive_dt(const DriverState& state, double dt_base, double c_adapt = 0.01) {
  double m = state.min_alive_absZ();
  if (!std::isfinite(m)) return dt_base;
  return std::min(dt_base, c_adapt * m * m);
}

namespace detail {

inline double policy_dt(const DriverState& state, const PathConfig& cfg) {
  double dt = cfg.dt_base;
  switch (cfg.dt_policy) {
    case DtPolicy::Fixed:
      break;
    case DtPolicy::Adaptive:
      dt = adaptive_dt(state, cfg.dt_base, cfg.c_adapt);
      break;
    case DtPolicy::AdaptiveScaled: {
      double m = state.min_alive_absZ();
      if (!std::isfinite(m)) break;
      double rel = m / cfg.z_ref;
      double cap = cfg.dt_base * std::max(1.0, rel * rel);
      dt = std::min(cap, cfg.c_adapt * m * m);
      break;
    }
  }
  if (cfg.t_grid_growth > 0.0)
    dt = std::min(dt, std::max(cfg.dt_init_floor, cfg.t_grid_growth * state.t));
  return dt;
}

// One Euler-Maruyama update. Returns false (discard `out`) if some alive Z
// would cross or reach zero.
inline bool try_em_step(const DriverState& s, double kappa, double dt, double gaussian,
                        DriverState& out) {
  out = s;
  double drift = 0.0;
  for (const auto& p : s.points)
    if (p.alive && !p.at_infinity) drift -= p.rho / p.Z;
  double dw = std::sqrt(kappa * dt) * gaussian + drift * dt;
  out.w = s.w + dw;
  out.t = s.t + dt;
  bool ok = true;
  for (size_t i = 0; i < s.points.size(); ++i) {
    auto& p = out.points[i];
    if (!p.alive || p.at_infinity) continue;
    double z_old = s.points[i].Z;
    p.Z = z_old + 2.0 * dt / z_old - dw;
    p.log_gprime = s.points[i].log_gprime - 2.0 * dt / (z_old * z_old);
    if (p.Z == 0.0 || (p.Z > 0.0) != (z_old > 0.0)) ok = false;
  }
  return ok;
}

// Splitting update used inside the sampling loop: the driver increment is the
// Euler-Maruyama one, but the marked points advance by the exact constant-
// driver flow over the step. This is bit-consistent with the vertical-slit
// chain that all replay and inverse-map machinery evaluates, so a swallowing
// seen by the chain cannot slip past the driver's own bookkeeping.
inline bool try_slit_step(const DriverState& s, double kappa, double dt, double gaussian,
                          DriverState& out, double* dw_out = nullptr) {
  out = s;
  double drift = 0.0;
  for (const auto& p : s.points)
    if (p.alive && !p.at_infinity) drift -= p.rho / p.Z;
  double dw = std::sqrt(kappa * dt) * gaussian + drift * dt;
  if (dw_out) *dw_out = dw;
  out.w = s.w + dw;
  out.t = s.t + dt;
  bool ok = true;
  for (size_t i = 0; i < s.points.size(); ++i) {
    auto& p = out.points[i];
    if (!p.alive || p.at_infinity) continue;
    double z_old = s.points[i].Z;
    double flowed = std::sqrt(z_old * z_old + 4.0 * dt);
    p.Z = (z_old >= 0.0 ? flowed : -flowed) - dw;
    p.log_gprime = s.points[i].log_gprime - 0.5 * std::log1p(4.0 * dt / (z_old * z_old));
    if (p.Z == 0.0 || (p.Z > 0.0) != (z_old > 0.0)) ok = false;
  }
  return ok;
}

}  // namespace detail

// Single Euler-Maruyama step of the driving SDE
//   dW = sqrt(kappa) dB + sum_i rho_i dt / (W - g(z_i)),
// with the marked points following dZ_i = 2 dt / Z_i - dW and
// d log g'(z_i) = -2 dt / Z_i^2. Throws if a marked point would cross zero;
// the caller then shrinks dt or declares the point swallowed.
inline DriverState step(const DriverState& state, const SleParams& params, double dt,
                        double gaussian) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  DriverState out;
  if (!detail::try_em_step(state, params.kappa, dt, gaussian, out))
    throw std::runtime_error("step: a marked point crossed zero; shrink dt");
  return out;
}

struct DriverResult {
  DrivingPath path;
  DriverState final_state;
  std::vector<SwallowEvent> events;
  std::vector<double> env_a, env_b;  // footprint envelopes per grid index
  bool stop_satisfied = false;       // stop rule met before T_max / step cap
  size_t steps = 0;
};

// Sample a driving function. Deterministic given (params, cfg): the gaussian
// stream is keyed by (cfg.seed, cfg.stream). A step that would push a marked
// point across zero is retried with dt/2 (same gaussian) down to dt_min, after
// which the point is declared swallowed at the current time and dropped from
// the drift sum.
inline DriverResult sample_driver(const SleParams& params, const PathConfig& cfg) {
  params.validate();
  cfg.validate();
  GaussianStream gauss(cfg.seed, cfg.stream);
  DriverResult res;
  DriverState state = DriverState::initial(params);

  double env_lo = state.w, env_hi = state.w;
  double t_report = 0.0;
  if (cfg.record_path) {
    res.path.times.push_back(0.0);
    res.path.values.push_back(state.w);
  }
  if (cfg.track_envelopes) {
    res.env_a.push_back(env_lo);
    res.env_b.push_back(env_hi);
  }

  auto mark_swallowed = [&](size_t i) {
    state.points[i].alive = false;
    res.events.push_back({i, state.t, state.w});
  };

  auto stop_met = [&]() {
    if (cfg.stop.kind == StopKind::TimeLimit) return false;
    bool all = true, any = false;
    for (size_t i : cfg.stop.watched) {
      bool dead = !state.points.at(i).alive;
      all = all && dead;
      any = any || dead;
    }
    if (cfg.stop.watched.empty()) return false;
    return cfg.stop.kind == StopKind::FirstSwallow ? any : all;
  };

  auto swallow_nearest = [&]() -> bool {
    double m = state.min_alive_absZ();
    if (!std::isfinite(m)) return false;
    for (size_t i = 0; i < state.points.size(); ++i)
      if (state.points[i].alive && !state.points[i].at_infinity &&
          std::abs(state.points[i].Z) == m)
        mark_swallowed(i);
    return true;
  };

  while (state.t < cfg.t_max && res.steps < cfg.max_steps) {
    if (stop_met()) {
      res.stop_satisfied = true;
      break;
    }
    double dt = detail::policy_dt(state, cfg);
    dt = std::min(dt, cfg.t_max - state.t);
    if (!(dt > 0.0)) {
      if (!swallow_nearest()) break;
      continue;
    }

    double g = gauss.next();
    DriverState next;
    double dw = 0.0;
    bool ok = detail::try_slit_step(state, params.kappa, dt, g, next, &dw);
    while (!ok && dt > cfg.dt_min) {
      dt *= 0.5;
      ok = detail::try_slit_step(state, params.kappa, dt, g, next, &dw);
    }
    if (!ok) {
      // Retries exhausted: the nearest point is swallowed at the current time.
      swallow_nearest();
      continue;
    }

    double w_prev = state.w;
    state = next;
    // Keep the reported time axis strictly increasing even when dt is below
    // the fp resolution of t; the exact dt lives in path.durations.
    if (!(state.t > t_report)) state.t = std::nextafter(t_report, 1e308);
    t_report = state.t;
    ++res.steps;
    for (size_t i = 0; i < state.points.size(); ++i) {
      auto& p = state.points[i];
      if (p.alive && !p.at_infinity && std::abs(p.Z) < cfg.eps_swallow) mark_swallowed(i);
    }
    if (cfg.record_path) {
      res.path.times.push_back(state.t);
      res.path.values.push_back(state.w);
      res.path.durations.push_back(dt);
      res.path.increments.push_back(dw);
    }
    if (cfg.track_envelopes) {
      double da = env_lo - w_prev, db = env_hi - w_prev;
      env_lo = std::min(w_prev - std::sqrt(da * da + 4.0 * dt), state.w);
      env_hi = std::max(w_prev + std::sqrt(db * db + 4.0 * dt), state.w);
      res.env_a.push_back(env_lo);
      res.env_b.push_back(env_hi);
    }
  }
  if (stop_met()) res.stop_satisfied = true;
  if (cfg.stop.kind == StopKind::TimeLimit && state.t >= cfg.t_max) res.stop_satisfied = true;
  res.final_state = state;
  return res;
}

}  // namespace sle
