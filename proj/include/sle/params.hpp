#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sle {

struct ForcePoint {
  double z = 0.0;
  double rho = 0.0;
  bool at_infinity = false;
  std::string label;
};

// Parameters of a chordal SLE_kappa(rho_1, ..., rho_n) in (H, x, infinity).
struct SleParams {
  double kappa = 6.0;
  double seed_x = 0.0;
  std::vector<ForcePoint> force_points;

  double alpha() const { return (6.0 - kappa) / (2.0 * kappa); }

  void validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("SleParams: kappa must be > 0");
    if (!std::isfinite(seed_x)) throw std::invalid_argument("SleParams: non-finite seed");
    int n_inf = 0;
    for (size_t i = 0; i < force_points.size(); ++i) {
      const auto& fp = force_points[i];
      if (fp.at_infinity) {
        ++n_inf;
        continue;
      }
      if (!std::isfinite(fp.z) || !std::isfinite(fp.rho))
        throw std::invalid_argument("SleParams: non-finite force point");
      if (fp.z == seed_x) throw std::invalid_argument("SleParams: force point at the seed");
      for (size_t j = i + 1; j < force_points.size(); ++j)
        if (!force_points[j].at_infinity && force_points[j].z == fp.z)
          throw std::invalid_argument("SleParams: coincident force points");
    }
    if (n_inf > 1) throw std::invalid_argument("SleParams: more than one force point at infinity");
  }
};

enum class StopKind { TimeLimit, FirstSwallow, AllSwallowed };

struct StopRule {
  StopKind kind = StopKind::TimeLimit;
  std::vector<size_t> watched;  // indices into force_points
};

enum class DtPolicy {
  Fixed,
  Adaptive,        // dt = min(dt_base, c_adapt * min_i Z_i^2)
  AdaptiveScaled,  // as Adaptive, but the cap grows ~ Z^2 past z_ref (constant
                   // relative resolution; makes heavy-tailed swallowing times
                   // reachable in O(log T) steps)
};

struct PathConfig {
  double dt_base = 1e-3;
  DtPolicy dt_policy = DtPolicy::Adaptive;
  double t_max = 10.0;
  uint64_t seed = 1;
  uint64_t stream = 0;
  StopRule stop;
  double c_adapt = 0.01;
  double eps_swallow = 1e-6;
  double dt_min = 1e-14;
  double z_ref = 1.0;
  // When > 0, caps dt by max(dt_init_floor, t_grid_growth * t): a grid that is
  // geometrically fine near t = 0, resolving boundary visits at small scales
  // (capacity ~ position^2) to a fixed relative resolution.
  double t_grid_growth = 0.0;
  double dt_init_floor = 1e-12;
  bool track_envelopes = false;
  bool record_path = true;
  size_t max_steps = 200000000;

  void validate() const {
    if (!(dt_base > 0.0)) throw std::invalid_argument("PathConfig: dt_base must be > 0");
    if (!(t_max > 0.0)) throw std::invalid_argument("PathConfig: T_max must be > 0");
  }
};

struct MarkedPoint {
  double z0 = 0.0;
  double rho = 0.0;
  double Z = 0.0;            // g_t(z) - W_t
  double log_gprime = 0.0;   // log g'_t(z)
  bool alive = true;
  bool at_infinity = false;
  std::string label;
};

struct DriverState {
  double t = 0.0;
  double w = 0.0;
  std::vector<MarkedPoint> points;

  double min_alive_absZ() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : points)
      if (p.alive && !p.at_infinity) m = std::min(m, std::abs(p.Z));
    return m;
  }

  static DriverState initial(const SleParams& params) {
    params.validate();
    DriverState s;
    s.t = 0.0;
    s.w = params.seed_x;
    s.points.reserve(params.force_points.size());
    for (const auto& fp : params.force_points) {
      MarkedPoint mp;
      mp.z0 = fp.z;
      mp.rho = fp.rho;
      mp.at_infinity = fp.at_infinity;
      mp.Z = fp.at_infinity ? std::numeric_limits<double>::infinity() : fp.z - params.seed_x;
      mp.label = fp.label;
      s.points.push_back(mp);
    }
    return s;
  }
};

struct SwallowEvent {
  size_t point_index = 0;
  double time = 0.0;
  double w = 0.0;
};

}  // namespace sle
