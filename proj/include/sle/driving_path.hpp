#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sle {

// Discretized driving function in half-plane-capacity time (hcap = 2t).
// W(t) is taken piecewise constant: W(t) = values[k] on [times[k], times[k+1]).
// Deep inside a closing pinch the adaptive step can drop below the floating
// point resolution of the absolute time; `durations`, when present, carries
// the exact step lengths while `times` stays strictly increasing by minimal
// bumps (reporting only, relative error ~1e-11).
struct DrivingPath {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> durations;   // optional; size == steps() when present
  std::vector<double> increments;  // optional exact per-step driver increments

  size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  double duration() const { return times.empty() ? 0.0 : times.back(); }
  double step_length(size_t k) const {
    return durations.empty() ? times[k + 1] - times[k] : durations[k];
  }
  // Driver increment over step k, exact when recorded (the stored absolute
  // values lose increments below the fp resolution of W deep in a pinch).
  double step_increment(size_t k) const {
    return increments.empty() ? values[k + 1] - values[k] : increments[k];
  }

  void validate() const {
    if (times.empty() || times.size() != values.size())
      throw std::invalid_argument("DrivingPath: need len(times) == len(values) >= 1");
    if (times.front() != 0.0) throw std::invalid_argument("DrivingPath: times must start at 0");
    if (!durations.empty() && durations.size() != steps())
      throw std::invalid_argument("DrivingPath: durations size mismatch");
    if (!increments.empty() && increments.size() != steps())
      throw std::invalid_argument("DrivingPath: increments size mismatch");
    for (size_t k = 0; k < times.size(); ++k) {
      if (!std::isfinite(times[k]) || !std::isfinite(values[k]))
        throw std::invalid_argument("DrivingPath: non-finite entry");
      if (k > 0 && !(times[k] > times[k - 1]))
        throw std::invalid_argument("DrivingPath: times must be strictly increasing");
      if (k < durations.size() && !(durations[k] > 0.0))
        throw std::invalid_argument("DrivingPath: non-positive step duration");
    }
  }

  // Index of the last grid time <= t.
  size_t index_at(double t) const {
    if (times.empty()) throw std::invalid_argument("DrivingPath: empty");
    size_t lo = 0, hi = times.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi + 1) / 2;
      if (times[mid] <= t)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  static DrivingPath constant(double w, double t_end, size_t n_steps) {
    DrivingPath p;
    p.times.reserve(n_steps + 1);
    p.values.assign(n_steps + 1, w);
    for (size_t k = 0; k <= n_steps; ++k) p.times.push_back(t_end * double(k) / double(n_steps));
    p.times.front() = 0.0;
    p.times.back() = t_end;
    return p;
  }

  static DrivingPath from_function(const std::function<double(double)>& w, double t_end,
                                   size_t n_steps) {
    DrivingPath p;
    p.times.reserve(n_steps + 1);
    p.values.reserve(n_steps + 1);
    for (size_t k = 0; k <= n_steps; ++k) {
      double t = t_end * double(k) / double(n_steps);
      p.times.push_back(t);
      p.values.push_back(w(t));
    }
    p.times.front() = 0.0;
    p.times.back() = t_end;
    return p;
  }
};

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_driver_csv(const DrivingPath& p, std::ostream& os) {
  os << "t,w\n";
  for (size_t k = 0; k < p.times.size(); ++k)
    os << format_g17(p.times[k]) << "," << format_g17(p.values[k]) << "\n";
}

}  // namespace sle
