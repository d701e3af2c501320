#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sle/driving_path.hpp"
#include "sle/exact_laws.hpp"
#include "sle/geometry.hpp"
#include "sle/stats.hpp"

namespace sle {

using json = nlohmann::json;

// Common knobs for the Monte Carlo experiment runners. Everything needed to
// reproduce a run bit-exactly is (this struct, base_seed).
struct ExperimentConfig {
  std::string id;
  double kappa = 6.0;
  size_t n_paths = 1000;
  double dt_base = 1e-4;
  double t_max = 1e12;
  uint64_t base_seed = 1;
  size_t bins = 5;
  size_t per_bin = 0;  // duality runs: 0 = use n_paths as the per-side total
  double eps_split = 1e-6;
  size_t threads = 0;  // 0 = hardware concurrency
  double ks_threshold = 0.05;
  double eps_swallow = 1e-15;
  double eps_class = 1e-12;
  double eps_D = 1e-4;
  double delta_rel = 1e-4;
  double band = 0.05;           // martingale band stop
  double c_adapt = 0.0025;      // relative step inside pinches
  double t_grid_growth = 2e-3;  // early-time grid refinement rate
  std::string out_dir;  // empty: no files written
  bool svg = false;

  json to_json() const {
    return json{{"id", id},
                {"kappa", kappa},
                {"n_paths", n_paths},
                {"dt_base", dt_base},
                {"t_max", t_max},
                {"base_seed", base_seed},
                {"bins", bins},
                {"per_bin", per_bin},
                {"eps_split", eps_split},
                {"threads", threads},
                {"ks_threshold", ks_threshold},
                {"eps_swallow", eps_swallow},
                {"eps_class", eps_class},
                {"eps_D", eps_D},
                {"delta_rel", delta_rel},
                {"band", band},
                {"c_adapt", c_adapt},
                {"t_grid_growth", t_grid_growth},
                {"svg", svg}};
  }
};

inline json ks_to_json(const KsResult& k) {
  json j{{"statistic", k.statistic}, {"n", k.n},         {"p_value", k.p_value},
         {"threshold", k.threshold}, {"pass", k.pass}};
  if (k.m > 0) j["m"] = k.m;
  return j;
}

inline json summary_to_json(const SampleSummary& s) {
  return json{{"n", s.n},   {"mean", s.mean},     {"sd", s.sd},  {"se", s.se},
              {"min", s.min}, {"median", s.median}, {"max", s.max}};
}

struct ExperimentReport {
  json doc;
  bool pass = false;

  void write(const std::string& out_dir) const {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir + "/report.json");
    os << doc.dump(2) << "\n";
  }
};

inline void write_samples_csv(const std::string& out_dir, const std::string& name,
                              const std::vector<std::string>& header,
                              const std::vector<std::vector<double>>& rows) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream os(out_dir + "/" + name);
  for (size_t i = 0; i < header.size(); ++i) os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << format_g17(r[i]) << (i + 1 < r.size() ? "," : "\n");
  }
}

inline json swallow_report_to_json(const SwallowReport& r) {
  json j{{"seed", r.seed}, {"stream", r.stream}, {"tau1", r.tau1}};
  if (r.D) j["D"] = *r.D;
  if (r.G) j["G"] = *r.G;
  if (r.E) j["E"] = *r.E;
  if (r.tauG) j["tauG"] = *r.tauG;
  if (r.R) j["R"] = *r.R;
  if (!r.ok) j["drop_reason"] = r.drop_reason;
  return j;
}

inline void write_swallow_jsonl(const std::string& out_dir, const std::string& name,
                                const std::vector<SwallowReport>& reps) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream os(out_dir + "/" + name);
  for (const auto& r : reps) os << swallow_report_to_json(r).dump() << "\n";
}

inline json dual_row_to_json(const DualRow& row) {
  json points = json::array();
  for (const auto& e : row.entries) {
    json p{{"label", e.label}, {"role", e.is_seed ? "seed" : "rho"}};
    if (!e.is_seed) {
      p["rho"] = e.rho.value();
      p["rho_exact"] = e.rho.str();
    }
    points.push_back(p);
  }
  return json{{"kappa", row.kappa.value()}, {"kappa_exact", row.kappa.str()}, {"points", points}};
}

inline json dual_pair_to_json(const DualParamPair& pair) {
  return json{{"kappa", pair.kappa.value()},
              {"kappa_hat", pair.kappa_hat.value()},
              {"kappa_exact", pair.kappa.str()},
              {"kappa_hat_exact", pair.kappa_hat.str()},
              {"direct", dual_row_to_json(pair.direct)},
              {"dual", dual_row_to_json(pair.dual)}};
}

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace sle
