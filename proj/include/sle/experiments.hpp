#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sle/driver.hpp"
#include "sle/exact_laws.hpp"
#include "sle/geometry.hpp"
#include "sle/parallel.hpp"
#include "sle/report.hpp"
#include "sle/stats.hpp"
#include "sle/svg.hpp"

namespace sle {

namespace detail {

inline PathConfig base_path_config(const ExperimentConfig& cfg) {
  PathConfig pc;
  pc.dt_base = cfg.dt_base;
  pc.dt_policy = DtPolicy::AdaptiveScaled;
  pc.t_max = cfg.t_max;
  pc.seed = cfg.base_seed;
  pc.c_adapt = cfg.c_adapt;
  pc.t_grid_growth = cfg.t_grid_growth;
  pc.eps_swallow = cfg.eps_swallow;
  return pc;
}

inline GeometryOptions geometry_options(const ExperimentConfig& cfg) {
  GeometryOptions g;
  g.eps_class = cfg.eps_class;
  g.eps_D = cfg.eps_D;
  g.delta_rel = cfg.delta_rel;
  return g;
}

inline std::map<std::string, size_t> drop_histogram(const std::vector<SwallowReport>& reps) {
  std::map<std::string, size_t> h;
  for (const auto& r : reps)
    if (!r.ok) ++h[r.drop_reason];
  return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Swallowing-law experiments: 1/D against Beta(1-4/k, 8/k-1) for 4<kappa<8,
// G/(G-1) against Beta(1-4/k, 1-4/k) for kappa >= 8.
// ---------------------------------------------------------------------------

inline ExperimentReport run_d_law(const ExperimentConfig& cfg) {
  WallTimer timer;
  BetaLaw law = d_law(cfg.kappa);
  std::vector<SwallowReport> reps(cfg.n_paths);
  PathConfig pc = detail::base_path_config(cfg);
  GeometryOptions gopt = detail::geometry_options(cfg);
  parallel_for(cfg.n_paths, cfg.threads, [&](size_t i) {
    PathConfig p = pc;
    p.stream = i;
    reps[i] = find_D_one_path(cfg.kappa, p, gopt, /*want_E=*/false);
  });
  std::vector<double> u_samples;
  for (const auto& r : reps)
    if (r.ok && r.D) u_samples.push_back(1.0 / *r.D);
  double drop_rate = 1.0 - double(u_samples.size()) / double(cfg.n_paths);

  KsResult ks = ks_one_sample(
      u_samples, [&](double x) { return beta_cdf(law, x); }, cfg.ks_threshold);
  SampleSummary sum = summarize(u_samples);
  bool mean_ok = std::abs(sum.mean - law.mean()) <= 3.0 * sum.se;

  ExperimentReport rep;
  rep.pass = ks.pass && drop_rate < 0.01 && mean_ok;
  rep.doc = json{{"experiment", "d_law"},
                 {"config", cfg.to_json()},
                 {"law", {{"a", law.a}, {"b", law.b}}},
                 {"samples", summary_to_json(sum)},
                 {"ks", ks_to_json(ks)},
                 {"mean_expected", law.mean()},
                 {"mean_within_3se", mean_ok},
                 {"drop_rate", drop_rate},
                 {"drops", detail::drop_histogram(reps)},
                 {"wall_seconds", timer.seconds()},
                 {"pass", rep.pass}};
  if (!cfg.out_dir.empty()) {
    std::vector<std::vector<double>> rows;
    for (double u : u_samples) rows.push_back({u});
    write_samples_csv(cfg.out_dir, "samples.csv", {"inv_D"}, rows);
    write_swallow_jsonl(cfg.out_dir, "paths.jsonl", reps);
    if (cfg.svg) {
      std::filesystem::create_directories(cfg.out_dir + "/plots");
      double a = law.a, b = law.b, lb = log_beta(a, b);
      write_histogram_svg(cfg.out_dir + "/plots/inv_D_hist.svg", u_samples, 40,
                          "1/D vs Beta density", [a, b, lb](double x) {
                            if (x <= 0.0 || x >= 1.0) return 0.0;
                            return std::exp((a - 1) * std::log(x) + (b - 1) * std::log1p(-x) - lb);
                          });
    }
    rep.write(cfg.out_dir);
  }
  return rep;
}

inline ExperimentReport run_g_law(const ExperimentConfig& cfg) {
  WallTimer timer;
  BetaLaw law = g_law(cfg.kappa);
  std::vector<SwallowReport> reps(cfg.n_paths);
  PathConfig pc = detail::base_path_config(cfg);
  GeometryOptions gopt = detail::geometry_options(cfg);
  parallel_for(cfg.n_paths, cfg.threads, [&](size_t i) {
    PathConfig p = pc;
    p.stream = i;
    reps[i] = find_G_one_path(cfg.kappa, p, gopt, /*want_R=*/false);
  });
  std::vector<double> v_samples;
  for (const auto& r : reps)
    if (r.ok && r.G) v_samples.push_back(*r.G / (*r.G - 1.0));
  double drop_rate = 1.0 - double(v_samples.size()) / double(cfg.n_paths);

  KsResult ks = ks_one_sample(
      v_samples, [&](double x) { return beta_cdf(law, x); }, cfg.ks_threshold);
  SampleSummary sum = summarize(v_samples);
  bool median_ok = std::abs(sum.median - 0.5) <= 0.02;

  ExperimentReport rep;
  rep.pass = ks.pass && drop_rate < 0.01 && median_ok;
  rep.doc = json{{"experiment", "g_law"},
                 {"config", cfg.to_json()},
                 {"law", {{"a", law.a}, {"b", law.b}}},
                 {"samples", summary_to_json(sum)},
                 {"ks", ks_to_json(ks)},
                 {"median_within_002", median_ok},
                 {"drop_rate", drop_rate},
                 {"drops", detail::drop_histogram(reps)},
                 {"wall_seconds", timer.seconds()},
                 {"pass", rep.pass}};
  if (!cfg.out_dir.empty()) {
    std::vector<std::vector<double>> rows;
    for (double v : v_samples) rows.push_back({v});
    write_samples_csv(cfg.out_dir, "samples.csv", {"g_ratio"}, rows);
    write_swallow_jsonl(cfg.out_dir, "paths.jsonl", reps);
    rep.write(cfg.out_dir);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Dual simulations: a simple SLE_{16/kappa}(rho) curve run until it lands on
// (0,1); the landing point is recovered by bisection on the closing pinch.
// ---------------------------------------------------------------------------

struct DualLanding {
  bool ok = false;
  std::string drop_reason;
  double landing = 0.0;
};

namespace detail {

inline DualLanding dual_landing_run(double kappa_hat, double seed_x,
                                    const std::vector<ForcePoint>& fps, size_t watch_index,
                                    const std::vector<size_t>& must_survive, bool swallowed_left,
                                    const PathConfig& pc, double eps_class, double eps_e) {
  DualLanding out;
  SleParams params;
  params.kappa = kappa_hat;
  params.seed_x = seed_x;
  params.force_points = fps;
  PathConfig cfg = pc;
  cfg.stop = {StopKind::FirstSwallow, {watch_index}};
  cfg.record_path = true;
  DriverResult dr = sample_driver(params, cfg);
  if (!dr.stop_satisfied || dr.final_state.points[watch_index].alive) {
    out.drop_reason = "dual_no_landing";
    return out;
  }
  for (size_t i : must_survive) {
    const auto& p = dr.final_state.points[i];
    if (!p.alive || std::abs(p.Z) < eps_class) {
      out.drop_reason = "dual_wrong_side";
      return out;
    }
  }
  size_t end = dr.path.steps();
  // Landing point on (0,1): boundary between the enclosed and free sides.
  double lo = 1e-7, hi = 1.0;
  bool lo_sw = replay_real_point(dr.path, lo, end, eps_class).swallowed;
  bool hi_sw = replay_real_point(dr.path, hi, end, eps_class).swallowed;
  bool want_lo = swallowed_left, want_hi = !swallowed_left;
  if (lo_sw != want_lo || hi_sw != want_hi) {
    out.drop_reason = "dual_landing_range";
    return out;
  }
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    double local = std::min(1.0, 2.0 * std::min(mid, 1.0 - mid));
    if (hi - lo <= std::max(1e-9, eps_e * local)) break;
    bool sw = replay_real_point(dr.path, mid, end, eps_class).swallowed;
    if (sw == lo_sw)
      lo = mid;
    else
      hi = mid;
  }
  out.landing = 0.5 * (lo + hi);
  if (!(out.landing > 1e-8 && out.landing < 1.0 - 1e-8)) {
    out.drop_reason = "dual_landing_range";
    return out;
  }
  out.ok = true;
  return out;
}

}  // namespace detail

// Dual side of the (4,8) duality: SLE_{16/k}(-k^/2, k^-4, k^-2) started at D
// with marked points (0, 1, D+), run until it hits (0,1).
inline DualLanding run_dual_from_D(double kappa, double D, const PathConfig& pc, double eps_split,
                                   double eps_class = 1e-6, double eps_e = 1e-4) {
  DualParamPair pair = dual_params(DualTable::Thm1, kappa);
  std::vector<double> w = dual_weights(pair);  // at (0, 1, D+)
  std::vector<ForcePoint> fps = {{0.0, w[0], false, "0"},
                                 {1.0, w[1], false, "1"},
                                 {D + eps_split, w[2], false, "D+"}};
  PathConfig cfg = pc;
  cfg.t_max = 1e15;
  return detail::dual_landing_run(16.0 / kappa, D, fps, /*watch=*/1, /*survive=*/{0},
                                  /*swallowed_left=*/false, cfg, eps_class, eps_e);
}

// Dual side of the (>=8) duality: SLE_{16/k}(k^/2, k^/2-2, -k^/2, k^-4) started
// at G with marked points (G-, G+, 0, 1), run until it hits (0,1).
inline DualLanding run_dual_from_G(double kappa, double G, const PathConfig& pc, double eps_split,
                                   double eps_class = 1e-6, double eps_e = 1e-4) {
  DualParamPair pair = dual_params(DualTable::Thm2, kappa);
  std::vector<double> w = dual_weights(pair);  // at (G-, G+, 0, 1)
  std::vector<ForcePoint> fps = {{G - eps_split, w[0], false, "G-"},
                                 {G + eps_split, w[1], false, "G+"},
                                 {0.0, w[2], false, "0"},
                                 {1.0, w[3], false, "1"}};
  PathConfig cfg = pc;
  cfg.t_max = 1e15;
  return detail::dual_landing_run(16.0 / kappa, G, fps, /*watch=*/2, /*survive=*/{0, 3},
                                  /*swallowed_left=*/true, cfg, eps_class, eps_e);
}

// ---------------------------------------------------------------------------
// Duality experiments. Side A extracts (conditioning value, boundary foot)
// from a chordal run; side B reruns the dual curve from the same conditioning
// value and records its landing point on (0,1). The two landing samples are
// compared by two-sample KS inside equal-probability bins of the exact
// conditioning law, plus an A-vs-A-replica null check.
// ---------------------------------------------------------------------------

struct DualitySample {
  uint64_t stream = 0;
  double cond = 0.0;   // D or G
  double coord = 0.0;  // 1/D or G/(G-1), the exact-law coordinate in (0,1)
  double obs_a = 0.0;  // side-A boundary foot on (0,1)
  double obs_b = 0.0;  // side-B landing on (0,1)
  int bin = -1;
  bool has_b = false;
};

namespace detail {

struct DualitySideA {
  std::vector<DualitySample> kept;
  size_t attempts = 0;
  std::map<std::string, size_t> drops;
};

// Side A of a duality run: chunked generation until every bin of the exact
// conditioning law holds at least `per_bin` kept samples.
template <typename RunOne>
DualitySideA duality_side_a(const ExperimentConfig& cfg, const BetaLaw& law, uint64_t stream_base,
                            const RunOne& run_one) {
  DualitySideA out;
  std::vector<double> edges;
  for (size_t j = 1; j < cfg.bins; ++j)
    edges.push_back(beta_quantile(law, double(j) / double(cfg.bins)));
  auto bin_of = [&](double coord) {
    int b = 0;
    for (double e : edges)
      if (coord > e) ++b;
    return b;
  };
  size_t target = cfg.per_bin > 0 ? cfg.per_bin : 0;
  size_t chunk = cfg.per_bin > 0 ? std::max<size_t>(cfg.bins * cfg.per_bin, 1000) : cfg.n_paths;
  size_t max_total = cfg.per_bin > 0 ? 6 * cfg.bins * cfg.per_bin + 4000 : cfg.n_paths;
  std::vector<size_t> bin_counts(cfg.bins, 0);
  size_t next_stream = 0;
  while (true) {
    size_t n = std::min(chunk, max_total - out.attempts);
    if (n == 0) break;
    std::vector<std::optional<DualitySample>> batch(n);
    parallel_for(n, cfg.threads, [&](size_t i) {
      uint64_t stream = stream_base + next_stream + i;
      batch[i] = run_one(stream);
    });
    for (size_t i = 0; i < n; ++i) {
      ++out.attempts;
      if (batch[i]) {
        DualitySample s = *batch[i];
        s.bin = bin_of(s.coord);
        ++bin_counts[s.bin];
        out.kept.push_back(s);
      }
    }
    next_stream += n;
    if (cfg.per_bin == 0) break;
    bool all_full = true;
    for (size_t c : bin_counts) all_full = all_full && c >= target;
    if (all_full || out.attempts >= max_total) break;
  }
  return out;
}

inline json duality_bins_json(const std::vector<KsResult>& per_bin,
                              const std::vector<size_t>& skipped) {
  json bins = json::array();
  for (size_t b = 0; b < per_bin.size(); ++b) {
    json j = ks_to_json(per_bin[b]);
    j["bin"] = b;
    j["skipped"] = std::find(skipped.begin(), skipped.end(), b) != skipped.end();
    bins.push_back(j);
  }
  return bins;
}

}  // namespace detail

inline ExperimentReport run_duality(const ExperimentConfig& cfg, bool thm2) {
  WallTimer timer;
  double kappa = cfg.kappa;
  if (thm2 && !(kappa >= 8.0)) throw std::domain_error("duality2: kappa must be >= 8");
  if (!thm2 && !(kappa > 4.0 && kappa < 8.0))
    throw std::domain_error("duality1: kappa must be in (4,8)");
  BetaLaw law = thm2 ? g_law(kappa) : d_law(kappa);
  PathConfig pc = detail::base_path_config(cfg);
  GeometryOptions gopt = detail::geometry_options(cfg);
  std::map<std::string, size_t> drops_a, drops_b;
  std::mutex drop_mutex;

  auto run_side_a_one = [&](uint64_t stream) -> std::optional<DualitySample> {
    PathConfig p = pc;
    p.stream = stream;
    SwallowReport r = thm2 ? find_G_one_path(kappa, p, gopt) : find_D_one_path(kappa, p, gopt);
    if (!r.ok) {
      std::lock_guard<std::mutex> lk(drop_mutex);
      ++drops_a[r.drop_reason];
      return std::nullopt;
    }
    DualitySample s;
    s.stream = stream;
    if (thm2) {
      s.cond = *r.G;
      s.coord = *r.G / (*r.G - 1.0);
      s.obs_a = *r.R;
    } else {
      s.cond = *r.D;
      s.coord = 1.0 / *r.D;
      s.obs_a = *r.E;
    }
    return s;
  };

  detail::DualitySideA side_a = detail::duality_side_a(cfg, law, 0, run_side_a_one);
  detail::DualitySideA replica = detail::duality_side_a(cfg, law, 1000000000ull, run_side_a_one);

  // Side B: one dual run per kept side-A sample, seeded from its conditioning
  // value. Streams are offset so the pairing is reproducible.
  auto run_side_b = [&](std::vector<DualitySample>& samples, uint64_t offset, double eps_split) {
    parallel_for(samples.size(), cfg.threads, [&](size_t i) {
      PathConfig p = pc;
      p.stream = offset + samples[i].stream;
      DualLanding land = thm2 ? run_dual_from_G(kappa, samples[i].cond, p, eps_split, cfg.eps_class, cfg.eps_D)
                              : run_dual_from_D(kappa, samples[i].cond, p, eps_split, cfg.eps_class, cfg.eps_D);
      if (land.ok) {
        samples[i].obs_b = land.landing;
        samples[i].has_b = true;
      } else {
        std::lock_guard<std::mutex> lk(drop_mutex);
        ++drops_b[land.drop_reason];
      }
    });
  };
  run_side_b(side_a.kept, 2000000000ull, cfg.eps_split);

  size_t b_ok = 0;
  for (const auto& s : side_a.kept) b_ok += s.has_b;
  double b_hit_fraction = side_a.kept.empty() ? 0.0 : double(b_ok) / double(side_a.kept.size());

  // Per-bin two-sample KS between the side-A feet and the side-B landings.
  std::vector<KsResult> per_bin(cfg.bins);
  std::vector<size_t> skipped;
  bool bins_pass = true;
  for (size_t b = 0; b < cfg.bins; ++b) {
    std::vector<double> ea, eb;
    for (const auto& s : side_a.kept)
      if (size_t(s.bin) == b && s.has_b) {
        ea.push_back(s.obs_a);
        eb.push_back(s.obs_b);
      }
    if (ea.size() < 50) {
      skipped.push_back(b);
      continue;
    }
    per_bin[b] = ks_two_sample(ea, eb, cfg.ks_threshold);
    bins_pass = bins_pass && per_bin[b].pass;
  }
  std::vector<double> all_a, all_b;
  for (const auto& s : side_a.kept)
    if (s.has_b) {
      all_a.push_back(s.obs_a);
      all_b.push_back(s.obs_b);
    }
  KsResult pooled =
      all_a.size() >= 2 ? ks_two_sample(all_a, all_b, cfg.ks_threshold) : KsResult{};

  // Null self-test: side A against an independent replica, same binning.
  size_t null_pass_bins = 0, null_eval_bins = 0;
  json null_json = json::array();
  for (size_t b = 0; b < cfg.bins; ++b) {
    std::vector<double> xa, xr;
    for (const auto& s : side_a.kept)
      if (size_t(s.bin) == b) xa.push_back(s.obs_a);
    for (const auto& s : replica.kept)
      if (size_t(s.bin) == b) xr.push_back(s.obs_a);
    if (xa.size() < 50 || xr.size() < 50) continue;
    KsResult k = ks_two_sample(xa, xr, 1.0);
    ++null_eval_bins;
    if (k.p_value > 0.01) ++null_pass_bins;
    json j = ks_to_json(k);
    j["bin"] = b;
    null_json.push_back(j);
  }
  bool null_ok = null_eval_bins > 0 && null_pass_bins + 1 >= null_eval_bins;

  // Split-offset sensitivity: rerun a subset of side B at 100 x eps_split.
  json sensitivity;
  {
    size_t n_sub = std::min<size_t>(side_a.kept.size(), 400);
    std::vector<DualitySample> sub(side_a.kept.begin(), side_a.kept.begin() + n_sub);
    for (auto& s : sub) s.has_b = false;
    run_side_b(sub, 3000000000ull, cfg.eps_split * 100.0);
    std::vector<double> main_b, alt_b;
    for (size_t i = 0; i < n_sub; ++i)
      if (side_a.kept[i].has_b && sub[i].has_b) {
        main_b.push_back(side_a.kept[i].obs_b);
        alt_b.push_back(sub[i].obs_b);
      }
    if (main_b.size() >= 50) {
      KsResult k = ks_two_sample(main_b, alt_b, 1.0);
      sensitivity = json{{"eps_split", cfg.eps_split},
                         {"eps_split_alt", cfg.eps_split * 100.0},
                         {"n", main_b.size()},
                         {"ks", ks_to_json(k)}};
    }
  }

  double drop_rate_a = 1.0 - double(side_a.kept.size()) / double(std::max<size_t>(1, side_a.attempts));
  ExperimentReport rep;
  rep.pass = bins_pass && skipped.empty() && null_ok && b_hit_fraction >= 0.99 &&
             drop_rate_a < 0.01;
  rep.doc = json{{"experiment", thm2 ? "duality_thm2" : "duality_thm1"},
                 {"config", cfg.to_json()},
                 {"kappa_hat", 16.0 / kappa},
                 {"dual_weights", dual_weights(dual_params(thm2 ? DualTable::Thm2 : DualTable::Thm1, kappa))},
                 {"side_a", {{"attempts", side_a.attempts},
                             {"kept", side_a.kept.size()},
                             {"drop_rate", drop_rate_a},
                             {"drops", drops_a}}},
                 {"side_b", {{"landed", b_ok},
                             {"hit_01_fraction", b_hit_fraction},
                             {"drops", drops_b}}},
                 {"per_bin_ks", detail::duality_bins_json(per_bin, skipped)},
                 {"pooled_ks", ks_to_json(pooled)},
                 {"null_test", {{"bins", null_json},
                                {"pass_bins", null_pass_bins},
                                {"eval_bins", null_eval_bins},
                                {"pass", null_ok}}},
                 {"eps_split_sensitivity", sensitivity},
                 {"wall_seconds", timer.seconds()},
                 {"pass", rep.pass}};
  if (!cfg.out_dir.empty()) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : side_a.kept)
      if (s.has_b)
        rows.push_back({double(s.stream), s.cond, s.coord, s.obs_a, s.obs_b, double(s.bin)});
    write_samples_csv(cfg.out_dir, "samples.csv",
                      {"stream", thm2 ? "G" : "D", "coord", "foot_a", "landing_b", "bin"}, rows);
    if (cfg.svg && !all_a.empty()) {
      std::filesystem::create_directories(cfg.out_dir + "/plots");
      write_cdf_overlay_svg(cfg.out_dir + "/plots/pooled_cdf.svg", all_a, "side A foot", all_b,
                            "side B landing", "Pooled landing laws");
    }
    rep.write(cfg.out_dir);
  }
  return rep;
}

inline ExperimentReport run_duality_thm1(const ExperimentConfig& cfg) {
  return run_duality(cfg, false);
}
inline ExperimentReport run_duality_thm2(const ExperimentConfig& cfg) {
  return run_duality(cfg, true);
}

// ---------------------------------------------------------------------------
// First-exit classification frequencies.
// ---------------------------------------------------------------------------

struct HittingCase {
  double kappa = 6.0;
  double seed_x = 0.0;
  std::vector<ForcePoint> force_points;
  std::vector<size_t> expect_dead;    // |Z| collapsed when the run stops
  std::vector<size_t> expect_alive;   // still macroscopic when the run stops
  std::optional<std::pair<double, double>> landing_interval;  // open interval on R
};

inline ExperimentReport run_hitting_classification(const HittingCase& hc,
                                                   const ExperimentConfig& cfg) {
  WallTimer timer;
  PathConfig pc = detail::base_path_config(cfg);
  SleParams params;
  params.kappa = hc.kappa;
  params.seed_x = hc.seed_x;
  params.force_points = hc.force_points;
  std::vector<size_t> watch(hc.force_points.size());
  for (size_t i = 0; i < watch.size(); ++i) watch[i] = i;

  std::vector<int> outcome(cfg.n_paths, 0);  // 1 = predicted, 0 = other, -1 = no stop
  parallel_for(cfg.n_paths, cfg.threads, [&](size_t i) {
    PathConfig p = pc;
    p.stream = i;
    p.stop = {StopKind::FirstSwallow, watch};
    p.record_path = true;
    DriverResult dr = sample_driver(params, p);
    if (!dr.stop_satisfied) {
      outcome[i] = -1;
      return;
    }
    size_t end = dr.path.steps();
    bool match = true;
    for (size_t k : hc.expect_dead) {
      const auto& pt = dr.final_state.points[k];
      match = match && (!pt.alive || std::abs(pt.Z) < cfg.eps_class);
    }
    for (size_t k : hc.expect_alive) {
      const auto& pt = dr.final_state.points[k];
      match = match && pt.alive && std::abs(pt.Z) >= cfg.eps_class;
    }
    if (match && hc.landing_interval) {
      auto [lo, hi] = *hc.landing_interval;
      double a = lo, b = hi;
      bool a_sw = replay_real_point(dr.path, a + 1e-7, end, cfg.eps_class).swallowed;
      bool b_sw = replay_real_point(dr.path, b - 1e-7, end, cfg.eps_class).swallowed;
      // A single landing point inside the open interval: exactly one side of
      // it is enclosed, so the interval endpoints must classify differently.
      match = a_sw != b_sw;
      if (match) {
        double x_lo = a + 1e-7, x_hi = b - 1e-7;
        for (int it = 0; it < 40 && x_hi - x_lo > 1e-5 * (b - a); ++it) {
          double mid = 0.5 * (x_lo + x_hi);
          bool sw = replay_real_point(dr.path, mid, end, cfg.eps_class).swallowed;
          if (sw == a_sw)
            x_lo = mid;
          else
            x_hi = mid;
        }
        double e = 0.5 * (x_lo + x_hi);
        match = e > a + 1e-4 * (b - a) && e < b - 1e-4 * (b - a);
      }
    }
    outcome[i] = match ? 1 : 0;
  });

  size_t predicted = 0, no_stop = 0;
  for (int o : outcome) {
    predicted += o == 1;
    no_stop += o == -1;
  }
  double freq = double(predicted) / double(cfg.n_paths);

  std::vector<double> rhos;
  for (const auto& fp : hc.force_points) rhos.push_back(fp.rho);
  ExitDescriptor ed = classify_exit(hc.kappa, rhos);
  std::string classification = std::holds_alternative<ExitPoint>(ed)
                                   ? "point_" + std::to_string(std::get<ExitPoint>(ed).k)
                               : std::holds_alternative<ExitInterval>(ed)
                                   ? "interval_" + std::to_string(std::get<ExitInterval>(ed).k)
                                   : "unclassified";

  ExperimentReport rep;
  rep.pass = freq >= 0.99;
  rep.doc = json{{"experiment", "hitting_classification"},
                 {"config", cfg.to_json()},
                 {"kappa", hc.kappa},
                 {"classify_exit", classification},
                 {"predicted_fraction", freq},
                 {"no_stop", no_stop},
                 {"wall_seconds", timer.seconds()},
                 {"pass", rep.pass}};
  if (!cfg.out_dir.empty()) rep.write(cfg.out_dir);
  return rep;
}

// ---------------------------------------------------------------------------
// Local-martingale expectation checks along chordal SLE_kappa, band-stopped
// away from swallowing.
// ---------------------------------------------------------------------------

struct MartingaleSpec {
  double kappa = 6.0;
  std::vector<std::pair<double, double>> points;  // (z_i, beta_i)
  std::vector<double> t_grid = {0.01, 0.05};
  bool f_statistic = false;  // use the normalized swallowing CDF of the ratio
};

inline ExperimentReport run_martingale_check(const MartingaleSpec& ms,
                                             const ExperimentConfig& cfg) {
  WallTimer timer;
  SleParams params;
  params.kappa = ms.kappa;
  for (const auto& [z, beta] : ms.points) params.force_points.push_back({z, 0.0, false, ""});
  std::vector<double> betas;
  for (const auto& [z, beta] : ms.points) betas.push_back(beta);

  auto statistic = [&](const DriverState& st) {
    if (ms.f_statistic) {
      double y = st.points[1].Z / st.points[0].Z;
      return d_cdf(ms.kappa, y);
    }
    return rhodens_martingale(ms.kappa, betas, st);
  };
  auto band_hit = [&](const DriverState& st) {
    double m = st.min_alive_absZ();
    if (m < cfg.band) return true;
    for (size_t i = 0; i < st.points.size(); ++i)
      for (size_t j = i + 1; j < st.points.size(); ++j)
        if (std::abs(st.points[j].Z - st.points[i].Z) < cfg.band) return true;
    return false;
  };

  double t_end = ms.t_grid.back();
  size_t n_grid = ms.t_grid.size();
  std::vector<std::vector<double>> values(n_grid, std::vector<double>(cfg.n_paths));
  double stat0 = statistic(DriverState::initial(params));

  parallel_for(cfg.n_paths, cfg.threads, [&](size_t i) {
    GaussianStream gauss(cfg.base_seed, i);
    DriverState st = DriverState::initial(params);
    double frozen = statistic(st);
    bool stopped = false;
    size_t gi = 0;
    while (gi < n_grid) {
      if (!stopped && band_hit(st)) {
        stopped = true;
        frozen = statistic(st);
      }
      if (stopped) {
        for (; gi < n_grid; ++gi) values[gi][i] = frozen;
        break;
      }
      if (st.t >= ms.t_grid[gi] - 1e-15) {
        values[gi][i] = statistic(st);
        ++gi;
        continue;
      }
      double dt = std::min(adaptive_dt(st, cfg.dt_base, cfg.c_adapt), ms.t_grid[gi] - st.t);
      DriverState next;
      if (!detail::try_em_step(st, ms.kappa, dt, gauss.next(), next)) {
        stopped = true;
        frozen = statistic(st);
        continue;
      }
      st = next;
    }
    (void)t_end;
  });

  json checks = json::array();
  bool pass = true;
  for (size_t gi = 0; gi < n_grid; ++gi) {
    SampleSummary s = summarize(values[gi]);
    bool inconclusive = s.mean != 0.0 && s.se / std::abs(s.mean) > 0.5;
    bool ok = !inconclusive && std::abs(s.mean - stat0) <= 3.0 * s.se;
    pass = pass && ok;
    checks.push_back(json{{"t", ms.t_grid[gi]},
                          {"mean", s.mean},
                          {"se", s.se},
                          {"expected", stat0},
                          {"deviation_in_se", s.se > 0 ? std::abs(s.mean - stat0) / s.se : 0.0},
                          {"inconclusive", inconclusive},
                          {"pass", ok}});
  }

  ExperimentReport rep;
  rep.pass = pass;
  rep.doc = json{{"experiment", ms.f_statistic ? "martingale_F" : "martingale_rhodens"},
                 {"config", cfg.to_json()},
                 {"kappa", ms.kappa},
                 {"t_checks", checks},
                 {"wall_seconds", timer.seconds()},
                 {"pass", pass}};
  if (!cfg.out_dir.empty()) rep.write(cfg.out_dir);
  return rep;
}

// ---------------------------------------------------------------------------
// Reversibility spot check for kappa <= 4: the law of the first-hit angle on
// the unit semicircle, direct curves against curves mapped by z -> -1/z
// (which exchanges the chordal endpoints and sends angle t to pi - t).
// ---------------------------------------------------------------------------

namespace detail {

inline std::optional<double> first_hit_angle(const DrivingPath& path) {
  size_t n = path.steps();
  double dt = n > 0 ? path.times[1] - path.times[0] : 0.0;
  size_t stride = std::max<size_t>(1, size_t(0.02 / std::max(dt, 1e-9)));
  size_t prev = 0;
  for (size_t k = stride; k <= n; k += stride) {
    complex g = inverse_map(path, k, complex(path.values[k], 0.0));
    if (std::abs(g) >= 1.0) {
      for (size_t j = prev + 1; j <= k; ++j) {
        complex gj = inverse_map(path, j, complex(path.values[j], 0.0));
        if (std::abs(gj) >= 1.0) return std::atan2(gj.imag(), gj.real());
      }
    }
    prev = k;
    if (k + stride > n && k < n) stride = n - k;
  }
  return std::nullopt;
}

}  // namespace detail

inline ExperimentReport run_reversibility_spotcheck(const ExperimentConfig& cfg) {
  WallTimer timer;
  if (!(cfg.kappa <= 4.0))
    throw std::domain_error("reversibility spot check: kappa must be <= 4");
  SleParams params;
  params.kappa = cfg.kappa;
  PathConfig pc;
  pc.dt_base = cfg.dt_base;
  pc.dt_policy = DtPolicy::Fixed;
  pc.t_max = std::min(cfg.t_max, 64.0);
  pc.seed = cfg.base_seed;

  size_t n = cfg.n_paths;
  std::vector<double> angle_a(n, -1.0), angle_b(n, -1.0);
  parallel_for(2 * n, cfg.threads, [&](size_t i) {
    PathConfig p = pc;
    p.stream = i;
    DriverResult dr = sample_driver(params, p);
    auto th = detail::first_hit_angle(dr.path);
    if (!th) return;
    if (i < n)
      angle_a[i] = *th;
    else
      angle_b[i - n] = 3.14159265358979323846 - *th;  // z -> -1/z sends angle t to pi - t
  });
  std::vector<double> a, b;
  for (double x : angle_a)
    if (x >= 0.0) a.push_back(x);
  for (double x : angle_b)
    if (x >= 0.0) b.push_back(x);
  double drop_rate = 1.0 - double(a.size() + b.size()) / double(2 * n);

  KsResult ks = ks_two_sample(a, b, cfg.ks_threshold);
  ExperimentReport rep;
  rep.pass = ks.pass && drop_rate < 0.01;
  rep.doc = json{{"experiment", "reversibility_spotcheck"},
                 {"config", cfg.to_json()},
                 {"ks", ks_to_json(ks)},
                 {"n_direct", a.size()},
                 {"n_mapped", b.size()},
                 {"drop_rate", drop_rate},
                 {"wall_seconds", timer.seconds()},
                 {"pass", rep.pass}};
  if (!cfg.out_dir.empty()) {
    if (cfg.svg) {
      std::filesystem::create_directories(cfg.out_dir + "/plots");
      write_cdf_overlay_svg(cfg.out_dir + "/plots/angles_cdf.svg", a, "direct", b, "mapped",
                            "First-hit angles on the unit semicircle");
    }
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
      std::vector<double> row;
      row.push_back(i < a.size() ? a[i] : std::numeric_limits<double>::quiet_NaN());
      row.push_back(i < b.size() ? b[i] : std::numeric_limits<double>::quiet_NaN());
      rows.push_back(row);
    }
    write_samples_csv(cfg.out_dir, "samples.csv", {"angle_direct", "angle_mapped"}, rows);
    rep.write(cfg.out_dir);
  }
  return rep;
}

}  // namespace sle
