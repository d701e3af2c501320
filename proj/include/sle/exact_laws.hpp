#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sle/params.hpp"
#include "sle/rational.hpp"
#include "sle/rng.hpp"
#include "sle/special.hpp"

namespace sle {

// ---------------------------------------------------------------------------
// Beta laws. b == 0 is the degenerate point mass at 1.
// ---------------------------------------------------------------------------

struct BetaLaw {
  double a = 1.0;
  double b = 1.0;

  BetaLaw() = default;
  BetaLaw(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0.0) || b < 0.0) throw std::invalid_argument("BetaLaw: need a > 0, b >= 0");
  }
  bool degenerate() const { return b == 0.0; }
  double mean() const { return degenerate() ? 1.0 : a / (a + b); }
};

inline double beta_cdf(const BetaLaw& law, double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("beta_cdf: x outside [0,1]");
  if (law.degenerate()) return x >= 1.0 ? 1.0 : 0.0;
  return reg_inc_beta(law.a, law.b, x);
}

inline double beta_quantile(const BetaLaw& law, double p) {
  if (law.degenerate()) return 1.0;
  return inv_reg_inc_beta(law.a, law.b, p);
}

inline double beta_sample(const BetaLaw& law, GaussianStream& rng) {
  return beta_quantile(law, rng.uniform());
}

// Law of 1/D for the swallowing observable D of chordal SLE_kappa, 4<kappa<8:
// Beta(1 - 4/kappa, 8/kappa - 1).
inline BetaLaw d_law(double kappa) {
  if (!(kappa > 4.0 && kappa < 8.0)) throw std::domain_error("d_law: kappa outside (4,8)");
  return BetaLaw(1.0 - 4.0 / kappa, 8.0 / kappa - 1.0);
}

// CDF of D itself on (1, infinity), via the change of variable u = 1/D.
inline double d_cdf(double kappa, double y) {
  if (!(y >= 1.0)) return 0.0;
  BetaLaw law = d_law(kappa);
  return 1.0 - beta_cdf(law, 1.0 / y);
}

// Law of G/(G-1) for the leftmost pre-swallowing visit G, kappa >= 8:
// Beta(1 - 4/kappa, 1 - 4/kappa) (generalized arcsine family).
inline BetaLaw g_law(double kappa) {
  if (!(kappa >= 8.0)) throw std::domain_error("g_law: kappa below 8");
  return BetaLaw(1.0 - 4.0 / kappa, 1.0 - 4.0 / kappa);
}

// ---------------------------------------------------------------------------
// Scale function of the boundary-ratio diffusion with two tracked points.
// F(y) = int_{1/2}^y u^p (1-u)^q du,  p = -2(2+rho1)/kappa,
// q = 2(4+rho1+rho2-kappa)/kappa. Endpoint blow-ups classify which marked
// point can be reached.
// ---------------------------------------------------------------------------

struct ScaleFunctionParams {
  double kappa, rho1, rho2;
  double p() const { return -2.0 * (2.0 + rho1) / kappa; }
  double q() const { return 2.0 * (4.0 + rho1 + rho2 - kappa) / kappa; }
  bool blows_up_at_0() const { return p() <= -1.0; }  // <=> rho1 >= kappa/2 - 2
  bool blows_up_at_1() const { return q() <= -1.0; }  // <=> rho1+rho2 <= kappa/2 - 4
};

inline double scale_function(const ScaleFunctionParams& sp, double y) {
  if (!(y > 0.0 && y < 1.0)) {
    if ((y <= 0.0 && sp.blows_up_at_0()) || (y >= 1.0 && sp.blows_up_at_1()))
      throw std::domain_error("scale_function: divergent endpoint");
    if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("scale_function: y outside (0,1)");
  }
  double p = sp.p(), q = sp.q();
  return integrate([p, q](double u) { return std::pow(u, p) * std::pow(1.0 - u, q); }, 0.5, y,
                   1e-12);
}

// ---------------------------------------------------------------------------
// Hypergeometric factor of the four-point partition function.
// psi(u) = (u(1-u))^beta 2F1(2 beta, 2 beta + 8/kappa - 1; 2 beta + 4/kappa; u)
// with beta a root of (kappa/2) beta (beta-1) + 2 beta = 2 nu.
// ---------------------------------------------------------------------------

struct HypergeomPsi {
  double kappa = 6.0;
  double nu = 0.0;
  double beta = 0.0;

  static double quadratic_residual(double kappa, double nu, double beta) {
    return 0.5 * kappa * beta * (beta - 1.0) + 2.0 * beta - 2.0 * nu;
  }

  static std::pair<double, double> beta_roots(double kappa, double nu) {
    // (kappa/2) b^2 + (2 - kappa/2) b - 2 nu = 0
    double A = 0.5 * kappa, B = 2.0 - 0.5 * kappa, C = -2.0 * nu;
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) throw std::domain_error("HypergeomPsi: complex roots");
    double s = std::sqrt(disc);
    double r1 = (-B - s) / (2.0 * A), r2 = (-B + s) / (2.0 * A);
    return {std::min(r1, r2), std::max(r1, r2)};
  }

  // Default branch: the larger root (positive on (0,1) for the families here).
  static HypergeomPsi make(double kappa, double nu, std::optional<double> beta_choice = {}) {
    HypergeomPsi h;
    h.kappa = kappa;
    h.nu = nu;
    h.beta = beta_choice ? *beta_choice : beta_roots(kappa, nu).second;
    if (std::abs(quadratic_residual(kappa, nu, h.beta)) > 1e-12)
      throw std::invalid_argument("HypergeomPsi: beta does not solve the quadratic");
    return h;
  }

  double a() const { return 2.0 * beta; }
  double b() const { return 2.0 * beta + 8.0 / kappa - 1.0; }
  double c() const { return 2.0 * beta + 4.0 / kappa; }
};

inline double psi(double u, const HypergeomPsi& hp) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("psi: u outside (0,1)");
  double val = std::pow(u * (1.0 - u), hp.beta) * hyp2f1(hp.a(), hp.b(), hp.c(), u);
  if (!(val > 0.0)) throw std::runtime_error("psi: non-positive value (branch violation)");
  return val;
}

// ---------------------------------------------------------------------------
// Half-plane boundary Poisson excursion kernel and partition functions.
// ---------------------------------------------------------------------------

inline double poisson_kernel_H(double x, double y) {
  if (x == y) throw std::invalid_argument("poisson_kernel_H: coincident points");
  double d = x - y;
  return 1.0 / (d * d);
}

// Z = prod_i H(x, z_i)^{-rho_i/2kappa} prod_{i<j} H(z_i, z_j)^{-rho_i rho_j/4kappa}
// with H the half-plane kernel above in the identity local coordinates.
inline double partition_function_Z(double kappa, const std::vector<double>& rhos,
                                   double x, const std::vector<double>& zs) {
  if (rhos.size() != zs.size())
    throw std::invalid_argument("partition_function_Z: weight/point size mismatch");
  for (size_t i = 0; i < zs.size(); ++i) {
    if (zs[i] == x) throw std::invalid_argument("partition_function_Z: point at the seed");
    for (size_t j = i + 1; j < zs.size(); ++j)
      if (zs[i] == zs[j]) throw std::invalid_argument("partition_function_Z: coincident points");
  }
  double log_z = 0.0;
  for (size_t i = 0; i < zs.size(); ++i)
    log_z += rhos[i] / kappa * std::log(std::abs(x - zs[i]));
  for (size_t i = 0; i < zs.size(); ++i)
    for (size_t j = i + 1; j < zs.size(); ++j)
      log_z += rhos[i] * rhos[j] / (2.0 * kappa) * std::log(std::abs(zs[i] - zs[j]));
  return std::exp(log_z);
}

// Scaling degree of log Z under z -> lambda z (exact in the weights).
inline double partition_function_scaling_degree(double kappa, const std::vector<double>& rhos) {
  double deg = 0.0;
  for (double r : rhos) deg += r / kappa;
  for (size_t i = 0; i < rhos.size(); ++i)
    for (size_t j = i + 1; j < rhos.size(); ++j) deg += rhos[i] * rhos[j] / (2.0 * kappa);
  return deg;
}

// ---------------------------------------------------------------------------
// Change-of-measure density M_t = prod_i g'(z_i)^{alpha_i} |Z_i|^{beta_i}
//                                 prod_{i<j} |Z_j - Z_i|^{eta_ij},
// a local martingale under chordal SLE_kappa when
// alpha_i = (kappa/4) beta_i (beta_i - 1) + beta_i,  eta_ij = (kappa/2) beta_i beta_j.
// The transformed process is SLE_kappa(rho) with rho_i = kappa beta_i.
// ---------------------------------------------------------------------------

inline double rhodens_alpha(double kappa, double beta) {
  return 0.25 * kappa * beta * (beta - 1.0) + beta;
}

inline double rhodens_eta(double kappa, double beta_i, double beta_j) {
  return 0.5 * kappa * beta_i * beta_j;
}

inline double rhodens_martingale(double kappa, const std::vector<double>& betas,
                                 const DriverState& state) {
  if (betas.size() != state.points.size())
    throw std::invalid_argument("rhodens_martingale: beta/point size mismatch");
  double log_m = 0.0;
  for (size_t i = 0; i < betas.size(); ++i) {
    const auto& p = state.points[i];
    if (!p.alive) throw std::invalid_argument("rhodens_martingale: dead marked point");
    if (p.at_infinity) continue;
    log_m += rhodens_alpha(kappa, betas[i]) * p.log_gprime;
    log_m += betas[i] * std::log(std::abs(p.Z));
    for (size_t j = i + 1; j < betas.size(); ++j) {
      const auto& pj = state.points[j];
      if (pj.at_infinity) continue;
      log_m += rhodens_eta(kappa, betas[i], betas[j]) * std::log(std::abs(pj.Z - p.Z));
    }
  }
  return std::exp(log_m);
}

// Disintegration density of the swallowing observable: for a state tracking
// the points 1 and z (in this order),
//   c * g'(z) (g(z)-W)^{-4/kappa} (g(z)-g(1))^{8/kappa-2} (g(1)-W)^{1-4/kappa},
// c = 1/B(1-4/kappa, 8/kappa-1). Matches rhodens_martingale with
// betas = ((kappa-4)/kappa, -4/kappa) up to the constant c.
inline double conditional_D_density(double kappa, const DriverState& state) {
  if (!(kappa > 4.0 && kappa < 8.0))
    throw std::domain_error("conditional_D_density: kappa outside (4,8)");
  if (state.points.size() < 2)
    throw std::invalid_argument("conditional_D_density: need tracked points 1 and z");
  const auto& p1 = state.points[0];
  const auto& pz = state.points[1];
  if (!p1.alive || !pz.alive) throw std::invalid_argument("conditional_D_density: swallowed point");
  double c = 1.0 / beta_function(1.0 - 4.0 / kappa, 8.0 / kappa - 1.0);
  double log_v = pz.log_gprime - 4.0 / kappa * std::log(pz.Z) +
                 (8.0 / kappa - 2.0) * std::log(pz.Z - p1.Z) +
                 (1.0 - 4.0 / kappa) * std::log(p1.Z);
  return c * std::exp(log_v);
}

// ---------------------------------------------------------------------------
// First-exit classification for SLE_kappa(rho) with ordered marked points.
// rhobar_k = rho_1 + ... + rho_k; the list must satisfy rhobar_n = kappa - 6,
// which normalize_weights can arrange by appending a balancing weight (the
// image of the point at infinity under the cyclic ordering).
// ---------------------------------------------------------------------------

struct ExitPoint {
  size_t k;
};  // trace accumulates at z_k and nowhere else in [z_1, z_n]
struct ExitInterval {
  size_t k;
};  // trace accumulates at a single point of [z_k, z_{k+1}]
struct ExitUnclassified {};
using ExitDescriptor = std::variant<ExitPoint, ExitInterval, ExitUnclassified>;

inline std::vector<double> normalize_exit_weights(double kappa, std::vector<double> rhos) {
  double sum = 0.0;
  for (double r : rhos) sum += r;
  double balance = kappa - 6.0 - sum;
  if (std::abs(balance) > 1e-12) rhos.push_back(balance);
  return rhos;
}

inline ExitDescriptor classify_exit(double kappa, const std::vector<double>& rhos_in,
                                    bool normalize = true) {
  std::vector<double> rhos = normalize ? normalize_exit_weights(kappa, rhos_in) : rhos_in;
  size_t n = rhos.size();
  if (n == 0) return ExitUnclassified{};
  std::vector<double> bar(n);
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    acc += rhos[i];
    bar[i] = acc;
  }
  if (std::abs(bar[n - 1] - (kappa - 6.0)) > 1e-9) return ExitUnclassified{};
  const double tol = 1e-12;
  const double hi = kappa / 2.0 - 2.0, lo = kappa / 2.0 - 4.0;
  auto ge_hi = [&](double v) { return v >= hi - tol; };
  auto le_lo = [&](double v) { return v <= lo + tol; };
  // Case 1: exit exactly at z_k.
  for (size_t k = 1; k <= n; ++k) {
    bool ok = true;
    for (size_t i = 1; i < k && ok; ++i) ok = ge_hi(bar[i - 1]);
    for (size_t i = k; i < n && ok; ++i) ok = le_lo(bar[i - 1]);
    if (ok) return ExitPoint{k};
  }
  // Case 2: exit inside [z_k, z_{k+1}].
  for (size_t k = 1; k < n; ++k) {
    bool ok = bar[k - 1] > lo + tol && bar[k - 1] < hi - tol;
    for (size_t i = 1; i < k && ok; ++i) ok = ge_hi(bar[i - 1]);
    for (size_t i = k + 1; i < n && ok; ++i) ok = le_lo(bar[i - 1]);
    if (ok) return ExitInterval{k};
  }
  return ExitUnclassified{};
}

// ---------------------------------------------------------------------------
// Cross-ratio of four boundary points, in the order (x, z1, y, z2).
// ---------------------------------------------------------------------------

inline double cross_ratio(double x, double z1, double y, double z2) {
  double den = (y - x) * (z2 - z1);
  if (den == 0.0) throw std::invalid_argument("cross_ratio: degenerate configuration");
  return (z1 - x) * (z2 - y) / den;
}

// ---------------------------------------------------------------------------
// Dual parameter tables for the commuting pairs (kappa, 16/kappa).
// ---------------------------------------------------------------------------

enum class DualTable { Thm1, Thm2, Table1, Table2, Table3 };

struct DualEntry {
  std::string label;  // point name in the configuration
  bool is_seed = false;
  Rational rho;  // meaningful when !is_seed
};

struct DualRow {
  Rational kappa;
  std::vector<DualEntry> entries;

  Rational weight_sum() const {
    Rational s(0);
    for (const auto& e : entries)
      if (!e.is_seed) s = s + e.rho;
    return s;
  }
};

struct DualParamPair {
  DualTable table;
  Rational kappa, kappa_hat;
  DualRow direct, dual;
};

namespace detail {
inline Rational require_rational(double kappa) {
  auto r = rational_from_double(kappa);
  if (!r || r->num <= 0) throw std::invalid_argument("dual_params: kappa must be a (positive) rational");
  return *r;
}
}  // namespace detail

// Returns the direct-kappa row and the dual (16/kappa) row of the requested
// commuting system. Optional rho1 parameterizes the one-parameter family of
// Table1 (default: symmetric split of the sum rule).
inline DualParamPair dual_params(DualTable table, double kappa_in,
                                 std::optional<Rational> rho1_opt = {}) {
  Rational kappa = detail::require_rational(kappa_in);
  Rational kappa_hat = Rational(16) / kappa;
  double kd = kappa.value();
  auto seed = [](const std::string& lab) { return DualEntry{lab, true, Rational(0)}; };
  auto pt = [](const std::string& lab, Rational r) { return DualEntry{lab, false, r}; };
  Rational two(2), four(4), six(6);
  Rational mk2 = -(kappa / two);          // -kappa/2
  Rational mh2 = -(kappa_hat / two);      // -kappa_hat/2
  DualParamPair out;
  out.table = table;
  out.kappa = kappa;
  out.kappa_hat = kappa_hat;
  out.direct.kappa = kappa;
  out.dual.kappa = kappa_hat;
  switch (table) {
    case DualTable::Thm1: {
      if (!(kd > 4.0 && kd < 8.0)) throw std::domain_error("dual_params: Thm1 needs kappa in (4,8)");
      out.direct.entries = {seed("0"), pt("1", kappa - four), pt("D", Rational(-4))};
      out.dual.entries = {seed("D"), pt("0", mh2), pt("1", kappa_hat - four),
                          pt("D+", kappa_hat - two)};
      break;
    }
    case DualTable::Thm2: {
      if (!(kd >= 8.0)) throw std::domain_error("dual_params: Thm2 needs kappa >= 8");
      out.direct.entries = {seed("0"), pt("G", Rational(-4)), pt("1", kappa - four)};
      out.dual.entries = {seed("G"), pt("G-", kappa_hat / two), pt("G+", kappa_hat / two - two),
                          pt("0", mh2), pt("1", kappa_hat - four)};
      break;
    }
    case DualTable::Table1: {
      if (!(kd > 4.0)) throw std::domain_error("dual_params: Table1 needs kappa > 4");
      Rational sum_rule = (kappa - four) * Rational(3, 2);
      Rational rho1 = rho1_opt ? *rho1_opt : sum_rule / two;
      Rational rho2 = sum_rule - rho1;
      auto hat = [&](Rational r) { return -(four / kappa) * r; };
      out.direct.entries = {seed("x"), pt("z1", rho1), pt("y", mk2), pt("z2", rho2)};
      out.dual.entries = {pt("x", mh2), pt("z1", hat(rho1)), seed("y"), pt("z2", hat(rho2))};
      break;
    }
    case DualTable::Table2: {
      if (!(kd > 4.0 && kd < 8.0))
        throw std::domain_error("dual_params: Table2 needs kappa in (4,8)");
      out.direct.entries = {seed("x"), pt("z1", kappa - four), pt("y", mk2),
                            pt("z2", kappa / two - four), pt("z3", two)};
      out.dual.entries = {pt("x", mh2), pt("z1", kappa_hat - four), seed("y"),
                          pt("z2", kappa_hat - two), pt("z3", mh2)};
      break;
    }
    case DualTable::Table3: {
      if (!(kd >= 8.0)) throw std::domain_error("dual_params: Table3 needs kappa >= 8");
      out.direct.entries = {pt("z1", Rational(-2)), pt("y", mk2), pt("z2", kappa / two - two),
                            seed("x"), pt("z3", kappa - four), pt("z4", two)};
      out.dual.entries = {pt("z1", kappa_hat / two), seed("y"), pt("z2", kappa_hat / two - two),
                          pt("x", mh2), pt("z3", kappa_hat - four), pt("z4", mh2)};
      break;
    }
  }
  // kappa kappa_hat = 16 rows: rho_hat = -(4/kappa) rho at shared non-seed
  // positions, exactly in rational arithmetic.
  if (table == DualTable::Table1 || table == DualTable::Table2 || table == DualTable::Table3) {
    for (size_t i = 0; i < out.direct.entries.size(); ++i) {
      const auto& d = out.direct.entries[i];
      const auto& h = out.dual.entries[i];
      if (d.is_seed || h.is_seed) continue;
      if (h.rho != -(four / kappa) * d.rho)
        throw std::logic_error("dual_params: rho_hat consistency violated");
    }
  }
  return out;
}

// Plain-double weights of the dual row, in configuration order (non-seed).
inline std::vector<double> dual_weights(const DualParamPair& pair) {
  std::vector<double> w;
  for (const auto& e : pair.dual.entries)
    if (!e.is_seed) w.push_back(e.rho.value());
  return w;
}

}  // namespace sle
