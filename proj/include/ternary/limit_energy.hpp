#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ternary/grid.hpp"
#include "ternary/lens.hpp"
#include "ternary/torus_green.hpp"

namespace ternary {

enum class Placement { on_interface, in_bulk };

/** Coefficients of the first-order droplet energy
 *
 *    e0(m) = (perimeter cost) sqrt(m) + c2 m^2 + c3 m,
 *
 *  with perimeter cost c1 for droplets on a majority interface and 2 sqrt(pi)
 *  for droplets in the bulk.
 *
 *  The self-interaction coefficients need a scale convention: the droplet
 *  self energy (1/(eta^4 |log eta|)) int int_{Omega_0^2} G splits into the
 *  universal log part and a shape-plus-torus remainder,
 *
 *    c2_shape(eta) = Gamma00 [ 1/(2 pi) + (c_planar(shape) + R(0)) / |log eta| ],
 *
 *  where c_planar is the planar log-kernel self energy of the unit-mass
 *  shape (disc: (2 ln pi + 1)/(8 pi)). c_planar is measured here through the
 *  torus interaction integral of a raster at reference_area, with the exact
 *  rescaling correction removed, and the assembled c2 is reported at the
 *  documented reference scale eta_ref. The lens spreads mass farther than
 *  the disc, so c_planar(lens) < c_planar(disc) and droplets prefer the
 *  interface on both terms.
 */
struct LimitConstants {
  double c1 = 0.0;
  double c2_ball = 0.0; // assembled at eta_ref, includes Gamma00
  double c2_lens = 0.0;
  double c3 = 0.0; // quadrature of the background interaction; ~0 by mean zero
  double c2_ball_planar = 0.0; // planar unit-mass shape constants, no Gamma00
  double c2_lens_planar = 0.0;
  double gamma00 = 0.0, gamma10 = 0.0, gamma20 = 0.0;
  double eta_ref = 0.0;
  double reference_area = 0.0;
  double robin = 0.0;
  double sup_regular = 0.0;
  int grid_n = 0;
  bool c3_overridden = false;
};

struct ConstantsOptions {
  int grid_n = 256;
  double reference_area = 0.045; // raster area for the shape constants
  double eta_ref = 1.0 / 64.0;   // droplet scale the c2 values refer to
  int mean_quadrature_n = 384;   // Richardson base grid for c3
  std::optional<double> c3_override = std::nullopt;
};

inline LimitConstants compute_constants(const TorusGreen &g, double Gamma00,
                                        double Gamma10, double Gamma20,
                                        const ConstantsOptions &opt = {}) {
  const double A = opt.reference_area;
  if (A <= 0.0 || A > 0.2)
    throw std::invalid_argument("compute_constants: reference_area outside (0, 0.2]");
  if (opt.eta_ref <= 0.0 || opt.eta_ref >= 1.0)
    throw std::invalid_argument("compute_constants: eta_ref outside (0,1)");
  // the extrapolation below rasters at A/2 as well; that is the critical size
  if (std::sqrt(0.5 * A / std::numbers::pi_v<double>) < 8.0 / opt.grid_n)
    throw std::invalid_argument(
        "compute_constants: grid too coarse for the reference shapes");

  LimitConstants c;
  c.c1 = c1_constant();
  c.gamma00 = Gamma00;
  c.gamma10 = Gamma10;
  c.gamma20 = Gamma20;
  c.eta_ref = opt.eta_ref;
  c.reference_area = A;
  c.grid_n = opt.grid_n;
  c.robin = g.robin();
  c.sup_regular = g.sup_regular_part();

  // planar constant from the torus integral at one raster area: remove the
  // regular part at the origin and the log rescaling of the planar kernel.
  // The remainder is the curvature of R over the shape, linear in area, so
  // sampling at A and A/2 and extrapolating cancels it.
  auto planar = [&](double area, bool disc_shape) {
    const double r = std::sqrt(area / std::numbers::pi_v<double>);
    const double ch = lens_chord(area);
    const DensityGrid s =
        disc_shape ? rasterize(opt.grid_n,
                               [&](double x, double y) {
                                 return x * x + y * y <= r * r;
                               })
                   : rasterize(opt.grid_n, [&](double x, double y) {
                       return lens_contains(x, y, 0.0, 0.0, ch);
                     });
    return interaction_integral(g, s, s) / (area * area) +
           std::log(area) / (4.0 * kPi) - c.robin;
  };
  c.c2_ball_planar = 2.0 * planar(A / 2.0, true) - planar(A, true);
  c.c2_lens_planar = 2.0 * planar(A / 2.0, false) - planar(A, false);

  const double log_eta = std::abs(std::log(opt.eta_ref));
  c.c2_ball =
      Gamma00 * (1.0 / (2.0 * kPi) + (c.c2_ball_planar + c.robin) / log_eta);
  c.c2_lens =
      Gamma00 * (1.0 / (2.0 * kPi) + (c.c2_lens_planar + c.robin) / log_eta);

  if (opt.c3_override) {
    c.c3 = *opt.c3_override;
    c.c3_overridden = true;
  } else {
    const double gam = 0.5 * (Gamma10 + Gamma20);
    c.c3 = gam * g.mean_quadrature(0.0, 0.0, opt.mean_quadrature_n);
  }
  return c;
}

inline double e0(double m, const LimitConstants &c,
                 Placement where = Placement::on_interface) {
  if (m <= 0.0)
    throw std::domain_error("e0: mass must be positive");
  const double per = where == Placement::on_interface
                         ? c.c1
                         : 2.0 * std::sqrt(std::numbers::pi_v<double>);
  const double c2 =
      where == Placement::on_interface ? c.c2_lens : c.c2_ball;
  return per * std::sqrt(m) + c2 * m * m + c.c3 * m;
}

/** Limit droplet system: masses and placements only; geometry has already
 *  been optimized out (lens on the interface, disc in the bulk).
 */
struct DropletConfig {
  std::vector<double> masses;
  std::vector<Placement> placements;

  void validate() const {
    if (masses.size() != placements.size())
      throw std::invalid_argument("DropletConfig: size mismatch");
    for (double m : masses)
      if (m <= 0.0)
        throw std::invalid_argument("DropletConfig: masses must be positive");
  }
  double total_mass() const {
    double s = 0.0;
    for (double m : masses)
      s += m;
    return s;
  }
};

struct Energy0 {
  bool admissible = false; // false encodes the +infinity branch
  double value = 0.0;      // meaningful only when admissible
};

inline Energy0 E0(const DropletConfig &cfg, double M,
                  const LimitConstants &c) {
  cfg.validate();
  Energy0 r;
  if (std::abs(cfg.total_mass() - M) > 1e-12 * std::max(1.0, std::abs(M)))
    return r; // mass constraint violated: the infinite branch
  r.admissible = true;
  for (std::size_t i = 0; i < cfg.masses.size(); ++i)
    r.value += e0(cfg.masses[i], c, cfg.placements[i]);
  return r;
}

struct SplitResult {
  int count = 0;
  std::vector<double> masses;
  double energy = 0.0;
};

// energy of N equal on-interface droplets sharing mass M
inline double equal_split_energy(double M, int N, const LimitConstants &c) {
  return N * e0(M / N, c, Placement::on_interface);
}

struct Thresholds {
  double concavity = 0.0;             // below this mass e0 is concave
  double continuous_count_base = 0.0; // continuous optimum is M / base
  double two_mass = 0.0;              // above this M two droplets beat one
};

inline Thresholds thresholds(const LimitConstants &c) {
  if (c.c2_lens <= 0.0)
    throw std::domain_error("thresholds: require positive c2 (Gamma00 > 0)");
  Thresholds t;
  t.concavity = std::pow(c.c1 / (8.0 * c.c2_lens), 2.0 / 3.0);
  t.continuous_count_base = std::pow(c.c1 / (2.0 * c.c2_lens), 2.0 / 3.0);
  t.two_mass =
      std::pow(2.0 * (std::sqrt(2.0) - 1.0) * c.c1 / c.c2_lens, 2.0 / 3.0);
  return t;
}

// droplet count never exceeds 1 + M / concavity_threshold
inline double count_bound(double M, const LimitConstants &c) {
  return 1.0 + M / thresholds(c).concavity;
}

/** Optimal equal-mass splitting of total mass M over on-interface droplets:
 *  the minimizer of N (c1 sqrt(M/N) + c2 (M/N)^2) over integers, which lies
 *  in {1, floor(Nc), ceil(Nc)} around the continuous optimum
 *  Nc = M (c1/(2 c2))^(-2/3). Ties resolve to the smaller count.
 */
inline SplitResult optimal_split(double M, const LimitConstants &c) {
  if (M <= 0.0)
    throw std::domain_error("optimal_split: mass must be positive");
  SplitResult r;
  std::vector<int> candidates = {1};
  if (c.c2_lens > 0.0) {
    const double nc = M / thresholds(c).continuous_count_base;
    const int lo = static_cast<int>(std::floor(nc));
    const int hi = static_cast<int>(std::ceil(nc));
    if (lo >= 1)
      candidates.push_back(lo);
    if (hi >= 1)
      candidates.push_back(hi);
  }
  int best = 0;
  double bestE = 0.0;
  for (int n : candidates) {
    const double e = equal_split_energy(M, n, c);
    if (best == 0 || e < bestE - 1e-15 * std::abs(bestE) ||
        (std::abs(e - bestE) <= 1e-15 * std::abs(bestE) && n < best)) {
      best = n;
      bestE = e;
    }
  }
  r.count = best;
  r.energy = bestE;
  r.masses.assign(best, M / best);
  return r;
}

/** Exhaustive check of the splitting reduction: dynamic program over all
 *  partitions of M quantized to mass_grid units. State count is capped so a
 *  misconfigured grid fails loudly instead of stalling.
 */
inline SplitResult split_bruteforce(double M, const LimitConstants &c,
                                    double mass_grid) {
  if (M <= 0.0 || mass_grid <= 0.0)
    throw std::domain_error("split_bruteforce: M and mass_grid must be positive");
  const std::int64_t W = std::llround(M / mass_grid);
  if (W < 1)
    throw std::invalid_argument("split_bruteforce: mass_grid coarser than M");
  if (W * W > 4'000'000)
    throw std::invalid_argument("split_bruteforce: state budget exceeded");
  const double unit = M / static_cast<double>(W); // exact total mass
  std::vector<double> dp(W + 1, 0.0);
  std::vector<int> first(W + 1, 0);
  for (std::int64_t w = 1; w <= W; ++w) {
    double best = 0.0;
    int barg = 0;
    for (std::int64_t p = 1; p <= w; ++p) {
      const double e = e0(p * unit, c) + dp[w - p];
      if (barg == 0 || e < best) {
        best = e;
        barg = static_cast<int>(p);
      }
    }
    dp[w] = best;
    first[w] = barg;
  }
  SplitResult r;
  r.energy = dp[W];
  std::int64_t w = W;
  while (w > 0) {
    r.masses.push_back(first[w] * unit);
    w -= first[w];
  }
  std::sort(r.masses.begin(), r.masses.end(), std::greater<>());
  r.count = static_cast<int>(r.masses.size());
  return r;
}

// --- admissibility checks -------------------------------------------------

// isoperimetric constant of the torus: inf over a in (0, 1/2] of
// min(disc perimeter, two parallel lines) / sqrt(a)
inline double isoperimetric_constant_oracle() {
  auto ratio = [](double a) {
    const double per =
        std::min(2.0 * std::sqrt(std::numbers::pi_v<double> * a), 2.0);
    return per / std::sqrt(a);
  };
  double best = ratio(0.5), barg = 0.5;
  for (int i = 1; i <= 4000; ++i) {
    const double a = 0.5 * i / 4000.0;
    const double v = ratio(a);
    if (v < best) {
      best = v;
      barg = a;
    }
  }
  double step = 0.5 / 4000.0;
  for (int round = 0; round < 40; ++round) {
    for (int d = -2; d <= 2; ++d) {
      const double a = std::clamp(barg + d * step / 2.0, 1e-12, 0.5);
      const double v = ratio(a);
      if (v < best) {
        best = v;
        barg = a;
      }
    }
    step /= 2.0;
  }
  return best;
}

inline double isoperimetric_constant() {
  static const double value = [] {
    const double oracle = isoperimetric_constant_oracle();
    const double closed = 2.0 * std::sqrt(2.0);
    if (std::abs(oracle - closed) > 1e-6)
      throw std::logic_error("isoperimetric constant oracle mismatch");
    return closed;
  }();
  return value;
}

// interaction constant of the sandwich bound below
inline double c3R_constant(double sup_regular) {
  return (1.0 + std::log(3.0) + std::log(std::numbers::pi_v<double>)) /
             (4.0 * kPi) +
         sup_regular;
}

struct InteractionBounds {
  double lower = 0.0, upper = 0.0;
};

/** Rearrangement sandwich for int_{E1 x E2} G over disjoint sets of the
 *  given areas: the log kernel is positive on the torus (diameter < 1), so
 *
 *    -|E1||E2| sup|R|  <=  int int G  <=  ((1 - ln a1 + ln pi)/(4 pi) + sup|R|) |E1||E2|
 *
 *  with a1 the larger area. Areas must lie in (0, 1).
 */
inline InteractionBounds interaction_bounds(double a1, double a2,
                                            double sup_regular) {
  if (a1 <= 0.0 || a2 <= 0.0 || a1 >= 1.0 || a2 >= 1.0)
    throw std::domain_error("interaction_bounds: areas must lie in (0,1)");
  const double big = std::max(a1, a2);
  InteractionBounds b;
  b.lower = -a1 * a2 * sup_regular;
  b.upper = a1 * a2 *
            ((1.0 - std::log(big) + std::log(std::numbers::pi_v<double>)) /
                 (4.0 * kPi) +
             sup_regular);
  return b;
}

struct CheckResult {
  bool ok = false;
  double lhs = 0.0, rhs = 0.0, margin = 0.0;
};

/** Majority-phase coefficient smallness: interfaces stay dominant at zeroth
 *  order when max_i (|gamma_i1| + |gamma_i2|) < sqrt(2) c_iso / c_3R.
 */
inline CheckResult check_negative_coefficients_zeroth(double g11, double g12,
                                                      double g22,
                                                      double sup_regular) {
  CheckResult r;
  r.lhs = std::max(std::abs(g11) + std::abs(g12),
                   std::abs(g12) + std::abs(g22));
  r.rhs = std::sqrt(2.0) * isoperimetric_constant() / c3R_constant(sup_regular);
  r.margin = r.rhs - r.lhs;
  r.ok = r.lhs < r.rhs;
  return r;
}

/** First-order coefficient smallness at total droplet mass M, with safety
 *  fraction s in (0,1):
 *  (c_3R/2) M (|Gamma10|+|Gamma20|) + 2 M^2 |Gamma00| < s c_iso sqrt(M).
 */
inline CheckResult check_negative_coefficients_first(double Gamma10,
                                                     double Gamma20,
                                                     double Gamma00, double M,
                                                     double s,
                                                     double sup_regular) {
  if (M <= 0.0)
    throw std::domain_error("check_negative_coefficients_first: M must be positive");
  if (s <= 0.0 || s >= 1.0)
    throw std::domain_error("check_negative_coefficients_first: s outside (0,1)");
  CheckResult r;
  r.lhs = 0.5 * c3R_constant(sup_regular) * M *
              (std::abs(Gamma10) + std::abs(Gamma20)) +
          2.0 * M * M * std::abs(Gamma00);
  r.rhs = s * isoperimetric_constant() * std::sqrt(M);
  r.margin = r.rhs - r.lhs;
  r.ok = r.lhs < r.rhs;
  return r;
}

} // namespace ternary
