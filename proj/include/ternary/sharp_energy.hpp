#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ternary/grid.hpp"
#include "ternary/lens.hpp"
#include "ternary/limit_energy.hpp"
#include "ternary/torus_green.hpp"

namespace ternary {

/** Couplings and discretization for the sharp-interface droplet energy.
 *
 *  gamma11/gamma12/gamma22 are the O(1) majority couplings. The droplet
 *  couplings are given unscaled; the energy applies the droplet scalings
 *  gamma_i0 = Gamma_i0 / eta and gamma_00 = Gamma_00 / (eta^3 |log eta|).
 *  sigma is the common interface tension (the symmetric-well case).
 */
struct ModelParams {
  double eta = 1.0 / 32.0;
  double gamma11 = 0.0, gamma12 = 0.0, gamma22 = 0.0;
  double Gamma10 = 1.0, Gamma20 = 1.0, Gamma00 = 1.0;
  double sigma = 1.0;
  int raster_n = 256;
  int supersample = 4;

  void validate() const {
    if (eta <= 0.0 || eta >= 0.5)
      throw std::invalid_argument("ModelParams: eta outside (0, 1/2)");
    if (sigma <= 0.0)
      throw std::invalid_argument("ModelParams: sigma must be positive");
    DensityGrid::check_size(raster_n);
  }
  double gamma10_scaled() const { return Gamma10 / eta; }
  double gamma20_scaled() const { return Gamma20 / eta; }
  double gamma00_scaled() const {
    return Gamma00 / (eta * eta * eta * std::abs(std::log(eta)));
  }
};

enum class DropletKind { lens, disc };

/** One minority droplet. mass is measured in eta^2 units: the droplet covers
 *  area eta^2 * mass. A lens sits with its chord on a lamellar interface
 *  (center = chord midpoint); a disc floats inside majority band `band`.
 */
struct Droplet {
  DropletKind kind = DropletKind::lens;
  double x = 0.0, y = 0.0;
  double mass = 1.0;
  int band = 1; // discs only: 1 or 2

  // radius of the covering circle at scale eta
  double bounding_radius(double eta) const {
    if (kind == DropletKind::disc)
      return eta * std::sqrt(mass / std::numbers::pi_v<double>);
    return 0.5 * eta * lens_chord(mass);
  }
};

/** Sharp-interface configuration: a horizontal lamella decorated with
 *  droplets. Omega1 = { lo <= y < hi }, Omega2 the complement, Omega0 the
 *  droplet union; droplet areas are carved out of the band containing them.
 */
struct SharpConfig {
  double lo = -0.25, hi = 0.25;
  std::vector<Droplet> droplets;

  double band_width() const { return hi - lo; }

  double total_droplet_mass() const {
    double s = 0.0;
    for (const Droplet &d : droplets)
      s += d.mass;
    return s;
  }

  // torus distance from y to the nearest lamellar interface
  double interface_distance(double y) const {
    return std::min(std::abs(min_image(y - lo)), std::abs(min_image(y - hi)));
  }

  bool in_band1(double y) const {
    const double rel = y - lo - std::floor(y - lo); // wrap to [0,1)
    return rel < band_width();
  }

  // 0 droplet, 1 band one, 2 band two
  int phase_of(double x, double y, double eta) const {
    for (const Droplet &d : droplets) {
      const double dx = min_image(x - d.x), dy = min_image(y - d.y);
      if (d.kind == DropletKind::disc) {
        const double r = d.bounding_radius(eta);
        if (dx * dx + dy * dy <= r * r)
          return 0;
      } else {
        const double chord = eta * lens_chord(d.mass);
        if (lens_contains(dx, dy, 0.0, 0.0, chord))
          return 0;
      }
    }
    return in_band1(y) ? 1 : 2;
  }

  /** Geometric admissibility at scale eta: positive masses, bands of positive
   *  width, lenses centered on an interface, discs strictly inside the band
   *  they claim, covering circles pairwise disjoint.
   */
  void validate(double eta) const {
    if (!(hi > lo) || band_width() >= 1.0)
      throw std::invalid_argument("SharpConfig: need 0 < hi - lo < 1");
    for (const Droplet &d : droplets) {
      if (d.mass <= 0.0)
        throw std::invalid_argument("SharpConfig: droplet mass must be positive");
      if (d.kind == DropletKind::lens) {
        const double snap = std::min(std::abs(min_image(d.y - lo)),
                                     std::abs(min_image(d.y - hi)));
        if (snap > 1e-12)
          throw std::invalid_argument(
              "SharpConfig: lens must be centered on a lamellar interface");
        // the far interface must clear the lens arcs
        const double reach = eta * lens_height(lens_chord(d.mass));
        if (reach >= std::min(band_width(), 1.0 - band_width()))
          throw std::invalid_argument("SharpConfig: lens taller than its bands");
      } else {
        if (d.band != 1 && d.band != 2)
          throw std::invalid_argument("SharpConfig: disc band must be 1 or 2");
        if (in_band1(d.y) != (d.band == 1))
          throw std::invalid_argument("SharpConfig: disc center not in its band");
        if (interface_distance(d.y) <= d.bounding_radius(eta))
          throw std::invalid_argument("SharpConfig: disc touches an interface");
      }
    }
    for (std::size_t a = 0; a < droplets.size(); ++a)
      for (std::size_t b = a + 1; b < droplets.size(); ++b) {
        const double dx = min_image(droplets[a].x - droplets[b].x);
        const double dy = min_image(droplets[a].y - droplets[b].y);
        const double need = droplets[a].bounding_radius(eta) +
                            droplets[b].bounding_radius(eta);
        if (dx * dx + dy * dy <= need * need)
          throw std::invalid_argument("SharpConfig: droplets overlap");
      }
  }
};

// phase areas {|Omega1|, |Omega2|, |Omega0|} by primitive arithmetic
inline std::array<double, 3> phase_areas(const SharpConfig &c, double eta) {
  double a0 = 0.0, carve1 = 0.0;
  for (const Droplet &d : c.droplets) {
    const double a = eta * eta * d.mass;
    a0 += a;
    if (d.kind == DropletKind::lens)
      carve1 += 0.5 * a; // symmetric across the interface
    else if (d.band == 1)
      carve1 += a;
  }
  const double w = c.band_width();
  return {w - carve1, 1.0 - w - (a0 - carve1), a0};
}

struct PairwisePerimeters {
  double p12 = 0.0; // majority-majority interface length
  double p10 = 0.0; // band-one/droplet interface
  double p20 = 0.0;
  double total() const { return p12 + p10 + p20; }
};

/** Interface lengths by primitive arithmetic: the lamella contributes two
 *  unit-length interfaces, each lens removes its chord from them and splits
 *  its arcs between p10 and p20, each disc adds its circle to its band.
 */
inline PairwisePerimeters pairwise_perimeters(const SharpConfig &c,
                                              double eta) {
  PairwisePerimeters p;
  p.p12 = 2.0;
  for (const Droplet &d : c.droplets) {
    if (d.kind == DropletKind::lens) {
      p.p12 -= eta * lens_chord(d.mass);
      const double arcs = eta * lens_perimeter(d.mass);
      p.p10 += 0.5 * arcs;
      p.p20 += 0.5 * arcs;
    } else {
      const double circle =
          2.0 * eta * std::sqrt(std::numbers::pi_v<double> * d.mass);
      (d.band == 1 ? p.p10 : p.p20) += circle;
    }
  }
  if (p.p12 < 0.0)
    throw std::invalid_argument("pairwise_perimeters: chords exceed the interface");
  return p;
}

struct PhaseRaster {
  DensityGrid chi1, chi2, chi0;
};

/** Joint rasterization of the partition: each sample point is classified
 *  once, so the three coverages sum to one in every cell.
 */
inline PhaseRaster rasterize_config(const SharpConfig &c,
                                    const ModelParams &p) {
  const int n = p.raster_n;
  PhaseRaster r{DensityGrid(n), DensityGrid(n), DensityGrid(n)};
  const double h = 1.0 / n;
  const int ss = std::max(2, p.supersample);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = r.chi1.x_of(ix), y = r.chi1.y_of(iy);
      const int ph = c.phase_of(x, y, p.eta);
      bool uniform = true;
      for (int corner = 0; corner < 4 && uniform; ++corner) {
        const double px = x + (corner & 1 ? 0.5 : -0.5) * h;
        const double py = y + (corner & 2 ? 0.5 : -0.5) * h;
        uniform = c.phase_of(px, py, p.eta) == ph;
      }
      double f1 = 0.0, f2 = 0.0, f0 = 0.0;
      if (uniform) {
        (ph == 0 ? f0 : ph == 1 ? f1 : f2) = 1.0;
      } else {
        int n1 = 0, n2 = 0, n0 = 0;
        for (int sy = 0; sy < ss; ++sy)
          for (int sx = 0; sx < ss; ++sx) {
            const double px = x + ((sx + 0.5) / ss - 0.5) * h;
            const double py = y + ((sy + 0.5) / ss - 0.5) * h;
            const int q = c.phase_of(px, py, p.eta);
            (q == 0 ? n0 : q == 1 ? n1 : n2)++;
          }
        const double tot = static_cast<double>(ss) * ss;
        f1 = n1 / tot;
        f2 = n2 / tot;
        f0 = n0 / tot;
      }
      r.chi1.at(ix, iy) = f1;
      r.chi2.at(ix, iy) = f2;
      r.chi0.at(ix, iy) = f0;
    }
  }
  return r;
}

struct SharpBreakdown {
  double perimeter = 0.0;          // sigma-weighted interface length
  double majority_interaction = 0.0; // ordered double sum over i,j in {1,2}
  double cross_interaction = 0.0;    // sum_i (Gamma_i0/eta) I(chi_i, chi_0)
  double self_interaction = 0.0;     // (Gamma_00/(eta^3|log eta|)) I(chi_0, chi_0)
  double total = 0.0;
};

/** Sharp-interface energy: exact primitive perimeters plus Green
 *  interactions of the rasterized phases. The majority part follows the
 *  lamellar energy's ordered double sum (the 1-2 coupling enters twice);
 *  the droplet terms carry their eta scalings and enter once, matching the
 *  first-order decomposition of the energy.
 */
inline SharpBreakdown sharp_energy_breakdown(const SharpConfig &c,
                                             const ModelParams &p,
                                             const TorusGreen &g) {
  p.validate();
  c.validate(p.eta);
  SharpBreakdown b;
  b.perimeter = p.sigma * pairwise_perimeters(c, p.eta).total();
  const PhaseRaster r = rasterize_config(c, p);
  const DensityGrid phi1 = convolve_green(g, r.chi1);
  const DensityGrid phi2 = convolve_green(g, r.chi2);
  const DensityGrid phi0 = convolve_green(g, r.chi0);
  auto dot = [&](const DensityGrid &a, const DensityGrid &phi) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
      s += a.values[i] * phi.values[i];
    return s * a.cell_area();
  };
  const double i11 = dot(r.chi1, phi1), i22 = dot(r.chi2, phi2);
  const double i12 = dot(r.chi1, phi2);
  const double i10 = dot(r.chi1, phi0), i20 = dot(r.chi2, phi0);
  const double i00 = dot(r.chi0, phi0);
  b.majority_interaction =
      p.gamma11 * i11 + 2.0 * p.gamma12 * i12 + p.gamma22 * i22;
  b.cross_interaction = p.gamma10_scaled() * i10 + p.gamma20_scaled() * i20;
  b.self_interaction = p.gamma00_scaled() * i00;
  b.total = b.perimeter + b.majority_interaction + b.cross_interaction +
            b.self_interaction;
  return b;
}

inline double sharp_energy(const SharpConfig &c, const ModelParams &p,
                           const TorusGreen &g) {
  return sharp_energy_breakdown(c, p, g).total;
}

/** Lamellar background energy: the configuration with the droplets ignored.
 *  Follows the same raster path so differences isolate the droplet terms.
 */
inline double lamellar_energy(const SharpConfig &c, const ModelParams &p,
                              const TorusGreen &g) {
  SharpConfig bare = c;
  bare.droplets.clear();
  const SharpBreakdown b = sharp_energy_breakdown(bare, p, g);
  return b.total;
}

// (E_eta - E_L) / eta: the desk-scale first-order energy of the droplets
inline double first_order_energy(const SharpConfig &c, const ModelParams &p,
                                 const TorusGreen &g) {
  return (sharp_energy(c, p, g) - lamellar_energy(c, p, g)) / p.eta;
}

/** Background swap construction: a half-and-half lamella whose droplet mass
 *  is parked as one disc of mass M/2 at the center of each band. Band areas
 *  need no adjustment: each band loses exactly eta^2 M / 2. The perimeter
 *  exceeds the bare lamella by 2 eta sqrt(2 pi M), within the construction
 *  budget 8 pi eps + 2 eta sqrt(2 pi M) for any eps >= 0.
 */
inline SharpConfig recovery_zeroth(double M, double eta) {
  if (M <= 0.0)
    throw std::domain_error("recovery_zeroth: M must be positive");
  SharpConfig c;
  c.lo = -0.25;
  c.hi = 0.25;
  Droplet d1{DropletKind::disc, 0.0, 0.0, 0.5 * M, 1};
  Droplet d2{DropletKind::disc, 0.0, 0.5, 0.5 * M, 2};
  c.droplets = {d1, d2};
  c.validate(eta);
  return c;
}

/** First-order recovery configuration: lenses beaded along the upper
 *  interface, discs rowed along the band centerlines, bands rebalanced so
 *  the phase areas meet |Omega1| = |Omega2| = (1 - eta^2 M)/2 exactly in
 *  primitive arithmetic.
 */
inline SharpConfig recovery_first(const DropletConfig &cfg, double eta) {
  cfg.validate();
  const double M = cfg.total_mass();
  double carve1 = 0.0;
  for (std::size_t i = 0; i < cfg.masses.size(); ++i) {
    const double a = eta * eta * cfg.masses[i];
    if (cfg.placements[i] == Placement::on_interface)
      carve1 += 0.5 * a;
    else
      carve1 += a; // bulk droplets go to band one below
  }
  // |Omega1| = w - carve1 = (1 - eta^2 M)/2
  const double w = 0.5 * (1.0 - eta * eta * M) + carve1;
  if (w <= 0.0 || w >= 1.0)
    throw std::invalid_argument("recovery_first: droplet mass too large");
  SharpConfig c;
  c.lo = -0.5 * w;
  c.hi = 0.5 * w;

  std::size_t n_lens = 0, n_disc = 0;
  for (Placement pl : cfg.placements)
    (pl == Placement::on_interface ? n_lens : n_disc)++;
  std::size_t il = 0, id = 0;
  for (std::size_t i = 0; i < cfg.masses.size(); ++i) {
    Droplet d;
    d.mass = cfg.masses[i];
    if (cfg.placements[i] == Placement::on_interface) {
      d.kind = DropletKind::lens;
      d.x = (il + 0.5) / n_lens - 0.5;
      d.y = c.hi;
      ++il;
    } else {
      d.kind = DropletKind::disc;
      d.band = 1;
      d.x = (id + 0.5) / std::max<std::size_t>(1, n_disc) - 0.5;
      d.y = 0.0;
      ++id;
    }
    c.droplets.push_back(d);
  }
  c.validate(eta);
  return c;
}

/** Computable upper bound on a disc droplet's first-order energy
 *  contribution, assembled from the perimeter term, the background
 *  interaction (zero up to the mean-zero quadrature defect), and the
 *  rearrangement bound on the scaled self term.
 */
inline double ball_energy_bound(double m, const ModelParams &p,
                                double sup_regular,
                                double mean_defect = 1e-10) {
  if (m <= 0.0)
    throw std::domain_error("ball_energy_bound: mass must be positive");
  const double eta = p.eta;
  const double area = eta * eta * m;
  const double perim = 2.0 * eta * std::sqrt(std::numbers::pi_v<double> * m);
  const double cross = (std::abs(p.Gamma10) + std::abs(p.Gamma20)) / eta *
                       (area * mean_defect +
                        interaction_bounds(area, area, sup_regular).upper);
  const double self = std::abs(p.gamma00_scaled()) *
                      interaction_bounds(area, area, sup_regular).upper;
  return p.sigma * perim + cross + self;
}

/** Perimeter budget implied by the energy bound: boundary length of any
 *  admissible droplet of mass m is at most this. Lenses may exceed their
 *  energy contribution by the reclaimed chord, and the interaction terms can
 *  hide up to their rearrangement lower bounds; both allowances are added.
 */
inline double droplet_perimeter_bound(double m, const ModelParams &p,
                                      double sup_regular) {
  const double eta = p.eta;
  const double area = eta * eta * m;
  const double hidden =
      (std::abs(p.gamma00_scaled()) +
       (std::abs(p.Gamma10) + std::abs(p.Gamma20)) / eta) *
      sup_regular * area * area;
  return (ball_energy_bound(m, p, sup_regular) + hidden) / p.sigma +
         eta * lens_chord(m);
}

// {0, 128, 255} phase labels: band one black, band two mid, droplets white
inline void save_phase_pgm(const std::string &path, const SharpConfig &c,
                           const ModelParams &p) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("save_phase_pgm: cannot open " + path);
  const int n = p.raster_n;
  f << "P5\n" << n << " " << n << "\n255\n";
  std::vector<unsigned char> row(n);
  for (int iy = n - 1; iy >= 0; --iy) { // top row first
    for (int ix = 0; ix < n; ++ix) {
      const double x = (ix + 0.5) / n - 0.5, y = (iy + 0.5) / n - 0.5;
      const int ph = c.phase_of(x, y, p.eta);
      row[ix] = ph == 0 ? 255 : ph == 1 ? 0 : 128;
    }
    f.write(reinterpret_cast<const char *>(row.data()), n);
  }
}

} // namespace ternary
