#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ternary/fft.hpp"
#include "ternary/grid.hpp"

namespace ternary {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Principal exponential integral E1 for z > 0.
inline double expint_e1(double z) { return -std::expint(-z); }

/** E1(z) + log(z), continuous through z = 0 where it equals -gamma.
 *
 *  Uses the alternating series for small z (no cancellation: the log is
 *  removed symbolically), the library E1 otherwise.
 */
inline double e1_plus_log(double z) {
  if (z < 0.0)
    throw std::domain_error("e1_plus_log: negative argument");
  if (z < 0.75) {
    double sum = -kEulerGamma;
    double term = 1.0; // z^m / m! carrier
    for (int m = 1; m < 40; ++m) {
      term *= -z / m;
      const double add = -term / m;
      sum += add;
      if (std::abs(add) < 1e-18)
        break;
    }
    return sum;
  }
  return expint_e1(z) + std::log(z);
}

/** Green's function of the Laplacian on the unit torus [-1/2,1/2)^2 with the
 *  uniform background subtracted: -Delta G = delta - 1, mean-zero.
 *
 *  Evaluation uses the heat-kernel (Ewald) split at time t0 = ewald_split:
 *
 *    G(z) = (1/4pi) sum_n E1(|z+n|^2 / 4t0)
 *         + sum_{k != 0} e^{2 pi i k.z} e^{-4 pi^2 |k|^2 t0} / (4 pi^2 |k|^2)
 *         - t0
 *
 *  Both sums converge like Gaussians; the constructor computes analytic tail
 *  bounds for the chosen cutoffs so results carry a certificate. The regular
 *  part R(z) = G(z) + (1/2pi) log d(z) (d = minimal-image distance) comes from
 *  the same sum with the n = 0 term replaced by its log-free form, so it is
 *  finite on the diagonal; R(0,0) is the Robin constant of the torus.
 */
struct GreenParams {
  double ewald_split = 0.02; // heat-kernel switch time t0
  int fourier_cutoff = 12;   // reciprocal modes with |k|_inf <= cutoff
};

class TorusGreen {
public:
  using Params = GreenParams;

  explicit TorusGreen(Params p = {}) : p_(p) {
    if (p_.ewald_split <= 0.0)
      throw std::invalid_argument("TorusGreen: ewald_split must be positive");
    if (p_.fourier_cutoff < 1)
      throw std::invalid_argument("TorusGreen: fourier_cutoff must be >= 1");
    build_tables();
  }

  const Params &params() const { return p_; }

  double green(double x0, double y0, double x1, double y1) const {
    return green_diff(x0 - x1, y0 - y1);
  }

  // G evaluated at a coordinate difference; throws on the diagonal.
  double green_diff(double dx, double dy) const {
    dx = min_image(dx);
    dy = min_image(dy);
    const double r2 = dx * dx + dy * dy;
    if (r2 < 1e-28)
      throw std::domain_error("TorusGreen: coincident evaluation points");
    return -std::log(r2) / (4.0 * kPi) + regular_reduced(dx, dy);
  }

  double regular_part(double x0, double y0, double x1, double y1) const {
    return regular_diff(x0 - x1, y0 - y1);
  }

  double regular_diff(double dx, double dy) const {
    return regular_reduced(min_image(dx), min_image(dy));
  }

  // Robin constant R(x,x); independent of x by translation invariance.
  double robin() const { return regular_reduced(0.0, 0.0); }

  /** sup over the torus of |R|, by dense scan plus local refinement.
   *  R is even in each coordinate and symmetric under coordinate swap, so the
   *  scan covers one quadrant.
   */
  double sup_regular_part(int scan = 192) const {
    double best = 0.0, bx = 0.0, by = 0.0;
    for (int iy = 0; iy <= scan; ++iy)
      for (int ix = 0; ix <= iy; ++ix) {
        const double x = 0.5 * ix / scan, y = 0.5 * iy / scan;
        const double v = std::abs(regular_reduced(x, y));
        if (v > best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    double step = 0.5 / scan;
    for (int round = 0; round < 8; ++round) {
      double cx = bx, cy = by;
      for (int iy = -4; iy <= 4; ++iy)
        for (int ix = -4; ix <= 4; ++ix) {
          const double x = cx + step * ix / 4.0, y = cy + step * iy / 4.0;
          const double v = std::abs(regular_reduced(min_image(x), min_image(y)));
          if (v > best) {
            best = v;
            bx = x;
            by = y;
          }
        }
      step /= 4.0;
    }
    return best;
  }

  // Analytic bound on the dropped reciprocal modes.
  double reciprocal_tail_bound() const {
    const int K = p_.fourier_cutoff;
    const double a = 4.0 * kPi * kPi * p_.ewald_split;
    double full = 0.0, kept = 0.0;
    for (int j = -4 * K; j <= 4 * K; ++j) {
      const double t = std::exp(-a * j * j);
      full += t;
      if (std::abs(j) <= K)
        kept += t;
    }
    // every dropped mode has |k|^2 > K^2
    return (full * full - kept * kept) / (4.0 * kPi * kPi * K * K);
  }

  // Analytic bound on the dropped real-space images.
  double realspace_tail_bound() const {
    const double t0 = p_.ewald_split;
    double bound = 0.0;
    for (int m = images_ + 1; m <= images_ + 40; ++m) {
      const double d = std::max(0.1, m - 0.75); // closest approach of ring m
      bound += 8.0 * m * expint_e1(d * d / (4.0 * t0)) / (4.0 * kPi);
    }
    return bound;
  }

  // Total truncation certificate: bound on |G_computed - G_exact|.
  double truncation_bound() const {
    return reciprocal_tail_bound() + realspace_tail_bound();
  }

  /** Quadrature of int_T G(x, y0) dx, which is 0 by the mean-zero convention.
   *
   *  The log kernel is integrated in closed form over the fundamental square
   *  (int log|z| dz = pi/4 - 3/2 - (log 2)/2); the smooth remainder R gets the
   *  midpoint rule on an n and a 2n grid with Richardson extrapolation. The
   *  cut-locus kinks of R lie on cell boundaries for even n, so the h^2 error
   *  model the extrapolation cancels is valid.
   */
  double mean_quadrature(double /*yx*/, double /*yy*/, int n = 256) const {
    const double log_square = kPi / 4.0 - 1.5 - 0.5 * std::log(2.0);
    auto q = [&](int m) {
      double s = 0.0;
      for (int iy = 0; iy < m; ++iy) {
        const double zy = (iy + 0.5) / m - 0.5;
        for (int ix = 0; ix < m; ++ix) {
          const double zx = (ix + 0.5) / m - 0.5;
          s += regular_reduced(zx, zy);
        }
      }
      return s / (static_cast<double>(m) * m) - log_square / (2.0 * kPi);
    };
    const double qn = q(n), q2n = q(2 * n);
    return (4.0 * q2n - qn) / 3.0;
  }

private:
  // R at an already-reduced difference (|dx|,|dy| <= 1/2).
  double regular_reduced(double dx, double dy) const {
    const double t0 = p_.ewald_split;
    // n = 0 image, log removed symbolically:
    //   (1/4pi) E1(r^2/4t0) + (1/2pi) log r = (1/4pi)[e1_plus_log(z) + log 4t0]
    const double z0 = (dx * dx + dy * dy) / (4.0 * t0);
    double val = (e1_plus_log(z0) + std::log(4.0 * t0)) / (4.0 * kPi);
    for (int ny = -images_; ny <= images_; ++ny)
      for (int nx = -images_; nx <= images_; ++nx) {
        if (nx == 0 && ny == 0)
          continue;
        const double px = dx + nx, py = dy + ny;
        const double z = (px * px + py * py) / (4.0 * t0);
        if (z < 42.0)
          val += expint_e1(z) / (4.0 * kPi);
      }
    // reciprocal sum via 1D phase tables and half-plane folding
    const int K = p_.fourier_cutoff;
    const std::complex<double> wx(std::cos(2.0 * kPi * dx),
                                  std::sin(2.0 * kPi * dx));
    const std::complex<double> wy(std::cos(2.0 * kPi * dy),
                                  std::sin(2.0 * kPi * dy));
    phase_.resize(2 * (K + 1));
    std::complex<double> *ex = phase_.data(), *ey = ex + (K + 1);
    ex[0] = ey[0] = 1.0;
    for (int j = 1; j <= K; ++j) {
      ex[j] = ex[j - 1] * wx;
      ey[j] = ey[j - 1] * wy;
    }
    double rec = 0.0;
    for (const Mode &md : modes_) {
      const std::complex<double> px =
          md.k1 >= 0 ? ex[md.k1] : std::conj(ex[-md.k1]);
      rec += md.coef * (px * ey[md.k2]).real();
    }
    return val + rec - t0;
  }

  void build_tables() {
    const double t0 = p_.ewald_split;
    // real-space images out to where E1 underflows the certificate
    const double rc = std::sqrt(4.0 * t0 * 42.0);
    images_ = static_cast<int>(std::ceil(rc + 0.71));
    const int K = p_.fourier_cutoff;
    modes_.clear();
    for (int k2 = 0; k2 <= K; ++k2)
      for (int k1 = -K; k1 <= K; ++k1) {
        if (k2 == 0 && k1 <= 0)
          continue; // half plane; the (k,-k) partner is folded into coef
        const double kk = static_cast<double>(k1) * k1 +
                          static_cast<double>(k2) * k2;
        const double c =
            2.0 * std::exp(-4.0 * kPi * kPi * kk * t0) / (4.0 * kPi * kPi * kk);
        if (c > 1e-22)
          modes_.push_back({k1, k2, c});
      }
  }

  struct Mode {
    int k1, k2;
    double coef;
  };

  Params p_;
  int images_ = 2;
  std::vector<Mode> modes_;
  mutable std::vector<std::complex<double>> phase_; // per-eval scratch
};

/** Spectral solve of -Delta phi = rho - mean(rho) on the grid, i.e. the
 *  convolution G * rho with the zero mode dropped. Exact inverse of the
 *  continuum symbol 4 pi^2 |k|^2 on the grid's frequency band.
 */
inline DensityGrid convolve_green(const TorusGreen &, const DensityGrid &rho) {
  const int n = rho.n;
  std::vector<std::complex<double>> spec;
  fft::Engine::instance().forward(n, rho.values, spec);
  for (int iy = 0; iy < n; ++iy) {
    const int ky = fft::freq(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      const int kx = fft::freq(ix, n);
      const std::size_t id = static_cast<std::size_t>(iy) * n + ix;
      if (kx == 0 && ky == 0) {
        spec[id] = 0.0;
        continue;
      }
      const double lam =
          4.0 * kPi * kPi * (static_cast<double>(kx) * kx +
                             static_cast<double>(ky) * ky);
      spec[id] /= lam;
    }
  }
  DensityGrid phi(n);
  fft::Engine::instance().backward(n, spec, phi.values);
  return phi;
}

/** Bilinear Green interaction int int a(x) G(x,y) b(y) dx dy.
 *
 *  The zero mode is dropped inside convolve_green, so this equals the
 *  interaction of the mean-subtracted densities regardless of input means.
 */
inline double interaction_integral(const TorusGreen &g, const DensityGrid &a,
                                   const DensityGrid &b) {
  if (a.n != b.n)
    throw std::invalid_argument("interaction_integral: grid size mismatch");
  const DensityGrid phi = convolve_green(g, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    s += a.values[i] * phi.values[i];
  return s * a.cell_area();
}

} // namespace ternary
