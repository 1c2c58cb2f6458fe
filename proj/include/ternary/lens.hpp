#pragma once

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ternary {

inline constexpr double kSqrt3 = std::numbers::sqrt3_v<double>;

// area(lens) = kLensAreaFactor * chord^2
inline constexpr double kLensAreaFactor =
    2.0 * std::numbers::pi_v<double> / 9.0 - kSqrt3 / 6.0;

/** Optimal minority droplet sitting on a straight majority-majority
 *  interface: the symmetric lens bounded by two circular arcs of radius
 *  L/sqrt(3) centered at (L/2, -+ L/(2 sqrt 3)), each subtending 2pi/3 and
 *  meeting the interface at 120 degrees. The upper profile over the chord
 *  [0, L] is
 *
 *    f(x) = (L/sqrt 3) ( sqrt(1 - (3/4)(1 - 2x/L)^2) - 1/2 ),
 *
 *  with f'(0) = sqrt 3 and midpoint height L/(2 sqrt 3).
 */
inline double lens_chord(double mass) {
  if (mass <= 0.0)
    throw std::domain_error("lens_chord: mass must be positive");
  return std::sqrt(mass / kLensAreaFactor);
}

inline double lens_area(double chord) {
  return kLensAreaFactor * chord * chord;
}

inline double lens_profile(double x, double chord) {
  if (chord <= 0.0)
    throw std::domain_error("lens_profile: chord must be positive");
  if (x < 0.0 || x > chord)
    throw std::domain_error("lens_profile: x outside [0, chord]");
  const double t = 1.0 - 2.0 * x / chord;
  return chord / kSqrt3 * (std::sqrt(1.0 - 0.75 * t * t) - 0.5);
}

// full boundary length (both arcs) of the lens of the given mass
inline double lens_perimeter(double mass) {
  return 4.0 * std::numbers::pi_v<double> / (3.0 * kSqrt3) * lens_chord(mass);
}

inline double lens_radius(double chord) { return chord / kSqrt3; }
inline double lens_height(double chord) { return chord / (2.0 * kSqrt3); }

// interior angle between the interface and each arc at the contact points
inline double lens_contact_angle() {
  return 2.0 * std::numbers::pi_v<double> / 3.0;
}

// perimeter added minus interface reclaimed, per unit sqrt(mass):
// c1 = L(1) (4pi/(3 sqrt 3) - 1)
inline double c1_constant() {
  return lens_chord(1.0) *
         (4.0 * std::numbers::pi_v<double> / (3.0 * kSqrt3) - 1.0);
}

// point-in-lens test for a lens with chord endpoints (cx - L/2, cy) and
// (cx + L/2, cy): intersection of the two generating discs
inline bool lens_contains(double px, double py, double cx, double cy,
                          double chord) {
  const double r = lens_radius(chord);
  const double off = lens_height(chord); // centers at cy -+ off
  const double dx = px - cx;
  const double d1y = py - (cy - off);
  const double d2y = py - (cy + off);
  return dx * dx + d1y * d1y <= r * r && dx * dx + d2y * d2y <= r * r;
}

struct ShapeOracleResult {
  double objective = 0.0;      // min of perimeter - chord at the given mass
  double chord = 0.0;          // optimal chord of the discrete profile
  double endpoint_slope = 0.0; // first-segment slope of the discrete optimum
  double profile_dev = 0.0;    // max deviation from the arc profile, affine-aligned, in chords
  int iterations = 0;
};

namespace detail {

// Fixed-chord inner problem: minimize twice the polyline length of a
// symmetric profile h_0..h_k (h_0 = h_k = 0) subject to the trapezoid area
// 2 dx sum(h_interior) = mass. The area gradient is constant on interior
// nodes, so removing the interior mean of the perimeter gradient moves
// exactly along the constraint; momentum accelerates the long modes.
inline double lens_inner_min(double chord, double mass, std::vector<double> &h,
                             int &iters) {
  const int k = static_cast<int>(h.size()) - 1;
  const double dx = chord / k;
  // renormalize the start profile to the right area
  double area = 0.0;
  for (int i = 1; i < k; ++i)
    area += h[i];
  area *= 2.0 * dx;
  if (area <= 0.0)
    throw std::logic_error("lens_inner_min: degenerate start profile");
  for (int i = 1; i < k; ++i)
    h[i] *= mass / area;

  std::vector<double> grad(k + 1, 0.0), vel(k + 1, 0.0);
  const double step = 0.05 * dx, beta = 0.97;
  double perim = 0.0;
  for (int it = 0; it < 200000; ++it) {
    perim = 0.0;
    for (int i = 0; i < k; ++i)
      perim += std::hypot(dx, h[i + 1] - h[i]);
    double gmean = 0.0;
    for (int i = 1; i < k; ++i) {
      const double dl = (h[i] - h[i - 1]) / std::hypot(dx, h[i] - h[i - 1]);
      const double dr = (h[i] - h[i + 1]) / std::hypot(dx, h[i + 1] - h[i]);
      grad[i] = 2.0 * (dl + dr);
      gmean += grad[i];
    }
    gmean /= (k - 1);
    double gmax = 0.0;
    for (int i = 1; i < k; ++i) {
      const double gi = grad[i] - gmean;
      gmax = std::max(gmax, std::abs(gi));
      vel[i] = beta * vel[i] - step * gi;
      h[i] += vel[i];
      if (h[i] < 0.0) {
        h[i] = 0.0;
        vel[i] = 0.0;
      }
    }
    // drift repair for the clamped nodes
    area = 0.0;
    for (int i = 1; i < k; ++i)
      area += h[i];
    area *= 2.0 * dx;
    const double adj = (mass - area) / (2.0 * dx * (k - 1));
    for (int i = 1; i < k; ++i)
      h[i] += adj;
    iters = it + 1;
    if (gmax < 1e-9 && it > 100)
      break;
  }
  return 2.0 * perim;
}

} // namespace detail

/** Independent check of the optimal droplet shape: direct minimization of
 *  (boundary length) - (interface reclaimed) over discrete symmetric
 *  profiles with the mass fixed, the chord free. No arc parametrization
 *  enters: golden-section over the chord, projected gradient descent inside.
 */
inline ShapeOracleResult shape_oracle(double mass, int segments = 256) {
  if (mass <= 0.0)
    throw std::domain_error("shape_oracle: mass must be positive");
  if (segments < 16)
    throw std::invalid_argument("shape_oracle: need at least 16 segments");
  const int k = segments;
  std::vector<double> h(k + 1, 0.0);
  auto reset_profile = [&] { // parabolic hump, no arc information
    for (int i = 0; i <= k; ++i) {
      const double t = static_cast<double>(i) / k;
      h[i] = t * (1.0 - t);
    }
  };

  ShapeOracleResult res;
  auto objective = [&](double chord) {
    int iters = 0;
    const double p = detail::lens_inner_min(chord, mass, h, iters);
    res.iterations += iters;
    return p - chord;
  };

  // golden-section over the chord; generous bracket around sqrt(mass) scale
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.5 * std::sqrt(mass), b = 3.5 * std::sqrt(mass);
  reset_profile();
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > 1e-6 * std::sqrt(mass)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(d);
    }
  }
  const double chord = 0.5 * (a + b);
  res.objective = objective(chord);
  res.chord = chord;
  res.endpoint_slope = h[1] / (chord / k);

  // affine-aligned deviation from the arc profile, in units of the chord
  const double ref = lens_chord(mass);
  double dev = 0.0;
  for (int i = 0; i <= k; ++i) {
    const double t = static_cast<double>(i) / k;
    dev = std::max(dev,
                   std::abs(h[i] / chord - lens_profile(t * ref, ref) / ref));
  }
  res.profile_dev = dev;
  return res;
}

// two-column csv x, f(x) of the upper profile
inline void lens_profile_csv(const std::string &path, double mass,
                             int samples = 256) {
  const double chord = lens_chord(mass);
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("lens_profile_csv: cannot open " + path);
  f << "x,f\n";
  f.precision(12);
  for (int i = 0; i <= samples; ++i) {
    const double x = chord * i / samples;
    f << x << "," << lens_profile(x, chord) << "\n";
  }
}

} // namespace ternary
