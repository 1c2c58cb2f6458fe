#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ternary/fft.hpp"
#include "ternary/grid.hpp"
#include "ternary/torus_green.hpp"

namespace ternary {

/** Diffuse-interface ternary system on the grid: order parameters
 *  (u1, u2, u0) with u0 = 1 - u1 - u2, energy
 *
 *    E = sum_i (eps/W_i) int |grad u_i|^2 + (1/eps) int W(u)
 *      + sum_{i,j} gamma_ij int int G (u_i - M_i)(u_j - M_j),
 *
 *  W(u) = sum_{i<j} u_i^2 u_j^2 (wells at the simplex corners), the
 *  interaction an ordered double sum over {0,1,2}. M_i is the conserved mean
 *  of u_i; the gradient weights W_i are independent so the three interface
 *  tensions can be held equal while the minority mean is small. The flow is
 *  the conserved H^-1 gradient flow in the reduced variables (u1, u2):
 *  du_a/dt = Laplace(mu_a).
 */
enum class InitU0 {
  kInterfaceBands, // minority mass as strips on the lamellar interfaces
  kUniform,        // minority mass spread over the whole torus
};

struct FlowParams {
  int n = 128;
  double epsilon = 0.03;
  double M1 = 0.45, M2 = 0.45; // M0 = 1 - M1 - M2
  // gradient weights: the |grad u_i|^2 term carries eps / W_i. Equal weights
  // give all three interfaces the same tension 2 sqrt(2) / 6.
  double W1 = 1.0, W2 = 1.0, W0 = 1.0;
  InitU0 init_u0 = InitU0::kInterfaceBands;
  // symmetric coupling matrix; index 0 is the minority phase
  double g11 = 0.0, g12 = 0.0, g22 = 0.0;
  double g10 = 0.0, g20 = 0.0, g00 = 0.0;
  double dt = 0.0;     // 0: use the heuristic dt = dt_factor * eps * h^2
  double dt_factor = 4.0;
  int steps = 5000;
  int record_every = 100;
  double noise = 1e-2;
  std::uint64_t seed = 20260822;

  double M0() const { return 1.0 - M1 - M2; }
  double time_step() const {
    if (dt > 0.0)
      return dt;
    const double h = 1.0 / n;
    return dt_factor * epsilon * h * h;
  }
  void validate() const {
    DensityGrid::check_size(n);
    if (epsilon <= 0.0 || epsilon > 0.25)
      throw std::invalid_argument("FlowParams: epsilon outside (0, 0.25]");
    if (M1 <= 0.0 || M2 <= 0.0 || M0() <= 0.0)
      throw std::invalid_argument("FlowParams: phase means must be positive");
    if (W1 <= 0.0 || W2 <= 0.0 || W0 <= 0.0)
      throw std::invalid_argument("FlowParams: gradient weights must be positive");
    if (steps < 1 || record_every < 1)
      throw std::invalid_argument("FlowParams: steps and record_every must be >= 1");
  }
};

struct PhaseState {
  DensityGrid u1, u2;

  DensityGrid u0() const {
    DensityGrid z = u1;
    for (std::size_t i = 0; i < z.values.size(); ++i)
      z.values[i] = 1.0 - u1.values[i] - u2.values[i];
    return z;
  }
};

// triple well and its partial derivatives
inline double triple_well(double a, double b, double c) {
  return a * a * b * b + a * a * c * c + b * b * c * c;
}
inline double triple_well_d(double a, double b, double c) {
  return 2.0 * a * (b * b + c * c); // d/da
}

struct TraceRow {
  int step = 0;
  double time = 0.0;
  double energy = 0.0;
  double m1 = 0.0, m2 = 0.0, m0 = 0.0;
};

struct SimResult {
  PhaseState state;
  std::vector<TraceRow> trace;
  double localization = 0.0; // minority mass near the majority interface
  double final_energy = 0.0;
};

class PhaseFlow {
public:
  explicit PhaseFlow(FlowParams p) : p_(p) {
    p_.validate();
    build_solver();
  }

  const FlowParams &params() const { return p_; }

  /** Lamellar start: band one in |y| < 1/4, band two outside. The minority
   *  mass goes either into strips of width M0/2 centered on the two band
   *  interfaces, or uniformly over the torus. Seeded uniform noise is added
   *  and the phase means are projected back exactly.
   */
  PhaseState init_lamellar() const {
    const int n = p_.n;
    PhaseState s{DensityGrid(n), DensityGrid(n)};
    const double m0 = p_.M0();
    const double half = m0 / 4.0; // strip half-width
    for (int iy = 0; iy < n; ++iy) {
      const double y = s.u1.y_of(iy);
      const bool inner = std::abs(y) < 0.25;
      double v1, v2;
      if (p_.init_u0 == InitU0::kInterfaceBands) {
        const bool strip = std::abs(std::abs(y) - 0.25) < half;
        v1 = (inner && !strip) ? 1.0 : 0.0;
        v2 = (!inner && !strip) ? 1.0 : 0.0;
      } else {
        v1 = inner ? 1.0 - m0 : 0.0;
        v2 = inner ? 0.0 : 1.0 - m0;
      }
      for (int ix = 0; ix < n; ++ix) {
        s.u1.at(ix, iy) = v1;
        s.u2.at(ix, iy) = v2;
      }
    }
    std::mt19937_64 rng(p_.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double &v : s.u1.values)
      v += p_.noise * u(rng);
    for (double &v : s.u2.values)
      v += p_.noise * u(rng);
    project_means(s);
    return s;
  }

  // one semi-implicit step: stiff linear parts implicit, well term explicit
  void step(PhaseState &s) const {
    const int n = p_.n;
    const double dt = p_.time_step();
    const double eps = p_.epsilon;
    auto &eng = fft::Engine::instance();
    std::vector<std::complex<double>> s1, s2, n1, n2;
    eng.forward(n, s.u1.values, s1);
    eng.forward(n, s.u2.values, s2);

    // explicit chemical potential: reduced well gradient
    std::vector<double> r1(s.u1.values.size()), r2(r1.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
      const double a = s.u1.values[i], b = s.u2.values[i];
      const double c = 1.0 - a - b;
      const double d0 = triple_well_d(c, a, b);
      r1[i] = (triple_well_d(a, b, c) - d0) / eps;
      r2[i] = (triple_well_d(b, a, c) - d0) / eps;
    }
    eng.forward(n, r1, n1);
    eng.forward(n, r2, n2);

    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        const std::size_t id = static_cast<std::size_t>(iy) * n + ix;
        if (fft::freq(ix, n) == 0 && fft::freq(iy, n) == 0)
          continue; // conserved means: zero mode untouched
        const double lam = lambda_[id];
        // A = I + dt (2 eps lam^2 S + 2 B)
        const double a11 = 1.0 + dt * (2.0 * eps * lam * lam * s11_ + 2.0 * b11_);
        const double a12 = dt * (2.0 * eps * lam * lam * s12_ + 2.0 * b12_);
        const double a21 = dt * (2.0 * eps * lam * lam * s12_ + 2.0 * b21_);
        const double a22 = 1.0 + dt * (2.0 * eps * lam * lam * s22_ + 2.0 * b22_);
        const double det = a11 * a22 - a12 * a21;
        const std::complex<double> rhs1 = s1[id] - dt * lam * n1[id];
        const std::complex<double> rhs2 = s2[id] - dt * lam * n2[id];
        s1[id] = (a22 * rhs1 - a12 * rhs2) / det;
        s2[id] = (a11 * rhs2 - a21 * rhs1) / det;
      }
    }
    eng.backward(n, s1, s.u1.values);
    eng.backward(n, s2, s.u2.values);
  }

  double energy(const PhaseState &s) const {
    const int n = p_.n;
    const double eps = p_.epsilon;
    auto &eng = fft::Engine::instance();
    std::vector<std::complex<double>> s1, s2;
    eng.forward(n, s.u1.values, s1);
    eng.forward(n, s.u2.values, s2);
    const double n4 = std::pow(static_cast<double>(n), 4);
    double grad1 = 0.0, grad2 = 0.0, grad0 = 0.0;
    double i11 = 0.0, i12 = 0.0, i22 = 0.0, i10 = 0.0, i20 = 0.0, i00 = 0.0;
    for (std::size_t id = 0; id < s1.size(); ++id) {
      const double lam = lambda_[id];
      if (lam == 0.0)
        continue;
      const std::complex<double> c0 = -s1[id] - s2[id];
      const double q11 = std::norm(s1[id]), q22 = std::norm(s2[id]);
      const double q00 = std::norm(c0);
      const double q12 = (s1[id] * std::conj(s2[id])).real();
      const double q10 = (s1[id] * std::conj(c0)).real();
      const double q20 = (s2[id] * std::conj(c0)).real();
      grad1 += lam * q11;
      grad2 += lam * q22;
      grad0 += lam * q00;
      i11 += q11 / lam;
      i22 += q22 / lam;
      i00 += q00 / lam;
      i12 += q12 / lam;
      i10 += q10 / lam;
      i20 += q20 / lam;
    }
    double e = eps * (grad1 / p_.W1 + grad2 / p_.W2 + grad0 / p_.W0) / n4;
    e += (p_.g11 * i11 + p_.g22 * i22 + p_.g00 * i00 + 2.0 * p_.g12 * i12 +
          2.0 * p_.g10 * i10 + 2.0 * p_.g20 * i20) /
         n4;
    double well = 0.0;
    for (std::size_t i = 0; i < s.u1.values.size(); ++i) {
      const double a = s.u1.values[i], b = s.u2.values[i];
      well += triple_well(a, b, 1.0 - a - b);
    }
    e += well / (eps * static_cast<double>(n) * n);
    return e;
  }

  /** Fraction of minority mass within `reach` (default 4 eps) of the
   *  majority-majority interface, the zero set of u1 - u2 between cells
   *  where both sides are majority (u0 <= 1/2). Distances are torus metric.
   */
  double localization(const PhaseState &s, double reach = 0.0) const {
    const int n = p_.n;
    if (reach <= 0.0)
      reach = 4.0 * p_.epsilon;
    std::vector<std::array<double, 2>> pts;
    const DensityGrid z = s.u0();
    auto majority = [&](int ix, int iy) { return z.at(ix, iy) <= 0.5; };
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double phi = s.u1.at(ix, iy) - s.u2.at(ix, iy);
        const int jx = (ix + 1) % n, jy = (iy + 1) % n;
        const double phix = s.u1.at(jx, iy) - s.u2.at(jx, iy);
        const double phiy = s.u1.at(ix, jy) - s.u2.at(ix, jy);
        if (phi * phix < 0.0 && majority(ix, iy) && majority(jx, iy))
          pts.push_back({z.x_of(ix) + 0.5 / n, z.y_of(iy)});
        if (phi * phiy < 0.0 && majority(ix, iy) && majority(ix, jy))
          pts.push_back({z.x_of(ix), z.y_of(iy) + 0.5 / n});
      }
    if (pts.empty())
      return 0.0;
    double near = 0.0, total = 0.0;
    const double r2 = reach * reach;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double m = z.at(ix, iy);
        if (m <= 0.0)
          continue;
        total += m;
        const double x = z.x_of(ix), y = z.y_of(iy);
        for (const auto &q : pts) {
          const double dx = min_image(x - q[0]), dy = min_image(y - q[1]);
          if (dx * dx + dy * dy <= r2) {
            near += m;
            break;
          }
        }
      }
    return total > 0.0 ? near / total : 0.0;
  }

  SimResult simulate() const {
    SimResult res;
    res.state = init_lamellar();
    const double dt = p_.time_step();
    auto record = [&](int k) {
      TraceRow row;
      row.step = k;
      row.time = k * dt;
      row.energy = energy(res.state);
      row.m1 = res.state.u1.mean();
      row.m2 = res.state.u2.mean();
      row.m0 = 1.0 - row.m1 - row.m2;
      res.trace.push_back(row);
    };
    record(0);
    for (int k = 1; k <= p_.steps; ++k) {
      step(res.state);
      if (k % p_.record_every == 0 || k == p_.steps)
        record(k);
    }
    res.final_energy = res.trace.back().energy;
    res.localization = localization(res.state);
    return res;
  }

private:
  void project_means(PhaseState &s) const {
    const double d1 = p_.M1 - s.u1.mean();
    for (double &v : s.u1.values)
      v += d1;
    const double d2 = p_.M2 - s.u2.mean();
    for (double &v : s.u2.values)
      v += d2;
  }

  void build_solver() {
    const int n = p_.n;
    lambda_.resize(static_cast<std::size_t>(n) * n);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double kx = fft::freq(ix, n), ky = fft::freq(iy, n);
        lambda_[static_cast<std::size_t>(iy) * n + ix] =
            4.0 * kPi * kPi * (kx * kx + ky * ky);
      }
    s11_ = 1.0 / p_.W1 + 1.0 / p_.W0;
    s22_ = 1.0 / p_.W2 + 1.0 / p_.W0;
    s12_ = 1.0 / p_.W0;
    // reduced interaction couplings B_ab = g_ab - g_0b - g_a0 + g_00
    b11_ = p_.g11 - 2.0 * p_.g10 + p_.g00;
    b12_ = p_.g12 - p_.g20 - p_.g10 + p_.g00;
    b21_ = b12_;
    b22_ = p_.g22 - 2.0 * p_.g20 + p_.g00;
  }

  FlowParams p_;
  std::vector<double> lambda_;
  double s11_ = 0.0, s12_ = 0.0, s22_ = 0.0;
  double b11_ = 0.0, b12_ = 0.0, b21_ = 0.0, b22_ = 0.0;
};

// {0,128,255} label image by pointwise majority phase
inline void save_phase_pgm(const std::string &path, const PhaseState &s) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("save_phase_pgm: cannot open " + path);
  const int n = s.u1.n;
  f << "P5\n" << n << " " << n << "\n255\n";
  std::vector<unsigned char> row(n);
  for (int iy = n - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double a = s.u1.at(ix, iy), b = s.u2.at(ix, iy);
      const double c = 1.0 - a - b;
      row[ix] = c >= a && c >= b ? 255 : a >= b ? 0 : 128;
    }
    f.write(reinterpret_cast<const char *>(row.data()), n);
  }
}

inline void save_trace_csv(const std::string &path,
                           const std::vector<TraceRow> &trace) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("save_trace_csv: cannot open " + path);
  f << "step,time,energy,m1,m2,m0\n";
  f.precision(12);
  for (const TraceRow &r : trace)
    f << r.step << "," << r.time << "," << r.energy << "," << r.m1 << ","
      << r.m2 << "," << r.m0 << "\n";
}

} // namespace ternary
