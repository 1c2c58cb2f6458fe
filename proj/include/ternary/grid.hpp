#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ternary {

/** Periodic cell-sampled density on the unit torus [-1/2,1/2)^2.
 *
 *  values is row-major: index(ix,iy) = iy*n + ix, cell centers at
 *  ((ix+0.5)/n - 0.5, (iy+0.5)/n - 0.5). Cell area is 1/n^2. n must be a
 *  power of two in [64, 1024]; spectral code relies on even n and the size
 *  cap keeps dense Green evaluations affordable.
 */
struct DensityGrid {
  int n = 0;
  std::vector<double> values;

  DensityGrid() = default;
  explicit DensityGrid(int n_, double fill = 0.0) : n(n_) {
    check_size(n_);
    values.assign(static_cast<std::size_t>(n) * n, fill);
  }

  static void check_size(int n) {
    if (n < 64 || n > 1024 || (n & (n - 1)) != 0)
      throw std::invalid_argument(
          "DensityGrid: n must be a power of two in [64, 1024]");
  }

  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * n + ix;
  }
  double &at(int ix, int iy) { return values[index(ix, iy)]; }
  double at(int ix, int iy) const { return values[index(ix, iy)]; }

  double x_of(int ix) const { return (ix + 0.5) / n - 0.5; }
  double y_of(int iy) const { return (iy + 0.5) / n - 0.5; }
  double cell_area() const { return 1.0 / (static_cast<double>(n) * n); }

  double mean() const {
    double s = 0.0;
    for (double v : values)
      s += v;
    return s / (static_cast<double>(n) * n);
  }

  // Integral over the torus: cell-center quadrature.
  double integral() const { return mean(); }

  DensityGrid mean_zero() const {
    DensityGrid g = *this;
    const double m = mean();
    for (double &v : g.values)
      v -= m;
    return g;
  }

  void save_csv(const std::string &path) const {
    std::ofstream f(path);
    if (!f)
      throw std::runtime_error("DensityGrid: cannot open " + path);
    f << "# densitygrid n=" << n << "\n";
    f.precision(17);
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix)
        f << at(ix, iy) << (ix + 1 == n ? '\n' : ',');
    }
  }

  static DensityGrid load_csv(const std::string &path) {
    std::ifstream f(path);
    if (!f)
      throw std::runtime_error("DensityGrid: cannot open " + path);
    std::string header;
    std::getline(f, header);
    const std::string tag = "# densitygrid n=";
    if (header.rfind(tag, 0) != 0)
      throw std::runtime_error("DensityGrid: bad csv header in " + path);
    DensityGrid g(std::stoi(header.substr(tag.size())));
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        double v;
        if (!(f >> v))
          throw std::runtime_error("DensityGrid: truncated csv " + path);
        g.at(ix, iy) = v;
        if (f.peek() == ',') // newlines are consumed by the next extraction
          f.get();
      }
    return g;
  }

  void save_binary(const std::string &path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f)
      throw std::runtime_error("DensityGrid: cannot open " + path);
    const char magic[8] = {'d', 'g', 'r', 'i', 'd', '0', '0', '1'};
    f.write(magic, 8);
    std::int64_t nn = n;
    f.write(reinterpret_cast<const char *>(&nn), 8);
    f.write(reinterpret_cast<const char *>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  }

  static DensityGrid load_binary(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
      throw std::runtime_error("DensityGrid: cannot open " + path);
    char magic[8];
    f.read(magic, 8);
    if (std::string(magic, 8) != "dgrid001")
      throw std::runtime_error("DensityGrid: bad binary header in " + path);
    std::int64_t nn = 0;
    f.read(reinterpret_cast<char *>(&nn), 8);
    DensityGrid g(static_cast<int>(nn));
    f.read(reinterpret_cast<char *>(g.values.data()),
           static_cast<std::streamsize>(g.values.size() * sizeof(double)));
    if (!f)
      throw std::runtime_error("DensityGrid: truncated binary " + path);
    return g;
  }
};

// Reduce a coordinate difference to the minimal image in [-1/2, 1/2].
inline double min_image(double d) {
  d -= std::round(d);
  return d;
}

/** Rasterize an indicator region given by `inside(x, y) -> bool`.
 *
 *  supersample <= 1: cell-center sampling, values are exactly {0,1}.
 *  supersample s > 1: cells whose center and corners disagree get an s*s
 *  subsample average, so boundary cells carry fractional coverage and the
 *  raster mass error drops by roughly 1/s.
 */
template <class F>
DensityGrid rasterize(int n, F &&inside, int supersample = 4) {
  DensityGrid g(n);
  const double h = 1.0 / n;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = g.x_of(ix), y = g.y_of(iy);
      const bool c = inside(x, y);
      if (supersample <= 1) {
        g.at(ix, iy) = c ? 1.0 : 0.0;
        continue;
      }
      const bool corners_same =
          inside(x - 0.5 * h, y - 0.5 * h) == c &&
          inside(x + 0.5 * h, y - 0.5 * h) == c &&
          inside(x - 0.5 * h, y + 0.5 * h) == c &&
          inside(x + 0.5 * h, y + 0.5 * h) == c;
      if (corners_same) {
        g.at(ix, iy) = c ? 1.0 : 0.0;
        continue;
      }
      int hits = 0;
      for (int sy = 0; sy < supersample; ++sy)
        for (int sx = 0; sx < supersample; ++sx) {
          const double px = x + ((sx + 0.5) / supersample - 0.5) * h;
          const double py = y + ((sy + 0.5) / supersample - 0.5) * h;
          if (inside(px, py))
            ++hits;
        }
      g.at(ix, iy) = static_cast<double>(hits) / (supersample * supersample);
    }
  }
  return g;
}

} // namespace ternary
