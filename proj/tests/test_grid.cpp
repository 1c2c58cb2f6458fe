#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <numbers>

#include "ternary/fft.hpp"
#include "ternary/grid.hpp"

using namespace ternary;

namespace {
std::string temp_file(const char *name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
} // namespace

TEST_CASE("grid size validation") {
  CHECK_THROWS_AS(DensityGrid(96), std::invalid_argument);  // not a power of two
  CHECK_THROWS_AS(DensityGrid(32), std::invalid_argument);  // below range
  CHECK_THROWS_AS(DensityGrid(2048), std::invalid_argument);
  CHECK_NOTHROW(DensityGrid(64));
  CHECK_NOTHROW(DensityGrid(1024));
}

TEST_CASE("cell geometry") {
  DensityGrid g(64);
  CHECK(g.x_of(0) == Catch::Approx(-0.5 + 0.5 / 64).margin(1e-15));
  CHECK(g.x_of(63) == Catch::Approx(0.5 - 0.5 / 64).margin(1e-15));
  CHECK(g.cell_area() == Catch::Approx(1.0 / 4096).margin(1e-18));
  g.at(3, 5) = 7.0;
  CHECK(g.values[5 * 64 + 3] == 7.0);
}

TEST_CASE("mean and mean_zero") {
  DensityGrid g(64);
  for (int iy = 0; iy < 64; ++iy)
    for (int ix = 0; ix < 64; ++ix)
      g.at(ix, iy) = ix < 32 ? 2.0 : 0.0;
  CHECK(g.mean() == Catch::Approx(1.0).margin(1e-14));
  CHECK(g.integral() == Catch::Approx(1.0).margin(1e-14));
  const DensityGrid z = g.mean_zero();
  CHECK(std::abs(z.mean()) < 1e-14);
}

TEST_CASE("min_image wraps to the nearest representative") {
  CHECK(min_image(0.7) == Catch::Approx(-0.3).margin(1e-15));
  CHECK(min_image(-0.7) == Catch::Approx(0.3).margin(1e-15));
  CHECK(min_image(0.2) == Catch::Approx(0.2).margin(1e-15));
  CHECK(std::abs(min_image(1.0)) < 1e-15);
}

TEST_CASE("csv round trip") {
  DensityGrid g(64);
  for (std::size_t i = 0; i < g.values.size(); ++i)
    g.values[i] = std::sin(0.01 * i);
  const std::string path = temp_file("densitygrid_roundtrip.csv");
  g.save_csv(path);
  const DensityGrid back = DensityGrid::load_csv(path);
  REQUIRE(back.n == 64);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i)
    worst = std::max(worst, std::abs(back.values[i] - g.values[i]));
  CHECK(worst < 1e-10); // text round trip keeps 12 digits
  std::filesystem::remove(path);
}

TEST_CASE("binary round trip is exact") {
  DensityGrid g(64);
  for (std::size_t i = 0; i < g.values.size(); ++i)
    g.values[i] = std::cos(0.013 * i) * 1e3;
  const std::string path = temp_file("densitygrid_roundtrip.bin");
  g.save_binary(path);
  const DensityGrid back = DensityGrid::load_binary(path);
  REQUIRE(back.n == 64);
  CHECK(back.values == g.values);
  std::filesystem::remove(path);
}

TEST_CASE("rasterize recovers areas to boundary resolution") {
  const double r = 0.2;
  const DensityGrid disc =
      rasterize(256, [&](double x, double y) { return x * x + y * y <= r * r; });
  const double area = std::numbers::pi_v<double> * r * r;
  // midpoint + supersampled boundary cells: error well below h * perimeter
  CHECK(std::abs(disc.integral() - area) < 2.0 * std::numbers::pi_v<double> * r / 256.0);
  for (double v : disc.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("fft round trip and frequency layout") {
  const int n = 64;
  std::vector<double> in(static_cast<std::size_t>(n) * n);
  for (std::size_t i = 0; i < in.size(); ++i)
    in[i] = std::sin(0.05 * i) + 0.3 * std::cos(0.11 * i);
  std::vector<std::complex<double>> spec;
  std::vector<double> out;
  auto &eng = fft::Engine::instance();
  eng.forward(n, in, spec);
  eng.backward(n, spec, out);
  double worst = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i)
    worst = std::max(worst, std::abs(in[i] - out[i]));
  CHECK(worst < 1e-12);

  CHECK(fft::freq(0, n) == 0);
  CHECK(fft::freq(1, n) == 1);
  CHECK(fft::freq(n - 1, n) == -1);
  CHECK(fft::freq(n / 2, n) == n / 2);
}

TEST_CASE("forward transform matches a plane wave") {
  const int n = 64;
  std::vector<double> in(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      in[static_cast<std::size_t>(iy) * n + ix] =
          std::cos(2.0 * std::numbers::pi_v<double> * (3.0 * ix + 5.0 * iy) / n);
  std::vector<std::complex<double>> spec;
  fft::Engine::instance().forward(n, in, spec);
  // energy concentrates on (3,5) and (-3,-5), each with weight n^2/2
  const double expect = 0.5 * n * n;
  CHECK(std::abs(spec[static_cast<std::size_t>(5) * n + 3] - expect) < 1e-8);
  CHECK(std::abs(spec[static_cast<std::size_t>(n - 5) * n + (n - 3)] - expect) <
        1e-8);
}
