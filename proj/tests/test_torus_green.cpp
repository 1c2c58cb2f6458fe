#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "ternary/grid.hpp"
#include "ternary/torus_green.hpp"

using namespace ternary;

// frozen reference values, confirmed against the elliptic closed form
namespace {
constexpr double kRobinFrozen = -0.2085777932435;
}

TEST_CASE("exponential integral building block") {
  // E1(1) from standard tables
  CHECK(expint_e1(1.0) == Catch::Approx(0.21938393439552026).margin(1e-14));
  // E1(z) + ln z is finite at zero with value -EulerGamma
  CHECK(e1_plus_log(0.0) == Catch::Approx(-kEulerGamma).margin(1e-15));
  // the series branch matches the direct expression where both are stable
  for (double z : {0.1, 0.3, 0.6, 0.74, 0.76, 1.5, 5.0})
    CHECK(e1_plus_log(z) ==
          Catch::Approx(expint_e1(z) + std::log(z)).margin(1e-13));
}

TEST_CASE("green matches the elliptic closed form") {
  TorusGreen g;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = oracle::golden_seq(i, 0.017);
    const double y = oracle::golden_seq(i, 0.377);
    if (x * x + y * y < 1e-6)
      continue;
    worst = std::max(worst, std::abs(g.green_diff(x, y) - oracle::green(x, y)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("robin constant") {
  TorusGreen g;
  CHECK(g.robin() == Catch::Approx(oracle::robin()).margin(1e-13));
  CHECK(g.robin() == Catch::Approx(kRobinFrozen).margin(1e-10));
}

TEST_CASE("green symmetry") {
  TorusGreen g;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x0 = oracle::golden_seq(i, 0.11), y0 = oracle::golden_seq(i, 0.29);
    const double x1 = oracle::golden_seq(i, 0.53), y1 = oracle::golden_seq(i, 0.71);
    if (std::abs(min_image(x1 - x0)) + std::abs(min_image(y1 - y0)) < 1e-4)
      continue;
    worst = std::max(worst, std::abs(g.green(x0, y0, x1, y1) -
                                     g.green(x1, y1, x0, y0)));
    worst = std::max(worst,
                     std::abs(g.green_diff(x0, y0) - g.green_diff(-x0, -y0)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("result independent of the summation split") {
  TorusGreen a; // defaults
  TorusGreen b({0.08, 24});
  TorusGreen c({0.012, 16});
  for (auto [x, y] : {std::pair{0.13, 0.27}, {0.49, 0.02}, {0.003, 0.001}}) {
    CHECK(a.green_diff(x, y) == Catch::Approx(b.green_diff(x, y)).margin(1e-12));
    CHECK(a.green_diff(x, y) == Catch::Approx(c.green_diff(x, y)).margin(1e-12));
  }
  CHECK(a.truncation_bound() < 1e-12);
}

TEST_CASE("coincident evaluation is rejected") {
  TorusGreen g;
  CHECK_THROWS_AS(g.green_diff(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(g.green(0.2, 0.3, 0.2, 0.3), std::domain_error);
  CHECK_NOTHROW(g.regular_diff(0.0, 0.0)); // the regular part is finite there
}

TEST_CASE("mean zero by quadrature") {
  TorusGreen g;
  CHECK(std::abs(g.mean_quadrature(0.0, 0.0, 256)) < 1e-8);
  // translation invariance: the anchor point is immaterial
  CHECK(std::abs(g.mean_quadrature(0.31, -0.12, 256)) < 1e-8);
}

TEST_CASE("sup of the regular part sits at coincidence") {
  TorusGreen g;
  const double sup = g.sup_regular_part();
  CHECK(sup == Catch::Approx(std::abs(kRobinFrozen)).margin(1e-9));
  // spot check: |R| is maximal at the origin among sample points
  for (int i = 0; i < 40; ++i) {
    const double x = oracle::golden_seq(i, 0.23);
    const double y = oracle::golden_seq(i, 0.67);
    CHECK(std::abs(g.regular_diff(x, y)) <= sup + 1e-12);
  }
}

TEST_CASE("band self interaction has the Bernoulli closed form") {
  TorusGreen g;
  for (double w : {0.25, 0.5}) {
    const DensityGrid band = rasterize(
        256, [&](double, double y) { return y >= -w / 2 && y < w / 2; });
    REQUIRE(band.integral() == Catch::Approx(w).margin(1e-12));
    // crisp edges alias in the spectral solve at relative order 1/n^2
    CHECK(interaction_integral(g, band, band) ==
          Catch::Approx(oracle::band_self_interaction(w)).margin(1e-6));
  }
}

TEST_CASE("band cross interaction is the negated self term") {
  TorusGreen g;
  const double w = 0.5;
  const DensityGrid band = rasterize(
      128, [&](double, double y) { return y >= -w / 2 && y < w / 2; });
  DensityGrid comp = band;
  for (double &v : comp.values)
    v = 1.0 - v;
  CHECK(interaction_integral(g, band, comp) ==
        Catch::Approx(-oracle::band_self_interaction(w)).margin(5e-6));
}

TEST_CASE("interaction sandwich on random disc pairs") {
  TorusGreen g;
  const double sup = g.sup_regular_part();
  for (int trial = 0; trial < 10; ++trial) {
    const double r1 = 0.04 + 0.05 * (trial % 4) / 3.0;
    const double r2 = 0.03 + 0.05 * ((trial + 1) % 4) / 3.0;
    const double cx = oracle::golden_seq(trial, 0.05) * 0.4;
    const double cy = oracle::golden_seq(trial, 0.43) * 0.4;
    // second disc diametrically opposite keeps them disjoint
    const double dx = min_image(cx + 0.5), dy = min_image(cy + 0.5);
    const DensityGrid a = rasterize(128, [&](double x, double y) {
      const double ux = min_image(x - cx), uy = min_image(y - cy);
      return ux * ux + uy * uy <= r1 * r1;
    });
    const DensityGrid b = rasterize(128, [&](double x, double y) {
      const double ux = min_image(x - dx), uy = min_image(y - dy);
      return ux * ux + uy * uy <= r2 * r2;
    });
    const double i_ab = interaction_integral(g, a, b);
    const double a1 = kPi * r1 * r1, a2 = kPi * r2 * r2;
    const double lower = -a1 * a2 * sup;
    const double upper =
        a1 * a2 *
        ((1.0 - std::log(std::max(a1, a2)) + std::log(kPi)) / (4.0 * kPi) + sup);
    CHECK(i_ab >= lower - 1e-6);
    CHECK(i_ab <= upper + 1e-6);
  }
}

TEST_CASE("interaction integral stable under grid refinement") {
  TorusGreen g;
  auto value = [&](int n) {
    const DensityGrid a = rasterize(n, [](double x, double y) {
      return (x - 0.1) * (x - 0.1) + y * y <= 0.15 * 0.15;
    });
    const DensityGrid b = rasterize(n, [](double x, double y) {
      return (x + 0.3) * (x + 0.3) + (y - 0.2) * (y - 0.2) <= 0.12 * 0.12;
    });
    return interaction_integral(g, a, b);
  };
  const double coarse = value(128), fine = value(256);
  CHECK(std::abs(coarse - fine) < 2e-3 * std::abs(fine) + 1e-9);
}

TEST_CASE("convolution solves the poisson problem") {
  TorusGreen g;
  const int n = 128;
  // rho = plane wave: convolution divides by 4 pi^2 |k|^2 exactly
  DensityGrid rho(n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      rho.at(ix, iy) = std::cos(2.0 * kPi * (2.0 * rho.x_of(ix) + rho.y_of(iy)));
  const DensityGrid phi = convolve_green(g, rho);
  const double lam = 4.0 * kPi * kPi * 5.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < phi.values.size(); ++i)
    worst = std::max(worst, std::abs(phi.values[i] - rho.values[i] / lam));
  CHECK(worst < 1e-12);
}
