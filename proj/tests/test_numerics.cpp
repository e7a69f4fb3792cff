#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "semshape/numerics.hpp"

using namespace semshape;

TEST_SUITE_BEGIN("numerics");

TEST_CASE("line fit recovers an exact affine relation") {
  std::vector<double> x, y;
  for (int i = 0; i < 7; ++i) {
    x.push_back(0.5 * i - 1.0);
    y.push_back(3.25 * x.back() - 0.75);
  }
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("line fit reports imperfect correlation on curved data") {
  std::vector<double> x, y;
  for (int i = 0; i <= 10; ++i) {
    x.push_back(i);
    y.push_back(i * i);
  }
  const LineFit f = fit_line(x, y);
  CHECK(f.r2 < 1.0);
  CHECK(f.r2 > 0.9);  // still strongly increasing
}

TEST_CASE("line fit rejects degenerate input") {
  CHECK_THROWS_AS(fit_line(std::vector<double>{1.0}, std::vector<double>{2.0}),
                  std::invalid_argument);
  const std::vector<double> same{2.0, 2.0, 2.0};
  const std::vector<double> ys{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(fit_line(same, ys), std::invalid_argument);
}

TEST_CASE("trapezoid rule is exact on affine integrands") {
  const int n = 100;
  const double h = 1.0 / n;
  std::vector<double> constant(n + 1, 2.5), linear(n + 1);
  for (int i = 0; i <= n; ++i) linear[i] = 3.0 * (i * h) - 1.0;
  CHECK(trapezoid(constant, h) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(trapezoid(linear, h) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("trapezoid rule converges at second order") {
  const auto integrate_sin = [](int n) {
    const double h = 3.14159265358979323846 / n;
    std::vector<double> y(n + 1);
    for (int i = 0; i <= n; ++i) y[i] = std::sin(i * h);
    return trapezoid(y, h);
  };
  const double e1 = std::fabs(integrate_sin(64) - 2.0);
  const double e2 = std::fabs(integrate_sin(128) - 2.0);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("string hash matches the published reference values") {
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("grid.n = 64") == fnv1a64("grid.n = 64"));
  CHECK(fnv1a64("grid.n = 64") != fnv1a64("grid.n = 65"));
}

TEST_SUITE_END();
