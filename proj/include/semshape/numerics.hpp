#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace semshape {

// Ordinary least-squares line y = slope*x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Composite trapezoid rule on a uniformly spaced sample.
double trapezoid(std::span<const double> y, double h);

// FNV-1a, used to derive stable artifact names from config text.
std::uint64_t fnv1a64(std::string_view bytes);

}
