#pragma once

#include <span>
#include <vector>

namespace sentlen {

// y ~ alpha * x + beta between two aligned length series.
struct LinearMap {
  double alpha = 1.0;
  double beta = 0.0;

  double operator()(double x) const noexcept { return alpha * x + beta; }

  std::vector<double> apply(std::span<const double> xs) const {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(alpha * x + beta);
    return out;
  }
};

}  // namespace sentlen
