#pragma once

// Distribution comparison of length series: empirical CDFs with the
// two-sample Kolmogorov-Smirnov test, plus the stretched-exponential CCDF fit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

#include "sentlen/correlation.hpp"
#include "sentlen/error.hpp"
#include "sentlen/linear_map.hpp"

namespace sentlen {

inline constexpr std::size_t kMinKsSample = 5;

class Ecdf {
 public:
  explicit Ecdf(std::span<const double> samples) : sorted_(samples.begin(), samples.end()) {
    if (sorted_.empty()) throw InvalidArgument("ecdf: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
  }

  // Fraction of samples <= x.
  double operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

  const std::vector<double>& sorted_samples() const noexcept { return sorted_; }
  std::size_t n() const noexcept { return sorted_.size(); }

  // One (x, C(x)) point per distinct sample value.
  std::vector<std::pair<double, double>> steps() const {
    std::vector<std::pair<double, double>> out;
    const double n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
      if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
      out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
    }
    return out;
  }

 private:
  std::vector<double> sorted_;
};

struct KsResult {
  double kappa = 0.0;
  double p_value = 1.0;
  bool accepted = true;  // p_value >= threshold
};

struct StretchedExpFit {
  double mu = 0.0;
  double b = 0.0;
  double fit_rmse = 0.0;
  std::size_t points = 0;
};

inline std::vector<double> mean_normalize(std::span<const double> series) {
  if (series.empty()) throw InvalidArgument("mean_normalize: empty series");
  const double m = detail::mean(series);
  if (!(m > 0.0)) throw DegenerateInput("mean_normalize: mean must be positive");
  std::vector<double> out;
  out.reserve(series.size());
  for (double v : series) out.push_back(v / m);
  return out;
}

// sup_x |C_a(x) - C_b(x)|, evaluated after each distinct merged sample value.
inline double ks_distance(const Ecdf& a, const Ecdf& b) {
  const auto& xa = a.sorted_samples();
  const auto& xb = b.sorted_samples();
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double v = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == v) ++i;
    while (j < xb.size() && xb[j] == v) ++j;
    best = std::max(best, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // once one side is exhausted its CDF is 1 and the other only climbs toward 1
  return best;
}

// Asymptotic two-sample Kolmogorov p-value with the usual small-sample
// correction on lambda.
inline double ks_p_value(double kappa, std::size_t n_a, std::size_t n_b) {
  const double ne = static_cast<double>(n_a) * static_cast<double>(n_b) / static_cast<double>(n_a + n_b);
  const double sq = std::sqrt(ne);
  const double lambda = (sq + 0.12 + 0.11 / sq) * kappa;
  if (lambda < 1e-3) return 1.0;
  const double a2 = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 1'000'000; ++k) {
    const double term = std::exp(a2 * static_cast<double>(k) * static_cast<double>(k));
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                              double threshold = kDefaultSignificance) {
  if (a.size() < kMinKsSample || b.size() < kMinKsSample) {
    throw InvalidArgument("ks_two_sample: each sample needs at least 5 values");
  }
  const double kappa = ks_distance(Ecdf(a), Ecdf(b));
  const double p = ks_p_value(kappa, a.size(), b.size());
  return {kappa, p, p >= threshold};
}

// Plain variant: both series divided by their means first.
inline KsResult ks_mean_normalized(std::span<const double> x, std::span<const double> y,
                                   double threshold = kDefaultSignificance) {
  return ks_two_sample(mean_normalize(x), mean_normalize(y), threshold);
}

// Maps x onto y's scale with the least-squares line, then compares. Mapped
// values stay real.
inline KsResult ks_after_linear_map(std::span<const double> x, std::span<const double> y,
                                    double threshold = kDefaultSignificance) {
  const auto map = fit_linear_map(x, y);
  const auto mapped = map.apply(x);
  return ks_two_sample(mapped, y, threshold);
}

// Least squares of ln(-ln CCDF) = ln mu + b ln x over points with 0 < CCDF < 1.
inline StretchedExpFit fit_stretched_exp_points(std::span<const double> xs, std::span<const double> ccdf) {
  if (xs.size() != ccdf.size()) throw InvalidArgument("ccdf fit: length mismatch");
  std::vector<double> u, v;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0 && ccdf[i] > 0 && ccdf[i] < 1) {
      u.push_back(std::log(xs[i]));
      v.push_back(std::log(-std::log(ccdf[i])));
    }
  }
  if (u.size() < 5) throw DegenerateInput("ccdf fit: fewer than 5 usable points");
  const auto line = fit_linear_map(u, v);
  double sse = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = v[i] - line(u[i]);
    sse += r * r;
  }
  return {std::exp(line.beta), line.alpha, std::sqrt(sse / static_cast<double>(u.size())), u.size()};
}

// CCDF(x) = P(X > x) at each distinct value; the top value (CCDF = 0) drops out.
inline StretchedExpFit fit_ccdf_stretched_exp(std::span<const double> series) {
  if (series.size() < 50) throw InvalidArgument("ccdf fit: need at least 50 values");
  for (double v : series) {
    if (v < 1) throw InvalidArgument("ccdf fit: values must be >= 1");
  }
  const Ecdf e(series);
  const auto steps = e.steps();
  if (steps.size() < 5) throw DegenerateInput("ccdf fit: fewer than 5 distinct values");
  std::vector<double> xs, cc;
  for (const auto& [x, c] : steps) {
    xs.push_back(x);
    cc.push_back(1.0 - c);
  }
  return fit_stretched_exp_points(xs, cc);
}

// CSV `x,cumulative`; complementary = true writes the CCDF instead.
inline void write_ecdf_csv(const Ecdf& e, const std::filesystem::path& path, bool complementary = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot write " + path.string());
  out << "x,cumulative\n";
  char buf[64];
  for (const auto& [x, c] : e.steps()) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g\n", x, complementary ? 1.0 - c : c);
    out << buf;
  }
  if (!out) throw OutputError("write failed: " + path.string());
}

}  // namespace sentlen
