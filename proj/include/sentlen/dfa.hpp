#pragma once

// Detrended fluctuation analysis.
//
// The profile is the cumulative sum of the mean-subtracted series. For each
// window size m it is cut into floor(N/m) windows from the start and the same
// number from the end; F(m) is the RMS of the per-window residuals after a
// degree-l polynomial fit. h is the slope of ln F against ln m.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "sentlen/correlation.hpp"
#include "sentlen/error.hpp"

namespace sentlen {

struct DfaConfig {
  int detrend_degree = 1;
  std::vector<std::size_t> window_sizes;
  std::size_t fit_min = 0;  // inclusive window-size range for the log-log fit
  std::size_t fit_max = std::numeric_limits<std::size_t>::max();
  std::uint64_t shuffle_seed = 0;

  // Log-spaced integer windows from min_window to floor(n * max_frac), at most
  // `points` distinct sizes. Fits over the whole grid.
  static DfaConfig log_spaced(std::size_t n, int degree = 1, std::size_t min_window = 8,
                              double max_frac = 0.25, std::size_t points = 16, std::uint64_t seed = 0) {
    if (degree < 1) throw InvalidArgument("dfa: detrend degree must be >= 1");
    if (points < 2) throw InvalidArgument("dfa: need at least 2 window sizes");
    if (!(max_frac > 0.0 && max_frac <= 0.25)) throw InvalidArgument("dfa: max window fraction must be in (0, 0.25]");
    DfaConfig c;
    c.detrend_degree = degree;
    c.shuffle_seed = seed;
    const std::size_t lo = std::max<std::size_t>(min_window, static_cast<std::size_t>(degree) + 2);
    const auto hi = static_cast<std::size_t>(std::floor(static_cast<double>(n) * max_frac));
    if (hi < lo) throw InvalidArgument("dfa: series too short for the requested window range");
    const double step = std::log(static_cast<double>(hi) / static_cast<double>(lo)) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
      auto m = static_cast<std::size_t>(std::lround(static_cast<double>(lo) * std::exp(step * static_cast<double>(i))));
      m = std::clamp(m, lo, hi);
      if (c.window_sizes.empty() || c.window_sizes.back() != m) c.window_sizes.push_back(m);
    }
    return c;
  }
};

struct FluctuationPoint {
  std::size_t m = 0;
  double f = 0.0;
};

struct FluctuationCurve {
  std::vector<FluctuationPoint> points;
};

struct HurstEstimate {
  double h = 0.0;
  double intercept = 0.0;  // ln F at m = 1 on the fitted line
  double fit_r2 = 0.0;
  double h_shuffled = std::numeric_limits<double>::quiet_NaN();
  std::size_t fit_points = 0;
};

inline std::vector<double> integrate_profile(std::span<const double> w) {
  if (w.empty()) throw InvalidArgument("integrate_profile: empty series");
  const double m = detail::mean(w);
  std::vector<double> z;
  z.reserve(w.size());
  double acc = 0.0;
  for (double v : w) {
    acc += v - m;
    z.push_back(acc);
  }
  return z;
}

namespace detail {

// Least-squares polynomial detrender for a fixed window length. Coordinates
// are centered and scaled to [-1, 1]; the normal-equation matrix is factored
// once (Cholesky) and reused for every window of that length.
class WindowDetrender {
 public:
  WindowDetrender(std::size_t m, int degree) : m_(m), k_(static_cast<std::size_t>(degree) + 1) {
    basis_.resize(m_ * k_);
    const double half = (static_cast<double>(m_) - 1.0) / 2.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double t = (static_cast<double>(i) - half) / half;
      double p = 1.0;
      for (std::size_t j = 0; j < k_; ++j) {
        basis_[i * k_ + j] = p;
        p *= t;
      }
    }
    // Gram matrix, then in-place Cholesky (lower).
    chol_.assign(k_ * k_, 0.0);
    for (std::size_t a = 0; a < k_; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        double s = 0;
        for (std::size_t i = 0; i < m_; ++i) s += basis_[i * k_ + a] * basis_[i * k_ + b];
        chol_[a * k_ + b] = s;
      }
    }
    for (std::size_t a = 0; a < k_; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        double s = chol_[a * k_ + b];
        for (std::size_t c = 0; c < b; ++c) s -= chol_[a * k_ + c] * chol_[b * k_ + c];
        if (a == b) {
          if (!(s > 0)) throw DegenerateInput("dfa: singular window design");
          chol_[a * k_ + a] = std::sqrt(s);
        } else {
          chol_[a * k_ + b] = s / chol_[b * k_ + b];
        }
      }
    }
    coef_.resize(k_);
  }

  // Mean squared residual of y after removing the fitted polynomial.
  double mean_square_residual(const double* y) {
    for (std::size_t j = 0; j < k_; ++j) coef_[j] = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < k_; ++j) coef_[j] += basis_[i * k_ + j] * y[i];
    }
    // solve L L^T c = V^T y
    for (std::size_t a = 0; a < k_; ++a) {
      double s = coef_[a];
      for (std::size_t c = 0; c < a; ++c) s -= chol_[a * k_ + c] * coef_[c];
      coef_[a] = s / chol_[a * k_ + a];
    }
    for (std::size_t a = k_; a-- > 0;) {
      double s = coef_[a];
      for (std::size_t c = a + 1; c < k_; ++c) s -= chol_[c * k_ + a] * coef_[c];
      coef_[a] = s / chol_[a * k_ + a];
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      double fit = 0.0;
      for (std::size_t j = 0; j < k_; ++j) fit += basis_[i * k_ + j] * coef_[j];
      const double r = y[i] - fit;
      sse += r * r;
    }
    return sse / static_cast<double>(m_);
  }

 private:
  std::size_t m_;
  std::size_t k_;
  std::vector<double> basis_;
  std::vector<double> chol_;
  std::vector<double> coef_;
};

}  // namespace detail

namespace detail {

// Windowed fluctuation without the quarter-length bound on m.
inline double windowed_fluctuation(std::span<const double> profile, std::size_t m, int degree) {
  if (degree < 1) throw InvalidArgument("fluctuation: detrend degree must be >= 1");
  if (m < static_cast<std::size_t>(degree) + 2) throw InvalidArgument("fluctuation: window shorter than degree + 2");
  if (m > profile.size()) throw InvalidArgument("fluctuation: window longer than the series");
  WindowDetrender det(m, degree);
  const std::size_t n = profile.size();
  const std::size_t s = n / m;
  double total = 0.0;
  for (std::size_t v = 0; v < s; ++v) {
    total += det.mean_square_residual(profile.data() + v * m);
    total += det.mean_square_residual(profile.data() + (n - (v + 1) * m));
  }
  return std::sqrt(total / static_cast<double>(2 * s));
}

}  // namespace detail

inline double fluctuation(std::span<const double> profile, std::size_t m, int degree) {
  if (m > profile.size() / 4) throw InvalidArgument("fluctuation: window longer than a quarter of the series");
  return detail::windowed_fluctuation(profile, m, degree);
}

inline FluctuationCurve dfa_curve(std::span<const double> series, const DfaConfig& config) {
  if (config.window_sizes.empty()) throw InvalidArgument("dfa: no window sizes configured");
  const auto max_m = *std::max_element(config.window_sizes.begin(), config.window_sizes.end());
  if (series.size() < 4 * max_m) throw InvalidArgument("dfa: series shorter than 4x the largest window");
  const auto profile = integrate_profile(series);
  FluctuationCurve curve;
  for (auto m : config.window_sizes) curve.points.push_back({m, fluctuation(profile, m, config.detrend_degree)});
  return curve;
}

// Fits ln F = intercept + h ln m over the points with fit_min <= m <= fit_max
// and F > 0. Throws UndefinedExponent with fewer than four such points.
inline HurstEstimate estimate_hurst(const FluctuationCurve& curve, std::size_t fit_min = 0,
                                    std::size_t fit_max = std::numeric_limits<std::size_t>::max()) {
  std::vector<double> lx, ly;
  for (const auto& p : curve.points) {
    if (p.m >= fit_min && p.m <= fit_max && p.f > 0 && std::isfinite(p.f)) {
      lx.push_back(std::log(static_cast<double>(p.m)));
      ly.push_back(std::log(p.f));
    }
  }
  if (lx.size() < 4) throw UndefinedExponent("scale exponent undefined: fewer than 4 positive fluctuation points");
  const auto line = fit_linear_map(lx, ly);
  const double my = detail::mean(ly);
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - line(lx[i]);
    ss_res += r * r;
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  HurstEstimate est;
  est.h = line.alpha;
  est.intercept = line.beta;
  est.fit_r2 = ss_tot > 0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  est.fit_points = lx.size();
  return est;
}

inline HurstEstimate estimate_hurst(const FluctuationCurve& curve, const DfaConfig& config) {
  return estimate_hurst(curve, config.fit_min, config.fit_max);
}

// Fisher-Yates with rejection-sampled bounded draws.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(v[i - 1], v[static_cast<std::size_t>(r % bound)]);
  }
}

inline double shuffled_hurst(std::span<const double> series, const DfaConfig& config, std::mt19937_64& rng) {
  std::vector<double> copy(series.begin(), series.end());
  seeded_shuffle(copy, rng);
  return estimate_hurst(dfa_curve(copy, config), config).h;
}

inline double shuffled_hurst(std::span<const double> series, const DfaConfig& config) {
  std::mt19937_64 rng(config.shuffle_seed);
  return shuffled_hurst(series, config, rng);
}

// h with its shuffled control filled in.
inline HurstEstimate hurst_with_control(std::span<const double> series, const DfaConfig& config,
                                        FluctuationCurve* curve_out = nullptr) {
  auto curve = dfa_curve(series, config);
  auto est = estimate_hurst(curve, config);
  est.h_shuffled = shuffled_hurst(series, config);
  if (curve_out) *curve_out = std::move(curve);
  return est;
}

// CSV `m,F`.
inline void write_curve_csv(const FluctuationCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot write " + path.string());
  out << "m,F\n";
  char buf[64];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%zu,%.6g\n", p.m, p.f);
    out << buf;
  }
  if (!out) throw OutputError("write failed: " + path.string());
}

}  // namespace sentlen
