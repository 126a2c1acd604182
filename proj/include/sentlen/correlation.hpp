#pragma once

// Linear and rank association between two aligned series.
//
// Kendall tau-b and Goodman-Kruskal gamma share one O(n log n) pass that
// counts concordant/discordant pairs and ties (Knight's merge-sort method).
// Independence p-values: exact permutation enumeration for n < 10, normal
// approximations above.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "sentlen/error.hpp"
#include "sentlen/linear_map.hpp"

namespace sentlen {

inline constexpr double kDefaultSignificance = 0.01;
inline constexpr std::size_t kExactPermutationLimit = 10;

struct PearsonResult {
  double r = 0.0;
};

struct RankTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double threshold = kDefaultSignificance;

  bool rejected() const noexcept { return p_value < threshold; }
};

// Pair counts over all n(n-1)/2 pairs.
struct ConcordanceCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;     // tied in x (including joint ties)
  std::int64_t tied_y = 0;     // tied in y (including joint ties)
  std::int64_t tied_both = 0;  // tied in both
  std::int64_t pairs = 0;
};

namespace detail {

inline void require_aligned(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) throw InvalidArgument("series length mismatch");
  if (x.size() < min_n) throw InvalidArgument("need at least " + std::to_string(min_n) + " observations");
}

inline double mean(std::span<const double> v) {
  long double s = 0;
  for (double d : v) s += d;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

inline std::int64_t tie_pairs_sorted(std::span<const double> sorted) {
  std::int64_t total = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto run = static_cast<std::int64_t>(j - i);
    total += run * (run - 1) / 2;
    i = j;
  }
  return total;
}

// Counts inversions (strict y[i] > y[j], i < j) while merge-sorting y.
inline std::int64_t merge_count(std::vector<double>& y, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(y, buf, lo, mid) + merge_count(y, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (y[j] < y[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = y[j++];
    } else {
      buf[k++] = y[i++];
    }
  }
  while (i < mid) buf[k++] = y[i++];
  while (j < hi) buf[k++] = y[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            y.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

// Midranks (1-based), ties share their average rank.
inline std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

}  // namespace detail

inline ConcordanceCounts concordance_counts(std::span<const double> x, std::span<const double> y) {
  detail::require_aligned(x, y, 2);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  ConcordanceCounts c;
  c.pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x[order[i]], ys[i] = y[order[i]];
  c.tied_x = detail::tie_pairs_sorted(xs);
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i + 1;
      while (j < n && xs[j] == xs[i] && ys[j] == ys[i]) ++j;
      const auto run = static_cast<std::int64_t>(j - i);
      c.tied_both += run * (run - 1) / 2;
      i = j;
    }
  }
  std::vector<double> buf(n);
  c.discordant = detail::merge_count(ys, buf, 0, n);
  c.tied_y = detail::tie_pairs_sorted(ys);
  const std::int64_t untied = c.pairs - c.tied_x - c.tied_y + c.tied_both;
  c.concordant = untied - c.discordant;
  return c;
}

inline PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  detail::require_aligned(x, y, 2);
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double dx = x[i] - mx;
    const long double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw DegenerateInput("pearson: zero variance input");
  const double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
  return {std::clamp(r, -1.0, 1.0)};
}

inline double kendall_tau_b(const ConcordanceCounts& c) {
  const double s = static_cast<double>(c.concordant - c.discordant);
  const double denom = std::sqrt(static_cast<double>(c.pairs - c.tied_x) * static_cast<double>(c.pairs - c.tied_y));
  return s / denom;
}

inline double goodman_kruskal_gamma_value(const ConcordanceCounts& c) {
  return static_cast<double>(c.concordant - c.discordant) / static_cast<double>(c.concordant + c.discordant);
}

namespace detail {

// Variance of S = C - D under independence, with tie corrections.
inline double kendall_s_variance(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  auto tie_terms = [](std::span<const double> v, double& v_t, double& t1, double& t2) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    v_t = t1 = t2 = 0;
    std::size_t i = 0;
    while (i < s.size()) {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] == s[i]) ++j;
      const double t = static_cast<double>(j - i);
      v_t += t * (t - 1) * (2 * t + 5);
      t1 += t * (t - 1);
      t2 += t * (t - 1) * (t - 2);
      i = j;
    }
  };
  double vx, x1, x2, vy, y1, y2;
  tie_terms(x, vx, x1, x2);
  tie_terms(y, vy, y1, y2);
  const double v0 = n * (n - 1) * (2 * n + 5);
  return (v0 - vx - vy) / 18.0 + (x1 * y1) / (2 * n * (n - 1)) + (x2 * y2) / (9 * n * (n - 1) * (n - 2));
}

// Direct O(n^2) pair count, used inside the permutation loop where n < 10.
inline ConcordanceCounts small_counts(std::span<const double> x, std::span<const double> y) {
  ConcordanceCounts c;
  const std::size_t n = x.size();
  c.pairs = static_cast<std::int64_t>(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool tx = x[i] == x[j];
      const bool ty = y[i] == y[j];
      c.tied_x += tx;
      c.tied_y += ty;
      c.tied_both += tx && ty;
      if (tx || ty) continue;
      ((x[i] < x[j]) == (y[i] < y[j]) ? c.concordant : c.discordant) += 1;
    }
  }
  return c;
}

// Two-sided permutation p-value: fraction of all n! re-pairings of y whose
// |statistic| is at least the observed one.
template <typename Stat>
double exact_permutation_p(std::span<const double> x, std::span<const double> y, Stat stat) {
  const double observed = std::fabs(stat(x, std::span<const double>(y)));
  std::vector<double> perm(y.begin(), y.end());
  std::vector<std::size_t> idx(perm.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t hits = 0, total = 0;
  std::vector<double> py(perm.size());
  do {
    for (std::size_t i = 0; i < idx.size(); ++i) py[i] = perm[idx[i]];
    double s;
    try {
      s = std::fabs(stat(x, std::span<const double>(py)));
    } catch (const DegenerateInput&) {
      s = 0.0;
    }
    if (s >= observed - 1e-12) ++hits;
    ++total;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace detail

inline RankTestResult kendall_tau(std::span<const double> x, std::span<const double> y,
                                  double threshold = kDefaultSignificance) {
  const auto c = concordance_counts(x, y);
  if (c.pairs == c.tied_x || c.pairs == c.tied_y) throw DegenerateInput("kendall_tau: all values tied");
  RankTestResult res{kendall_tau_b(c), 1.0, threshold};
  if (x.size() < kExactPermutationLimit) {
    res.p_value = detail::exact_permutation_p(x, y, [](auto a, auto b) {
      const auto cc = detail::small_counts(a, b);
      if (cc.pairs == cc.tied_y) return 0.0;
      return kendall_tau_b(cc);
    });
  } else {
    const double var = detail::kendall_s_variance(x, y);
    const double s = static_cast<double>(c.concordant - c.discordant);
    res.p_value = var > 0 ? detail::normal_two_sided_p(s / std::sqrt(var)) : 1.0;
  }
  return res;
}

// Gamma = (C - D) / (C + D), ties excluded. Large-sample test on the null
// variance of S = C - D.
inline RankTestResult goodman_kruskal_gamma(std::span<const double> x, std::span<const double> y,
                                            double threshold = kDefaultSignificance) {
  const auto c = concordance_counts(x, y);
  if (c.concordant + c.discordant == 0) throw DegenerateInput("gamma: every pair is tied");
  RankTestResult res{goodman_kruskal_gamma_value(c), 1.0, threshold};
  if (x.size() < kExactPermutationLimit) {
    res.p_value = detail::exact_permutation_p(x, y, [](auto a, auto b) {
      const auto cc = detail::small_counts(a, b);
      if (cc.concordant + cc.discordant == 0) return 0.0;
      return goodman_kruskal_gamma_value(cc);
    });
  } else {
    const double var = detail::kendall_s_variance(x, y);
    const double s = static_cast<double>(c.concordant - c.discordant);
    res.p_value = var > 0 ? detail::normal_two_sided_p(s / std::sqrt(var)) : 1.0;
  }
  return res;
}

// Pearson on midranks; z = rho * sqrt(n - 1) for n >= 10.
inline RankTestResult spearman(std::span<const double> x, std::span<const double> y,
                               double threshold = kDefaultSignificance) {
  detail::require_aligned(x, y, 2);
  const auto rx = detail::midranks(x);
  const auto ry = detail::midranks(y);
  const double rho = pearson(rx, ry).r;
  RankTestResult res{rho, 1.0, threshold};
  if (x.size() < kExactPermutationLimit) {
    res.p_value = detail::exact_permutation_p(rx, ry, [](auto a, auto b) { return pearson(a, b).r; });
  } else {
    res.p_value = detail::normal_two_sided_p(rho * std::sqrt(static_cast<double>(x.size() - 1)));
  }
  return res;
}

// Ordinary least squares y = alpha x + beta.
inline LinearMap fit_linear_map(std::span<const double> x, std::span<const double> y) {
  detail::require_aligned(x, y, 2);
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  long double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double dx = x[i] - mx;
    sxy += dx * (y[i] - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw DegenerateInput("fit_linear_map: constant x");
  const double alpha = static_cast<double>(sxy / sxx);
  return {alpha, my - alpha * mx};
}

}  // namespace sentlen
