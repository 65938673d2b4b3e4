// Copyright 2026 The bwprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bwprobe/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bwprobe {

namespace {

constexpr double kErsCriticalValue5Pct = -1.95;

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binom_pmf(std::int64_t n, std::int64_t k, double p) {
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  return std::exp(log_choose(n, k) + static_cast<double>(k) * std::log(p) +
                  static_cast<double>(n - k) * std::log1p(-p));
}

// Sorted copy with +inf above every finite value; NaN rejected.
std::vector<double> sorted_samples(const std::vector<double>& samples) {
  std::vector<double> s(samples.begin(), samples.end());
  for (double x : s)
    if (std::isnan(x)) throw std::invalid_argument("samples must not contain NaN");
  std::stable_sort(s.begin(), s.end());
  return s;
}

double empirical_quantile(const std::vector<double>& sorted, double level) {
  auto n = static_cast<std::int64_t>(sorted.size());
  auto rank = static_cast<std::int64_t>(std::ceil(level * static_cast<double>(n)));
  rank = std::max<std::int64_t>(1, std::min(rank, n));
  return sorted[static_cast<std::size_t>(rank - 1)];
}

struct GpdCandidate {
  double shape = 0.0;
  double scale = 0.0;
  bool valid = false;
};

// Profile log-likelihood in theta = shape/scale; the scale is concentrated
// out, leaving a one-dimensional search.
double gpd_profile_loglik(const std::vector<double>& y, double theta) {
  auto m = static_cast<double>(y.size());
  if (theta == 0.0) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= m;
    return -m * (std::log(mean) + 1.0);
  }
  double k = 0.0;
  for (double v : y) {
    double a = 1.0 + theta * v;
    if (a <= 0.0) return -kInf;
    k += std::log(a);
  }
  k /= m;
  if (k == 0.0) return -kInf;  // theta at the edge of usefulness
  double scale = k / theta;
  if (!(scale > 0.0)) return -kInf;
  return -m * (std::log(scale) + k + 1.0);
}

GpdCandidate gpd_mle(const std::vector<double>& y) {
  double y_max = *std::max_element(y.begin(), y.end());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());

  // Candidate grid in theta, log-spaced on both sides of zero.  Negative
  // thetas are capped just above the domain edge -1/y_max.
  double theta_lo = -(1.0 - 1e-9) / y_max;
  std::vector<double> grid = {0.0};
  for (int i = 0; i <= 240; ++i) {
    double mag = std::exp(std::log(1e-8 / mean) +
                          (std::log(1e4 / mean) - std::log(1e-8 / mean)) * i / 240.0);
    grid.push_back(mag);
    if (-mag > theta_lo) grid.push_back(-mag);
  }
  std::sort(grid.begin(), grid.end());

  double best_theta = 0.0;
  double best_ll = -kInf;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double ll = gpd_profile_loglik(y, grid[i]);
    if (ll > best_ll) {
      best_ll = ll;
      best_theta = grid[i];
      best_idx = i;
    }
  }
  if (!(best_ll > -kInf)) return {};

  // Golden-section refinement between the neighbors of the best grid point.
  double a = best_idx > 0 ? grid[best_idx - 1] : best_theta;
  double b = best_idx + 1 < grid.size() ? grid[best_idx + 1] : best_theta;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(best_theta)); ++it) {
    if (gpd_profile_loglik(y, c) > gpd_profile_loglik(y, d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  double theta = (a + b) / 2.0;
  if (gpd_profile_loglik(y, best_theta) > gpd_profile_loglik(y, theta))
    theta = best_theta;

  GpdCandidate out;
  if (theta == 0.0) {
    out = {0.0, mean, true};
  } else {
    double k = 0.0;
    for (double v : y) k += std::log(1.0 + theta * v);
    k /= static_cast<double>(y.size());
    out = {k, k / theta, true};
  }
  // A search pinned to the negative domain edge signals an unbounded
  // likelihood (shape <= -1): report failure so the caller can fall back.
  if (!(out.scale > 0.0) || !std::isfinite(out.shape) || out.shape <= -1.0 + 1e-9 ||
      theta <= theta_lo * (1.0 - 1e-6))
    out.valid = false;
  return out;
}

// Probability-weighted moments (Hosking & Wallis) on the sorted excesses.
GpdCandidate gpd_pwm(std::vector<double> y) {
  std::sort(y.begin(), y.end());
  auto m = static_cast<double>(y.size());
  double b0 = 0.0, b1 = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    b0 += y[j];
    b1 += (static_cast<double>(j) / (m - 1.0)) * y[j];
  }
  b0 /= m;
  b1 /= m;
  double denom = b0 - 2.0 * b1;
  if (denom == 0.0) return {};
  GpdCandidate out;
  out.scale = 2.0 * b0 * b1 / denom;
  out.shape = 2.0 - b0 / denom;
  out.valid = out.scale > 0.0 && std::isfinite(out.shape);
  return out;
}

GpdCandidate fit_excesses(const std::vector<double>& y) {
  double lo = *std::min_element(y.begin(), y.end());
  double hi = *std::max_element(y.begin(), y.end());
  if (lo == hi) throw DegenerateFitError("gpd_fit: exceedances are all equal");
  GpdCandidate c = gpd_mle(y);
  if (!c.valid) c = gpd_pwm(y);
  if (!c.valid) throw DegenerateFitError("gpd_fit: no admissible parameters");
  return c;
}

}  // namespace

ErsResult ers_statistic(const std::vector<double>& series, std::ostream* residuals_csv) {
  auto T = static_cast<std::int64_t>(series.size());
  if (T < 20) throw std::invalid_argument("ers_statistic: need at least 20 points");
  for (double v : series)
    if (!std::isfinite(v)) throw std::invalid_argument("ers_statistic: non-finite value");

  auto [mn, mx] = std::minmax_element(series.begin(), series.end());
  ErsResult res;
  res.critical_value = kErsCriticalValue5Pct;
  // (Near-)zero variance is trivially mean-reverting.  The relative-range
  // guard matters in practice: an unloaded deterministic link yields delays
  // equal up to the last bit, and a unit-root regression on pure rounding
  // noise is meaningless.
  double scale = std::max({1.0, std::abs(*mn), std::abs(*mx)});
  if (*mx - *mn <= 1e-12 * scale) {
    res.statistic = -kInf;
    res.stationary = true;
    res.lag_order = 0;
    return res;
  }

  // GLS demeaning under the local alternative alpha_bar = 1 - 7/T.
  double alpha = 1.0 - 7.0 / static_cast<double>(T);
  double sxz = series[0], sxx = 1.0;  // t = 1 term: x = 1, z = y_1
  double xq = 1.0 - alpha;
  for (std::int64_t t = 1; t < T; ++t) {
    double z = series[t] - alpha * series[t - 1];
    sxz += xq * z;
    sxx += xq * xq;
  }
  double mu = sxz / sxx;
  std::vector<double> y(series.size());
  for (std::int64_t t = 0; t < T; ++t) y[t] = series[t] - mu;

  int k = static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
  res.lag_order = k;

  // ADF regression without intercept: dy_t on y_{t-1} and k lagged dy terms.
  std::int64_t rows = T - 1 - k;
  std::int64_t p = 1 + k;
  Eigen::MatrixXd X(rows, p);
  Eigen::VectorXd Y(rows);
  for (std::int64_t i = 0; i < rows; ++i) {
    std::int64_t t = i + k + 1;  // 0-based index of the regressand dy_t
    Y(i) = y[t] - y[t - 1];
    X(i, 0) = y[t - 1];
    for (int j = 1; j <= k; ++j) X(i, j) = y[t - j] - y[t - j - 1];
  }
  Eigen::VectorXd beta = X.colPivHouseholderQr().solve(Y);
  Eigen::VectorXd resid = Y - X * beta;
  if (residuals_csv) {
    *residuals_csv << "row,residual\n";
    for (std::int64_t i = 0; i < rows; ++i) *residuals_csv << i << ',' << resid(i) << '\n';
  }
  double sigma2 = resid.squaredNorm() / static_cast<double>(rows - p);
  Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::MatrixXd xtx_inv =
      xtx.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  double var0 = sigma2 * xtx_inv(0, 0);
  if (!(var0 > 0.0) || !std::isfinite(var0)) {
    // Perfect fit (e.g. an exact ramp): call it diverging unless the level
    // coefficient itself pulls downward.
    res.statistic = beta(0) < 0.0 ? -kInf : kInf;
  } else {
    res.statistic = beta(0) / std::sqrt(var0);
  }
  res.stationary = res.statistic < res.critical_value;
  return res;
}

bool trend_test(const std::vector<double>& series) {
  if (series.size() < 40)
    throw std::invalid_argument("trend_test: need at least 40 points");
  std::vector<double> half(series.begin(),
                           series.begin() + static_cast<std::ptrdiff_t>(series.size() / 2));
  return ers_statistic(series).statistic < ers_statistic(half).statistic;
}

PercentileEstimate percentile_with_ci(const std::vector<double>& samples, double level,
                                      double confidence) {
  auto n = static_cast<std::int64_t>(samples.size());
  if (n < 10) throw std::invalid_argument("percentile_with_ci: need at least 10 samples");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("percentile_with_ci: level must be in (0,1)");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("percentile_with_ci: confidence must be in (0,1)");
  std::vector<double> s = sorted_samples(samples);

  auto rank = static_cast<std::int64_t>(std::ceil(level * static_cast<double>(n)));
  if (rank < 1 || rank > n)
    throw std::invalid_argument("percentile_with_ci: rank outside the sample");

  // CDF of Binomial(n, level) once; brackets read coverage from it.
  std::vector<double> cdf(static_cast<std::size_t>(n) + 1);
  double acc = 0.0;
  for (std::int64_t j = 0; j <= n; ++j) {
    acc += binom_pmf(n, j, level);
    cdf[static_cast<std::size_t>(j)] = std::min(acc, 1.0);
  }
  auto coverage = [&](std::int64_t l, std::int64_t u) {
    // P[X_(l) <= q_level <= X_(u)] = F(u-1) - F(l-1), with u = n+1 unbounded.
    double hi = u >= n + 1 ? 1.0 : cdf[static_cast<std::size_t>(u - 1)];
    return hi - cdf[static_cast<std::size_t>(l - 1)];
  };

  // Smallest bracket l <= rank <= u meeting the confidence; ties prefer the
  // larger coverage, then the smaller l.  Two-pointer walk: the minimal u is
  // nondecreasing in l.
  std::int64_t best_l = 1, best_u = n + 1;
  double best_cov = coverage(1, n + 1);
  bool found = best_cov >= confidence;
  std::int64_t u = std::max<std::int64_t>(rank, 2);
  for (std::int64_t l = 1; l <= rank; ++l) {
    if (u < l + 1) u = l + 1;
    while (u <= n + 1 && coverage(l, u) < confidence) ++u;
    if (u > n + 1) break;  // no feasible u for this or any larger l
    double cov = coverage(l, u);
    std::int64_t width = u - l;
    if (!found || width < best_u - best_l ||
        (width == best_u - best_l &&
         (cov > best_cov + 0.0 || (cov == best_cov && l < best_l)))) {
      best_l = l;
      best_u = u;
      best_cov = cov;
      found = true;
    }
  }

  PercentileEstimate est;
  est.level = level;
  est.confidence = confidence;
  est.ci_low = s[static_cast<std::size_t>(best_l - 1)];
  est.ci_high = best_u >= n + 1 ? kInf : s[static_cast<std::size_t>(best_u - 1)];
  est.value = s[static_cast<std::size_t>(rank - 1)];

  // Share rule: when at least (1 - level) of the trains never delivered,
  // the percentile itself is unbounded.
  std::int64_t inf_count = 0;
  for (double v : s)
    if (v == kInf) ++inf_count;
  if (static_cast<double>(inf_count) >= (1.0 - level) * static_cast<double>(n)) {
    est.value = kInf;
    est.ci_high = kInf;
  }
  return est;
}

GpdTailFit gpd_fit(const std::vector<double>& samples, double threshold_quantile) {
  if (!(threshold_quantile > 0.5 && threshold_quantile < 1.0))
    throw std::invalid_argument("gpd_fit: threshold quantile must be in (0.5, 1)");
  for (double v : samples)
    if (!std::isfinite(v)) throw std::invalid_argument("gpd_fit: samples must be finite");
  auto n = static_cast<std::int64_t>(samples.size());
  if (n < 100) throw std::invalid_argument("gpd_fit: need at least 100 samples");

  std::vector<double> s = sorted_samples(samples);
  double u = empirical_quantile(s, threshold_quantile);
  std::vector<double> y;
  for (double v : s)
    if (v > u) y.push_back(v - u);
  if (static_cast<std::int64_t>(y.size()) < 20)
    throw InsufficientTailError("gpd_fit: fewer than 20 exceedances");

  GpdCandidate c = fit_excesses(y);
  GpdTailFit fit;
  fit.shape = c.shape;
  fit.scale = c.scale;
  fit.threshold = u;
  fit.exceedance_fraction = static_cast<double>(y.size()) / static_cast<double>(n);
  fit.sample_count = static_cast<std::int64_t>(y.size());
  return fit;
}

double pot_quantile(const GpdTailFit& fit, double eps) {
  if (!(eps > 0.0) || eps > fit.exceedance_fraction)
    throw std::invalid_argument("pot_quantile: eps must be in (0, zeta_u]");
  if (!(fit.scale > 0.0)) throw std::invalid_argument("pot_quantile: invalid fit");
  double log_ratio = std::log(eps / fit.exceedance_fraction);
  if (fit.shape == 0.0) return fit.threshold - fit.scale * log_ratio;
  return fit.threshold + fit.scale / fit.shape * std::expm1(-fit.shape * log_ratio);
}

std::pair<double, double> pot_bootstrap_ci(const std::vector<double>& samples,
                                           double threshold_quantile, double eps,
                                           double confidence, const CounterRng& rng,
                                           int resamples) {
  if (resamples < 2) throw std::invalid_argument("pot_bootstrap_ci: need >= 2 resamples");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("pot_bootstrap_ci: confidence must be in (0,1)");
  GpdTailFit base = gpd_fit(samples, threshold_quantile);

  std::vector<double> s = sorted_samples(samples);
  std::vector<double> y;
  for (double v : s)
    if (v > base.threshold) y.push_back(v - base.threshold);
  auto m = static_cast<std::size_t>(y.size());

  std::vector<double> estimates;
  estimates.reserve(static_cast<std::size_t>(resamples));
  std::uint64_t counter = 0;
  std::vector<double> draw(m);
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < m; ++i) {
      auto idx = static_cast<std::size_t>(rng.uniform(counter++) * static_cast<double>(m));
      if (idx >= m) idx = m - 1;
      draw[i] = y[idx];
    }
    GpdCandidate c;
    try {
      c = fit_excesses(draw);
    } catch (const DegenerateFitError&) {
      continue;
    }
    GpdTailFit f = base;
    f.shape = c.shape;
    f.scale = c.scale;
    estimates.push_back(pot_quantile(f, eps));
  }
  if (estimates.size() < 2)
    throw DegenerateFitError("pot_bootstrap_ci: bootstrap refits all degenerate");
  std::sort(estimates.begin(), estimates.end());
  double lo = empirical_quantile(estimates, (1.0 - confidence) / 2.0);
  double hi = empirical_quantile(estimates, (1.0 + confidence) / 2.0);
  return {lo, hi};
}

double majority_pass_probability(double p_single, int iterations) {
  if (iterations < 1 || iterations % 2 == 0)
    throw std::invalid_argument("majority_pass_probability: iterations must be odd >= 1");
  if (!(p_single >= 0.0 && p_single <= 1.0))
    throw std::invalid_argument("majority_pass_probability: p must be in [0,1]");
  double total = 0.0;
  for (std::int64_t j = (iterations + 1) / 2; j <= iterations; ++j)
    total += binom_pmf(iterations, j, p_single);
  return std::min(total, 1.0);
}

}  // namespace bwprobe
