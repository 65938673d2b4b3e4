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

#ifndef BWPROBE_STATS_HPP_
#define BWPROBE_STATS_HPP_

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "bwprobe/common.hpp"

namespace bwprobe {

// Result of the DF-GLS unit-root test (Elliott–Rothenberg–Stock).  The series
// is declared stationary when the t-statistic on the lagged level falls below
// the 5% critical value.
struct ErsResult {
  double statistic = 0.0;
  double critical_value = -1.95;
  bool stationary = false;
  int lag_order = 0;
};

// DF-GLS test with constant-only GLS demeaning (c_bar = -7), an ADF
// regression without intercept on the demeaned series, and the fixed Schwert
// lag rule floor(4 * (T/100)^(1/4)).  A zero-variance series short-circuits
// to a -inf statistic (stationary).  Requires length >= 20.
// If `residuals_csv` is given, the ADF regression residuals are dumped as
// "row,residual" lines for diagnostics.
ErsResult ers_statistic(const std::vector<double>& series,
                        std::ostream* residuals_csv = nullptr);

// True iff the unit-root statistic of the full series is strictly below the
// statistic of its first half: an improving (decreasing) statistic suggests
// convergence toward stationarity rather than a diverging trend.
// Requires length >= 40 so both windows satisfy the test's minimum.
bool trend_test(const std::vector<double>& series);

// An order-statistic quantile with a distribution-free confidence interval.
struct PercentileEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.0;       // quantile level, e.g. 0.95
  double confidence = 0.0;  // CI confidence, e.g. 0.95
};

// Order statistic at rank ceil(level * I) with the smallest binomial bracket
// [X(l), X(u)] whose coverage reaches `confidence` (ties: larger coverage,
// then smaller l; u may exceed the sample, making ci_high unbounded).
// Infinite samples sort above all finite ones; if their share reaches
// 1 - level, the estimate itself is +inf.  Requires >= 10 samples.
PercentileEstimate percentile_with_ci(const std::vector<double>& samples, double level,
                                      double confidence);

// Generalized Pareto fit of the excesses over a high empirical threshold.
struct GpdTailFit {
  double shape = 0.0;                // xi
  double scale = 0.0;                // sigma > 0
  double threshold = 0.0;            // u, in the sample's units
  double exceedance_fraction = 0.0;  // zeta_u = m / n
  std::int64_t sample_count = 0;     // m, the number of exceedances fitted
};

// Fits the tail above the empirical `threshold_quantile` (strict exceedances)
// by profile maximum likelihood, falling back to probability-weighted moments
// when the likelihood search lands on a domain edge.  Requires >= 100 finite
// samples and threshold_quantile in (0.5, 1); fewer than 20 exceedances raise
// InsufficientTailError, an all-equal exceedance set DegenerateFitError.
GpdTailFit gpd_fit(const std::vector<double>& samples, double threshold_quantile);

// Tail quantile at violation probability eps extrapolated from the fit:
// u + (sigma/xi) * ((eps/zeta_u)^(-xi) - 1), with the log-form limit at
// xi = 0.  Requires 0 < eps <= zeta_u (larger eps belongs to the empirical
// percentile, not the tail model).
double pot_quantile(const GpdTailFit& fit, double eps);

// Nonparametric bootstrap CI for pot_quantile: resamples the exceedance set,
// refits, and takes symmetric percentile bounds of the re-estimated quantile.
// The threshold and exceedance fraction stay fixed at their full-sample
// values.  Deterministic given `rng`.
std::pair<double, double> pot_bootstrap_ci(const std::vector<double>& samples,
                                           double threshold_quantile, double eps,
                                           double confidence, const CounterRng& rng,
                                           int resamples = 200);

// P[Binomial(iterations, p_single) > iterations / 2]: the chance that a
// per-iteration pass probability survives a majority vote.  `iterations`
// must be odd so the vote cannot tie.
double majority_pass_probability(double p_single, int iterations);

}  // namespace bwprobe

#endif  // BWPROBE_STATS_HPP_
