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
//
// Probing orchestration: rate selection by binary increase + binary search,
// adaptive train lengths driven by stationarity detection, steady-state
// delay percentiles (direct or peaks-over-threshold), and service-curve
// assembly from the per-rate percentiles.

#ifndef BWPROBE_ENGINE_HPP_
#define BWPROBE_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bwprobe/curve.hpp"
#include "bwprobe/sim.hpp"
#include "bwprobe/stats.hpp"
#include "json.hpp"

namespace bwprobe {

enum class ProbingMode { kAdaptive, kFixedShort };

struct ProbingConfig {
  double r_acc = 1.0;    // rate resolution: bracket width at which probing stops
  double eps_w = 0.05;   // per-rate violation probability (delay percentile level)
  // When set, the per-rate level is re-derived after the rate scan as
  // eps_total / (rates probed), so the union bound over all segments equals
  // this total.
  std::optional<double> eps_total;
  double confidence = 0.95;       // for percentile confidence intervals
  std::int64_t iterations = 250;  // trains per rate (I)
  std::int64_t train_min = 100;   // adaptive mode: starting train length
  std::int64_t train_max = 1 << 16;  // adaptive mode: doubling stops here
  ProbingMode mode = ProbingMode::kAdaptive;
  std::int64_t fixed_train_length = 200;  // fixed-short mode: N
  bool use_pot = true;  // tail extrapolation when eps < 10/I
  double pot_threshold_quantile = 0.9;
  double max_rate_guard = 1e9;  // binary increase beyond this raises
  int jobs = 1;                 // concurrent probe trains per rate

  void validate() const;
  nlohmann::json to_json() const;
};

enum class MeasureOutcome {
  kStationary,   // stationary share reached 1 - eps_w; finite samples
  kTrendFailed,  // majority saw no improving trend: rate is infeasible
  kTrainLimit,   // doubling hit train_max without reaching stationarity
};

// Per-rate measurement: one last-packet delay sample per train.
struct DelaySampleSet {
  double rate = 0.0;
  std::vector<double> samples;  // size = iterations; +inf for failed trains
  std::int64_t train_length_used = 0;
  double stationary_share = 0.0;  // fraction of trains passing the unit-root test
  double trend_share = 0.0;       // fraction with an improving statistic
  double feasible_share = 0.0;    // fraction passing (stationary OR trend)
  MeasureOutcome outcome = MeasureOutcome::kStationary;
  bool truncated = false;  // train_max was the binding constraint

  std::int64_t finite_count() const;
  nlohmann::json summary_json() const;
};

struct RateSelection {
  std::vector<double> probed;  // in probing order
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// Binary increase from r_acc (doubling while `passes`), then binary search
// down to a bracket of width <= r_acc.  A failure at the very first rate
// returns [0, r_acc].  Rates above max_rate_guard raise std::runtime_error.
RateSelection select_rates(const ProbingConfig& config,
                           const std::function<bool(double)>& passes);

// Probe start instant for one train: the warm-up window plus a uniform phase
// within one cross-traffic burst period (0 when the scenario has no cross
// traffic; train independence then comes from per-iteration coin streams).
double draw_probe_start(const NetworkScenario& scenario, double rate,
                        std::uint64_t iteration);

// Trains whose loss ratio reaches eps contribute no steady-state sample:
// the last departure is forced to +inf.  Lighter losses pass through.
TimestampSeries apply_loss_policy(TimestampSeries series, double eps);

// Runs `iterations` trains at the given rate, doubling the train length
// whenever stationarity is not reached but a majority of trains show an
// improving trend.  All outcomes are encoded in the sample set.
DelaySampleSet adaptive_train_measure(const NetworkScenario& scenario, double rate,
                                      const ProbingConfig& config);

// Runs `iterations` trains of fixed_train_length.  Samples are last-packet
// delays regardless of stationarity (the estimate's domain is restricted
// instead); feasible_share carries the per-train (stationary OR trend)
// majority vote used for rate selection.
DelaySampleSet fixed_train_measure(const NetworkScenario& scenario, double rate,
                                   const ProbingConfig& config);

// Delay percentile at level 1 - eps: the direct order statistic, or the
// peaks-over-threshold tail fit when eps is below what the sample count
// resolves (eps < 10/I), the samples are all finite, and use_pot is set.
// Tail-fit failures fall back to the direct estimate.
PercentileEstimate estimate_delay_percentile(const DelaySampleSet& set, double eps,
                                             const ProbingConfig& config,
                                             const CounterRng& bootstrap_rng);

struct EstimationReport {
  ServiceCurveEstimate curve;
  RateSelection selection;
  std::vector<DelaySampleSet> measurements;     // in probing order
  std::vector<PercentileEstimate> percentiles;  // parallel to measurements
  double eps_per_rate = 0.0;

  nlohmann::json to_json() const;
};

// The full pipeline: rate selection driven by per-rate measurements, delay
// percentiles, and the max-plus assembly of the service-curve estimate.
// Fixed-short mode stamps domain_limit = N - 1 on the curve.  Raises
// EmptyEstimateError when no probed rate has a finite percentile.
EstimationReport estimate_service_curve(const NetworkScenario& scenario,
                                        const ProbingConfig& config);

struct LimitingRateEstimate {
  double rate = 0.0;  // midpoint of the final bracket
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::vector<double> probed;
  std::vector<DelaySampleSet> measurements;
};

// Limiting-rate detection from short fixed-length trains: a rate is feasible
// when a strict majority of its I trains (I odd) pass the stationarity or
// trend test.
LimitingRateEstimate estimate_limiting_rate(const NetworkScenario& scenario,
                                            const ProbingConfig& config);

}  // namespace bwprobe

#endif  // BWPROBE_ENGINE_HPP_
