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

#include "bwprobe/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "bwprobe/parallel.hpp"

namespace bwprobe {

namespace {

std::uint64_t rate_bits(double rate) { return std::bit_cast<std::uint64_t>(rate); }

struct TrainVerdict {
  double sample = kInf;     // last-packet delay after the loss policy
  bool stationary = false;  // unit-root test on the train's finite delays
  bool trend = false;       // statistic improves with more data
};

TrainVerdict run_one_train(const NetworkScenario& scenario, double rate,
                           std::int64_t train_length, std::uint64_t iteration,
                           double eps_loss) {
  ProbeSpec probe;
  probe.train_length = train_length;
  probe.rate_pps = rate;
  probe.start_time_s = draw_probe_start(scenario, rate, iteration);
  probe.iteration_id = iteration;
  TimestampSeries ts = apply_loss_policy(run_probe(scenario, probe), eps_loss);

  std::vector<double> finite;
  finite.reserve(ts.packet_count());
  for (std::size_t n = 0; n < ts.packet_count(); ++n) {
    double w = ts.delay(n);
    if (is_finite(w)) finite.push_back(w);
  }
  TrainVerdict v;
  v.sample = ts.delay(ts.packet_count() - 1);
  // A train with no steady-state sample (the loss policy struck it, or the
  // tail packet never arrived) is evidence against the rate, never for it;
  // testing its surviving prefix would let heavily lossy rates vote feasible.
  if (!is_finite(v.sample)) return v;
  v.stationary = finite.size() >= 20 && ers_statistic(finite).stationary;
  v.trend = finite.size() >= 40 && trend_test(finite);
  return v;
}

std::vector<TrainVerdict> run_trains(const NetworkScenario& scenario, double rate,
                                     std::int64_t train_length,
                                     std::uint64_t iteration_base,
                                     const ProbingConfig& config) {
  std::vector<TrainVerdict> verdicts(static_cast<std::size_t>(config.iterations));
  parallel_for(config.iterations, config.jobs, [&](std::int64_t i) {
    verdicts[static_cast<std::size_t>(i)] =
        run_one_train(scenario, rate, train_length,
                      iteration_base + static_cast<std::uint64_t>(i), config.eps_w);
  });
  return verdicts;
}

void fill_shares(DelaySampleSet& set, const std::vector<TrainVerdict>& verdicts) {
  double n_st = 0.0, n_tr = 0.0, n_or = 0.0;
  for (const TrainVerdict& v : verdicts) {
    n_st += v.stationary ? 1.0 : 0.0;
    n_tr += v.trend ? 1.0 : 0.0;
    n_or += (v.stationary || v.trend) ? 1.0 : 0.0;
  }
  auto I = static_cast<double>(verdicts.size());
  set.stationary_share = n_st / I;
  set.trend_share = n_tr / I;
  set.feasible_share = n_or / I;
}

std::string outcome_name(MeasureOutcome o) {
  switch (o) {
    case MeasureOutcome::kStationary:
      return "stationary";
    case MeasureOutcome::kTrendFailed:
      return "trend_failed";
    case MeasureOutcome::kTrainLimit:
      return "train_limit";
  }
  throw std::logic_error("outcome_name: unknown outcome");
}

}  // namespace

void ProbingConfig::validate() const {
  if (!(r_acc > 0.0) || !is_finite(r_acc))
    throw std::invalid_argument("config: r_acc must be positive and finite");
  if (!(eps_w > 0.0 && eps_w < 1.0))
    throw std::invalid_argument("config: eps_w must be in (0, 1)");
  if (eps_total && !(*eps_total > 0.0 && *eps_total < 1.0))
    throw std::invalid_argument("config: eps_total must be in (0, 1)");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("config: confidence must be in (0, 1)");
  if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
  if (train_min < 40)
    throw std::invalid_argument("config: train_min must be >= 40 (trend detection)");
  if (train_min > train_max)
    throw std::invalid_argument("config: train_min must not exceed train_max");
  if (fixed_train_length < 40)
    throw std::invalid_argument("config: fixed_train_length must be >= 40");
  if (!(pot_threshold_quantile > 0.5 && pot_threshold_quantile < 1.0))
    throw std::invalid_argument("config: pot threshold quantile must be in (0.5, 1)");
  if (!(max_rate_guard >= r_acc))
    throw std::invalid_argument("config: max_rate_guard must be >= r_acc");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
}

nlohmann::json ProbingConfig::to_json() const {
  nlohmann::json j;
  j["r_acc"] = r_acc;
  j["eps_w"] = eps_w;
  j["eps_total"] = eps_total ? nlohmann::json(*eps_total) : nlohmann::json(nullptr);
  j["confidence"] = confidence;
  j["iterations"] = iterations;
  j["train_min"] = train_min;
  j["train_max"] = train_max;
  j["mode"] = mode == ProbingMode::kAdaptive ? "adaptive" : "fixed-short";
  j["fixed_train_length"] = fixed_train_length;
  j["use_pot"] = use_pot;
  j["pot_threshold_quantile"] = pot_threshold_quantile;
  j["max_rate_guard"] = max_rate_guard;
  j["jobs"] = jobs;
  return j;
}

std::int64_t DelaySampleSet::finite_count() const {
  std::int64_t c = 0;
  for (double s : samples)
    if (is_finite(s)) ++c;
  return c;
}

nlohmann::json DelaySampleSet::summary_json() const {
  nlohmann::json j;
  j["rate"] = rate;
  j["train_length"] = train_length_used;
  j["stationary_share"] = stationary_share;
  j["trend_share"] = trend_share;
  j["feasible_share"] = feasible_share;
  j["outcome"] = outcome_name(outcome);
  j["truncated"] = truncated;
  j["samples_total"] = samples.size();
  j["samples_finite"] = finite_count();
  return j;
}

RateSelection select_rates(const ProbingConfig& config,
                           const std::function<bool(double)>& passes) {
  config.validate();
  RateSelection out;
  double lo = config.r_acc;
  out.probed.push_back(lo);
  if (!passes(lo)) {
    // The search interval below the first probed rate is [0, r_acc].
    out.bracket_lo = 0.0;
    out.bracket_hi = lo;
    return out;
  }
  double hi = 2.0 * lo;
  for (;;) {
    if (hi > config.max_rate_guard)
      throw std::runtime_error("select_rates: rate guard exceeded during binary increase");
    out.probed.push_back(hi);
    if (!passes(hi)) break;
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > config.r_acc) {
    double mid = 0.5 * (lo + hi);
    out.probed.push_back(mid);
    if (passes(mid))
      lo = mid;
    else
      hi = mid;
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  return out;
}

double draw_probe_start(const NetworkScenario& scenario, double rate,
                        std::uint64_t iteration) {
  double period = scenario.cross_burst_period_s();
  if (period <= 0.0) return 0.0;
  CounterRng phase = CounterRng(mix64(scenario.seed, kStreamPhase));
  double u = phase.uniform(mix64(rate_bits(rate), iteration));
  return (scenario.warmup_intervals + u) * period;
}

TimestampSeries apply_loss_policy(TimestampSeries series, double eps) {
  if (series.packet_count() > 0 && series.loss_ratio() >= eps)
    series.departures.back() = kInf;
  return series;
}

DelaySampleSet adaptive_train_measure(const NetworkScenario& scenario, double rate,
                                      const ProbingConfig& config) {
  config.validate();
  scenario.validate();
  if (!(rate > 0.0)) throw std::invalid_argument("adaptive_train_measure: rate must be > 0");

  auto I = static_cast<std::size_t>(config.iterations);
  std::int64_t train_length = config.train_min;
  for (std::uint64_t round = 0;; ++round) {
    std::vector<TrainVerdict> verdicts = run_trains(
        scenario, rate, train_length, round * static_cast<std::uint64_t>(I), config);
    DelaySampleSet set;
    set.rate = rate;
    set.train_length_used = train_length;
    fill_shares(set, verdicts);

    if (set.stationary_share >= 1.0 - config.eps_w) {
      set.outcome = MeasureOutcome::kStationary;
      set.samples.reserve(I);
      for (const TrainVerdict& v : verdicts)
        set.samples.push_back(v.stationary ? v.sample : kInf);
      return set;
    }
    bool trend_majority = 2.0 * set.trend_share > 1.0;
    if (!trend_majority) {
      set.outcome = MeasureOutcome::kTrendFailed;
      set.samples.assign(I, kInf);
      return set;
    }
    if (2 * train_length > config.train_max) {
      set.outcome = MeasureOutcome::kTrainLimit;
      set.truncated = true;
      set.samples.assign(I, kInf);
      return set;
    }
    train_length *= 2;  // measure anew, longer
  }
}

DelaySampleSet fixed_train_measure(const NetworkScenario& scenario, double rate,
                                   const ProbingConfig& config) {
  config.validate();
  scenario.validate();
  if (!(rate > 0.0)) throw std::invalid_argument("fixed_train_measure: rate must be > 0");

  std::vector<TrainVerdict> verdicts =
      run_trains(scenario, rate, config.fixed_train_length, 0, config);
  DelaySampleSet set;
  set.rate = rate;
  set.train_length_used = config.fixed_train_length;
  fill_shares(set, verdicts);
  set.outcome = 2.0 * set.feasible_share > 1.0 ? MeasureOutcome::kStationary
                                               : MeasureOutcome::kTrendFailed;
  set.samples.reserve(verdicts.size());
  // Last-packet delays enter the estimate even without stationarity; the
  // curve's domain is restricted to the train length instead.
  for (const TrainVerdict& v : verdicts) set.samples.push_back(v.sample);
  return set;
}

PercentileEstimate estimate_delay_percentile(const DelaySampleSet& set, double eps,
                                             const ProbingConfig& config,
                                             const CounterRng& bootstrap_rng) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("estimate_delay_percentile: eps must be in (0, 1)");
  double level = 1.0 - eps;
  auto I = static_cast<std::int64_t>(set.samples.size());
  bool tail_needed = eps < 10.0 / static_cast<double>(I);
  if (config.use_pot && tail_needed && set.finite_count() == I) {
    try {
      GpdTailFit fit = gpd_fit(set.samples, config.pot_threshold_quantile);
      auto [lo, hi] = pot_bootstrap_ci(set.samples, config.pot_threshold_quantile, eps,
                                       config.confidence, bootstrap_rng);
      PercentileEstimate pe;
      pe.value = pot_quantile(fit, eps);
      pe.ci_low = lo;
      pe.ci_high = hi;
      pe.level = level;
      pe.confidence = config.confidence;
      return pe;
    } catch (const InsufficientTailError&) {
      // too few exceedances for a tail fit
    } catch (const DegenerateFitError&) {
      // exceedances carry no usable shape information
    } catch (const std::invalid_argument&) {
      // sample count below the fit's minimum, or eps beyond the tail fraction
    }
  }
  return percentile_with_ci(set.samples, level, config.confidence);
}

nlohmann::json EstimationReport::to_json() const {
  nlohmann::json j;
  j["curve"] = nlohmann::json::parse(curve.to_json());
  j["rates_probed"] = selection.probed;
  j["bracket"] = {selection.bracket_lo, selection.bracket_hi};
  j["eps_per_rate"] = eps_per_rate;
  nlohmann::json per_rate = nlohmann::json::array();
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    nlohmann::json row = measurements[i].summary_json();
    const PercentileEstimate& pe = percentiles[i];
    row["delay_percentile_s"] =
        is_finite(pe.value) ? nlohmann::json(pe.value) : nlohmann::json(nullptr);
    row["ci_low_s"] = is_finite(pe.ci_low) ? nlohmann::json(pe.ci_low) : nlohmann::json(nullptr);
    row["ci_high_s"] =
        is_finite(pe.ci_high) ? nlohmann::json(pe.ci_high) : nlohmann::json(nullptr);
    row["level"] = pe.level;
    per_rate.push_back(row);
  }
  j["per_rate"] = per_rate;
  return j;
}

EstimationReport estimate_service_curve(const NetworkScenario& scenario,
                                        const ProbingConfig& config) {
  config.validate();
  scenario.validate();
  if (config.iterations < 10)
    throw std::invalid_argument(
        "estimate_service_curve: percentile estimation needs iterations >= 10");

  std::vector<DelaySampleSet> measurements;
  auto passes = [&](double r) {
    measurements.push_back(config.mode == ProbingMode::kAdaptive
                               ? adaptive_train_measure(scenario, r, config)
                               : fixed_train_measure(scenario, r, config));
    const DelaySampleSet& set = measurements.back();
    return config.mode == ProbingMode::kAdaptive
               ? set.outcome == MeasureOutcome::kStationary
               : set.feasible_share > 0.5;
  };
  RateSelection selection = select_rates(config, passes);

  double eps_rate = config.eps_total
                        ? *config.eps_total / static_cast<double>(measurements.size())
                        : config.eps_w;
  std::map<double, double> percentile_by_rate;
  std::vector<PercentileEstimate> percentiles;
  percentiles.reserve(measurements.size());
  for (const DelaySampleSet& set : measurements) {
    CounterRng rng =
        CounterRng(mix64(scenario.seed, kStreamBootstrap)).derive(rate_bits(set.rate));
    PercentileEstimate pe = estimate_delay_percentile(set, eps_rate, config, rng);
    percentiles.push_back(pe);
    percentile_by_rate[set.rate] = pe.value;
  }

  ServiceCurveEstimate curve = f_transform(percentile_by_rate, eps_rate);
  if (config.mode == ProbingMode::kFixedShort)
    curve = ServiceCurveEstimate(curve.segments(), curve.epsilon_total(),
                                 config.fixed_train_length - 1);
  return EstimationReport{std::move(curve), std::move(selection), std::move(measurements),
                          std::move(percentiles), eps_rate};
}

LimitingRateEstimate estimate_limiting_rate(const NetworkScenario& scenario,
                                            const ProbingConfig& config) {
  config.validate();
  scenario.validate();
  if (config.iterations % 2 == 0)
    throw std::invalid_argument("estimate_limiting_rate: iterations must be odd");

  std::vector<DelaySampleSet> measurements;
  auto passes = [&](double r) {
    measurements.push_back(fixed_train_measure(scenario, r, config));
    return measurements.back().feasible_share > 0.5;
  };
  RateSelection selection = select_rates(config, passes);
  LimitingRateEstimate out;
  out.rate = 0.5 * (selection.bracket_lo + selection.bracket_hi);
  out.bracket_lo = selection.bracket_lo;
  out.bracket_hi = selection.bracket_hi;
  out.probed = std::move(selection.probed);
  out.measurements = std::move(measurements);
  return out;
}

}  // namespace bwprobe
