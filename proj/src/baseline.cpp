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

#include "bwprobe/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bwprobe/common.hpp"
#include "bwprobe/engine.hpp"
#include "bwprobe/parallel.hpp"

namespace bwprobe {

namespace {

// Standard normal quantile by bisection on erfc; plenty accurate for the
// confidence bands and free of extra dependencies.
double normal_quantile(double p) {
  auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void BaselineConfig::validate() const {
  if (!(max_rate > 0.0) || !is_finite(max_rate))
    throw std::invalid_argument("baseline config: max_rate must be positive and finite");
  if (!(rate_step > 0.0))
    throw std::invalid_argument("baseline config: rate_step must be positive");
  if (rate_step > max_rate)
    throw std::invalid_argument("baseline config: rate grid is empty (step > max_rate)");
  if (train_length < 1)
    throw std::invalid_argument("baseline config: train_length must be >= 1");
  if (iterations < 2)
    throw std::invalid_argument("baseline config: confidence bands need >= 2 iterations");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("baseline config: confidence must be in (0, 1)");
  if (jobs < 1) throw std::invalid_argument("baseline config: jobs must be >= 1");
}

double measure_bmax(const NetworkScenario& scenario, double rate,
                    std::int64_t train_length, std::uint64_t iteration) {
  if (!(rate > 0.0)) throw std::invalid_argument("measure_bmax: rate must be > 0");
  if (train_length < 1)
    throw std::invalid_argument("measure_bmax: train_length must be >= 1");

  ProbeSpec probe;
  probe.train_length = train_length;
  probe.rate_pps = rate;
  probe.start_time_s = draw_probe_start(scenario, rate, iteration);
  probe.iteration_id = iteration;
  TimestampSeries ts = run_probe(scenario, probe);
  if (ts.loss_count() > 0)
    throw std::runtime_error(
        "measure_bmax: train lost packets; the rate-scanning method does not "
        "account for packet losses");

  // Backlog at the n-th departure: fluid arrivals so far (at most the whole
  // train) minus the n+1 packets already served.
  double volume = static_cast<double>(train_length);
  double best = 0.0;
  for (std::size_t n = 0; n < ts.packet_count(); ++n) {
    double arrived =
        std::min(rate * (ts.departures[n] - probe.start_time_s), volume);
    best = std::max(best, arrived - static_cast<double>(n + 1));
  }
  return best;
}

BacklogScan scan_backlogs(const NetworkScenario& scenario, const BaselineConfig& config,
                          std::uint64_t iteration) {
  config.validate();
  scenario.validate();
  BacklogScan scan;
  scan.train_length = config.train_length;
  for (std::int64_t k = 1;; ++k) {
    double rate = static_cast<double>(k) * config.rate_step;
    if (rate > config.max_rate * (1.0 + 1e-12)) break;
    scan.rates.push_back(rate);
    scan.bmax.push_back(measure_bmax(scenario, rate, config.train_length, iteration));
  }
  return scan;
}

MinPlusCurve deterministic_curve(const BacklogScan& scan) {
  if (scan.rates.empty() || scan.rates.size() != scan.bmax.size())
    throw std::invalid_argument("deterministic_curve: empty or inconsistent scan");
  std::map<double, double> backlog;
  for (std::size_t i = 0; i < scan.rates.size(); ++i)
    backlog[scan.rates[i]] = scan.bmax[i];
  return legendre_transform(backlog);
}

BaselineReport run_baseline(const NetworkScenario& scenario, const BaselineConfig& config,
                            const std::vector<double>& t_grid) {
  config.validate();
  scenario.validate();
  if (t_grid.empty()) throw std::invalid_argument("run_baseline: empty time grid");
  for (double t : t_grid)
    if (!(t >= 0.0) || !is_finite(t))
      throw std::invalid_argument("run_baseline: grid instants must be finite and >= 0");

  BaselineReport report;
  report.t_grid = t_grid;
  report.curves.resize(static_cast<std::size_t>(config.iterations), MinPlusCurve::identity());
  parallel_for(config.iterations, config.jobs, [&](std::int64_t i) {
    report.curves[static_cast<std::size_t>(i)] = deterministic_curve(
        scan_backlogs(scenario, config, static_cast<std::uint64_t>(i)));
  });

  double z = normal_quantile(0.5 * (1.0 + config.confidence));
  auto count = static_cast<double>(config.iterations);
  for (double t : t_grid) {
    double sum = 0.0, sumsq = 0.0;
    for (const MinPlusCurve& c : report.curves) {
      double v = c.evaluate(t);
      sum += v;
      sumsq += v * v;
    }
    double mean = sum / count;
    double var = std::max(0.0, (sumsq - count * mean * mean) / (count - 1.0));
    double half = z * std::sqrt(var / count);
    report.mean.push_back(mean);
    report.ci_low.push_back(mean - half);
    report.ci_high.push_back(mean + half);
  }
  return report;
}

}  // namespace bwprobe
