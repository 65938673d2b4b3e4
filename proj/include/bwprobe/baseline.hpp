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
// Deterministic rate-scanning estimation, kept as the comparison method for
// the stochastic estimator.  Constant-rate trains of fixed length are sent
// over an arithmetic rate grid; each rate's maximum backlog B_max(r) is read
// off the departure timestamps, and the Legendre transform of the backlog
// map, sup_r {r*t - B_max(r)}, is the estimated service curve.

#ifndef BWPROBE_BASELINE_HPP_
#define BWPROBE_BASELINE_HPP_

#include <cstdint>
#include <vector>

#include "bwprobe/curve.hpp"
#include "bwprobe/sim.hpp"

namespace bwprobe {

struct BaselineConfig {
  double max_rate = 0.0;   // top of the arithmetic rate grid (required)
  double rate_step = 8.0;  // grid increment, mirroring fixed-step scanning
  std::int64_t train_length = 800;
  std::int64_t iterations = 200;  // independent repetitions of the full scan
  double confidence = 0.95;       // normal-approximation band across iterations
  int jobs = 1;

  void validate() const;
};

// One full scan: the rate grid with the observed per-rate maximum backlog.
struct BacklogScan {
  std::vector<double> rates;  // ascending, rate_step, 2*rate_step, ...
  std::vector<double> bmax;   // packets, parallel to rates
  std::int64_t train_length = 0;
};

// Maximum backlog seen by one constant-rate train: the train's fluid arrival
// volume A(t) = rate * (t - start), clamped to the train size, is compared
// with the packet count departed at each departure instant; the largest
// shortfall is the backlog, floored at zero.  Lost packets make the backlog
// reconstruction meaningless and raise std::runtime_error (the rate-scanning
// approach does not account for packet losses).
double measure_bmax(const NetworkScenario& scenario, double rate,
                    std::int64_t train_length, std::uint64_t iteration = 0);

// measure_bmax over the config's whole rate grid.  `iteration` seeds the
// per-train randomness; scans with different iterations are independent.
BacklogScan scan_backlogs(const NetworkScenario& scenario, const BaselineConfig& config,
                          std::uint64_t iteration = 0);

// Legendre transform of the scan: sup_r {r*t - B_max(r)}, clamped at zero.
// Convex nondecreasing by construction.  Throws std::invalid_argument on an
// empty scan.
MinPlusCurve deterministic_curve(const BacklogScan& scan);

struct BaselineReport {
  std::vector<MinPlusCurve> curves;  // one per iteration
  std::vector<double> t_grid;
  // Per grid point, across iterations: sample mean and the normal-
  // approximation confidence band mean +- z * sd / sqrt(iterations).
  std::vector<double> mean;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
};

// Runs `iterations` independent scans and aggregates the resulting curves on
// the given time grid.  Iterations are independent and parallelized over
// config.jobs.
BaselineReport run_baseline(const NetworkScenario& scenario, const BaselineConfig& config,
                            const std::vector<double>& t_grid);

}  // namespace bwprobe

#endif  // BWPROBE_BASELINE_HPP_
