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

#ifndef BWPROBE_SIM_HPP_
#define BWPROBE_SIM_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bwprobe/common.hpp"
#include "bwprobe/curve.hpp"
#include "json.hpp"

namespace bwprobe {

// A slotted server that forwards one head-of-line packet per slot with
// probability p.  A packet present at a slot's start boundary is eligible
// for that slot's trial; a successful trial completes at the slot's end.
struct OnOffServer {
  double p = 0.1;
  double slot_s = 1.0;
};

// A fluid-rate link with no randomness, as a degenerate reference.
struct ConstantRateServer {
  double rate_pps = 1000.0;
};

enum class Scheduler { kFifo, kPriorityCrossHigh, kFair };

// A transmission link of fixed capacity shared by the probe flow and an
// optional cross-traffic flow, with a finite shared buffer (the in-service
// packet does not occupy a buffer slot).
struct ScheduledLink {
  double capacity_pps = 1000.0;  // in packets of packet_size_bytes per second
  Scheduler scheduler = Scheduler::kFifo;
  std::int64_t buffer_packets = 1'000'000'000;
};

enum class BurstLaw { kExponential, kPareto, kConstant };

// Strictly periodic bursts whose sizes are drawn i.i.d. from a censored
// distribution (values above truncation_bytes are clamped); the scale is
// solved so the censored mean equals mean_burst_bytes.  Bursts fragment into
// packets of at most fragment_bytes that arrive back-to-back.
struct CrossTraffic {
  BurstLaw law = BurstLaw::kExponential;
  double mean_rate_pps = 0.0;  // average rate in packets of packet_size_bytes/s
  double mean_burst_bytes = 1500.0;
  double pareto_shape = 1.5;
  double truncation_bytes = 65536.0;
  std::int64_t fragment_bytes = 1500;
};

struct NetworkScenario {
  std::variant<OnOffServer, ConstantRateServer, ScheduledLink> server =
      ConstantRateServer{};
  std::optional<CrossTraffic> cross;
  std::int64_t packet_size_bytes = 1500;
  double propagation_delay_s = 0.0;
  double warmup_intervals = 10.0;  // cross-traffic burst periods before probing
  std::uint64_t seed = 1;

  void validate() const;

  // What a perfectly informed observer would call the available bandwidth:
  // capacity minus mean cross rate for links, p/slot for the On-Off server.
  double ground_truth_abw() const;

  // Interval between cross-traffic bursts; 0 when there is no cross flow.
  double cross_burst_period_s() const;

  nlohmann::json to_json() const;
  static NetworkScenario from_json(const nlohmann::json& j);
  static NetworkScenario load(const std::string& path);
};

// One constant-rate packet train: arrivals at start_time + n / rate.
struct ProbeSpec {
  std::int64_t train_length = 100;
  double rate_pps = 1.0;
  double start_time_s = 0.0;
  std::uint64_t iteration_id = 0;
};

// One packet's life, for property checks and CSV export.  Times are the
// simulator's integer nanoseconds; -1 marks "never" for dropped packets.
struct PacketTrace {
  std::int64_t index = 0;  // position within its own flow
  bool is_probe = false;
  std::int64_t arrival_ns = 0;
  std::int64_t start_ns = -1;
  std::int64_t depart_ns = -1;
  std::int64_t bytes = 0;
  bool dropped = false;
};

// Simulates the scenario under one probe train.  Departures include the
// propagation delay; dropped probe packets depart at +inf.  Identical
// (scenario, probe) inputs give bit-identical results; randomness is keyed
// on (seed, rate, train length, iteration) so every train is a fresh draw.
TimestampSeries run_probe(const NetworkScenario& scenario, const ProbeSpec& probe,
                          std::vector<PacketTrace>* trace = nullptr);

void write_trace_csv(std::ostream& os, const std::vector<PacketTrace>& trace);

// I.i.d. burst sizes in bytes, censored at truncation_bytes, with the scale
// solved so the censored mean equals mean_bytes.  Deterministic in seed.
std::vector<std::int64_t> generate_cross_burst_sizes(BurstLaw law, double mean_bytes,
                                                     double shape,
                                                     double truncation_bytes,
                                                     std::int64_t count,
                                                     std::uint64_t seed);

// Splits one burst into maximal fragments of at most fragment_bytes.
std::vector<std::int64_t> fragment_burst(std::int64_t burst_bytes,
                                         std::int64_t fragment_bytes);

// The scale parameter that makes the censored mean hit mean_bytes, found by
// bisection (closed form has no elementary inverse for the Pareto case).
double solve_truncated_scale(BurstLaw law, double mean_bytes, double shape,
                             double truncation_bytes);

// Samples the On-Off server's bivariate service process on the probe's slot
// sequence: entry (v, n) is the time to collect n-v+1 trial successes
// starting from the first slot packet v is eligible for, measured from v's
// arrival.  Max-plus convolution of the probe arrivals with this table
// reproduces run_probe's departures exactly (same coins).  Only the On-Off
// server is max-plus linear here; other servers raise invalid_argument.
BivariateService instrument_bivariate_service(const NetworkScenario& scenario,
                                              const ProbeSpec& probe);

}  // namespace bwprobe

#endif  // BWPROBE_SIM_HPP_
