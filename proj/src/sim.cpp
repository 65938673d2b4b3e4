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

#include "bwprobe/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bwprobe {

namespace {

constexpr std::int64_t kNever = -1;

std::int64_t to_ns(double seconds) { return std::llround(seconds * 1e9); }
// Division, not multiplication by 1e-9: one correctly rounded operation, so
// whole-second instants convert to exact integers and lattice-valued service
// times stay exactly comparable across runs.
double to_s(std::int64_t ns) { return static_cast<double>(ns) / 1e9; }

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Every train draws fresh randomness: the key folds in the probing rate, the
// train length, and the iteration, so repeating a measurement or doubling a
// train never replays old coins, while identical inputs replay exactly.
std::uint64_t probe_key(const NetworkScenario& scenario, const ProbeSpec& probe) {
  std::uint64_t rate_bits = 0;
  static_assert(sizeof(rate_bits) == sizeof(probe.rate_pps));
  std::memcpy(&rate_bits, &probe.rate_pps, sizeof(rate_bits));
  std::uint64_t key = mix64(scenario.seed, rate_bits);
  key = mix64(key, static_cast<std::uint64_t>(probe.train_length));
  return mix64(key, probe.iteration_id);
}

double censored_mean(BurstLaw law, double scale, double shape, double cap) {
  switch (law) {
    case BurstLaw::kExponential:
      return scale * (1.0 - std::exp(-cap / scale));
    case BurstLaw::kPareto: {
      if (scale >= cap) return cap;
      // integral of the survival function: s + s^a (s^(1-a) - cap^(1-a)) / (a-1)
      return scale * shape / (shape - 1.0) -
             std::pow(scale, shape) * std::pow(cap, 1.0 - shape) / (shape - 1.0);
    }
    case BurstLaw::kConstant:
      return std::min(scale, cap);
  }
  throw std::logic_error("censored_mean: unknown law");
}

double draw_burst_bytes(BurstLaw law, double scale, double shape, double cap,
                        const CounterRng& rng, std::uint64_t index) {
  double u = rng.uniform(index);
  double x = scale;
  if (law == BurstLaw::kExponential)
    x = -scale * std::log1p(-u);
  else if (law == BurstLaw::kPareto)
    x = scale * std::pow(1.0 - u, -1.0 / shape);
  return std::min(x, cap);
}

std::vector<std::int64_t> probe_arrivals_ns(const ProbeSpec& probe) {
  std::vector<std::int64_t> arr(static_cast<std::size_t>(probe.train_length));
  std::int64_t start = to_ns(probe.start_time_s);
  for (std::int64_t n = 0; n < probe.train_length; ++n)
    arr[static_cast<std::size_t>(n)] =
        start + std::llround(static_cast<double>(n) * 1e9 / probe.rate_pps);
  return arr;
}

void validate_probe(const ProbeSpec& probe) {
  if (probe.train_length < 1)
    throw std::invalid_argument("probe: train_length must be >= 1");
  if (!(probe.rate_pps > 0.0) || !is_finite(probe.rate_pps))
    throw std::invalid_argument("probe: rate must be positive and finite");
  if (!(probe.start_time_s >= 0.0))
    throw std::invalid_argument("probe: start_time must be >= 0");
}

// --------------------------------------------------------------------------
// Slotted Bernoulli server

std::vector<std::int64_t> run_onoff(const OnOffServer& server,
                                    const std::vector<std::int64_t>& arrivals_ns,
                                    std::int64_t packet_bytes, std::uint64_t key,
                                    std::vector<PacketTrace>* trace) {
  CounterRng coins = CounterRng(key).derive(kStreamSlots);
  std::int64_t slot_ns = to_ns(server.slot_s);
  std::vector<std::int64_t> depart(arrivals_ns.size(), kNever);
  std::int64_t k = 0;  // next slot whose trial is still unused
  for (std::size_t n = 0; n < arrivals_ns.size(); ++n) {
    k = std::max(k, ceil_div(arrivals_ns[n], slot_ns));
    while (!coins.bernoulli(static_cast<std::uint64_t>(k), server.p)) ++k;
    depart[n] = (k + 1) * slot_ns;
    if (trace)
      trace->push_back({static_cast<std::int64_t>(n), true, arrivals_ns[n], k * slot_ns,
                        depart[n], packet_bytes, false});
    ++k;  // the success is consumed
  }
  return depart;
}

// --------------------------------------------------------------------------
// Shared transmission link

struct QueuedPacket {
  std::int64_t arrival_ns;
  std::int64_t bytes;
  std::int64_t index;  // within its flow
};

class LinkSimulation {
 public:
  LinkSimulation(const NetworkScenario& scenario, const ScheduledLink& link,
                 const std::vector<std::int64_t>& arrivals_ns, std::uint64_t key,
                 std::vector<PacketTrace>* trace)
      : link_(link),
        packet_bytes_(scenario.packet_size_bytes),
        arrivals_(arrivals_ns),
        trace_(trace),
        burst_rng_(CounterRng(key).derive(kStreamBurstSizes)) {
    if (scenario.cross && scenario.cross->mean_rate_pps > 0.0) {
      cross_ = *scenario.cross;
      period_s_ = scenario.cross_burst_period_s();
      scale_ = solve_truncated_scale(cross_->law, cross_->mean_burst_bytes,
                                     cross_->pareto_shape, cross_->truncation_bytes);
    }
    depart_.assign(arrivals_.size(), kNever);
    dropped_.assign(arrivals_.size(), false);
  }

  void run() {
    std::int64_t free_t = 0;
    while (done_ < static_cast<std::int64_t>(arrivals_.size())) {
      ingest_until(free_t);
      if (probe_q_.empty() && cross_q_.empty()) {
        std::int64_t t_next = next_arrival_after();
        if (t_next == std::numeric_limits<std::int64_t>::max()) break;
        free_t = std::max(free_t, t_next);
        continue;
      }
      bool serve_cross = pick_cross();
      std::deque<QueuedPacket>& q = serve_cross ? cross_q_ : probe_q_;
      QueuedPacket pkt = q.front();
      q.pop_front();
      if (serve_cross && cross_q_.empty()) drr_flow_emptied(0);
      if (!serve_cross && probe_q_.empty()) drr_flow_emptied(1);
      std::int64_t dep = free_t + tx_ns(pkt.bytes);
      if (!serve_cross) {
        depart_[static_cast<std::size_t>(pkt.index)] = dep;
        ++done_;
      }
      if (trace_)
        trace_->push_back(
            {pkt.index, !serve_cross, pkt.arrival_ns, free_t, dep, pkt.bytes, false});
      free_t = dep;
    }
  }

  const std::vector<std::int64_t>& departures() const { return depart_; }

 private:
  std::int64_t tx_ns(std::int64_t bytes) const {
    return std::llround(static_cast<double>(bytes) * 1e9 /
                        (link_.capacity_pps * static_cast<double>(packet_bytes_)));
  }

  std::int64_t next_cross_arrival() const {
    if (!cross_) return std::numeric_limits<std::int64_t>::max();
    if (!cross_pending_.empty()) return cross_pending_.front().arrival_ns;
    return std::llround(static_cast<double>(next_burst_) * period_s_ * 1e9);
  }

  std::int64_t next_arrival_after() const {
    std::int64_t t = std::numeric_limits<std::int64_t>::max();
    if (next_probe_ < arrivals_.size()) t = arrivals_[next_probe_];
    return std::min(t, next_cross_arrival());
  }

  void generate_cross_until(std::int64_t t_ns) {
    while (cross_) {
      std::int64_t t_b = std::llround(static_cast<double>(next_burst_) * period_s_ * 1e9);
      if (t_b > t_ns) break;
      auto bytes = std::max<std::int64_t>(
          1, std::llround(draw_burst_bytes(cross_->law, scale_, cross_->pareto_shape,
                                           cross_->truncation_bytes, burst_rng_,
                                           next_burst_)));
      for (std::int64_t frag : fragment_burst(bytes, cross_->fragment_bytes))
        cross_pending_.push_back({t_b, frag, cross_index_++});
      ++next_burst_;
    }
  }

  // Moves every arrival up to t into its queue, dropping when the shared
  // buffer (which excludes the packet in service) is full.  Arrivals are
  // processed in time order; the cross flow wins ties.
  void ingest_until(std::int64_t t_ns) {
    generate_cross_until(t_ns);
    while (true) {
      bool cross_ready = !cross_pending_.empty() && cross_pending_.front().arrival_ns <= t_ns;
      bool probe_ready = next_probe_ < arrivals_.size() && arrivals_[next_probe_] <= t_ns;
      if (!cross_ready && !probe_ready) break;
      bool take_cross =
          cross_ready &&
          (!probe_ready || cross_pending_.front().arrival_ns <= arrivals_[next_probe_]);
      auto occupancy =
          static_cast<std::int64_t>(probe_q_.size() + cross_q_.size());
      if (take_cross) {
        QueuedPacket pkt = cross_pending_.front();
        cross_pending_.pop_front();
        if (occupancy < link_.buffer_packets) {
          cross_q_.push_back(pkt);
        } else if (trace_) {
          trace_->push_back({pkt.index, false, pkt.arrival_ns, kNever, kNever, pkt.bytes, true});
        }
      } else {
        QueuedPacket pkt{arrivals_[next_probe_], packet_bytes_,
                         static_cast<std::int64_t>(next_probe_)};
        ++next_probe_;
        if (occupancy < link_.buffer_packets) {
          probe_q_.push_back(pkt);
        } else {
          dropped_[static_cast<std::size_t>(pkt.index)] = true;
          ++done_;
          if (trace_)
            trace_->push_back({pkt.index, true, pkt.arrival_ns, kNever, kNever, pkt.bytes, true});
        }
      }
    }
  }

  // true → serve the cross queue.  At least one queue is non-empty.
  bool pick_cross() {
    switch (link_.scheduler) {
      case Scheduler::kFifo:
        if (cross_q_.empty()) return false;
        if (probe_q_.empty()) return true;
        return cross_q_.front().arrival_ns <= probe_q_.front().arrival_ns;
      case Scheduler::kPriorityCrossHigh:
        return !cross_q_.empty();
      case Scheduler::kFair:
        return drr_pick();
    }
    throw std::logic_error("pick_cross: unknown scheduler");
  }

  // Deficit round robin between flow 0 (cross) and flow 1 (probe), quantum
  // one full-size packet.  Flows found empty at their turn forfeit their
  // deficit, per the classic algorithm.
  bool drr_pick() {
    auto queue_of = [&](int f) -> std::deque<QueuedPacket>& {
      return f == 0 ? cross_q_ : probe_q_;
    };
    double quantum = static_cast<double>(packet_bytes_);
    for (int guard = 0; guard < 1 << 20; ++guard) {
      if (drr_current_ == -1) {
        for (int i = 0; i < 2; ++i) {
          int f = (drr_next_ + i) % 2;
          if (queue_of(f).empty()) {
            drr_deficit_[f] = 0.0;
            continue;
          }
          drr_current_ = f;
          drr_next_ = (f + 1) % 2;
          drr_deficit_[f] += quantum;
          break;
        }
      }
      std::deque<QueuedPacket>& q = queue_of(drr_current_);
      if (drr_deficit_[drr_current_] >= static_cast<double>(q.front().bytes)) {
        drr_deficit_[drr_current_] -= static_cast<double>(q.front().bytes);
        return drr_current_ == 0;
      }
      drr_current_ = -1;  // deficit kept, turn passes on
    }
    throw std::logic_error("drr_pick: no progress");
  }

  // Called after the served queue emptied: the flow leaves the round.
  void drr_flow_emptied(int flow) {
    if (link_.scheduler != Scheduler::kFair) return;
    drr_deficit_[flow] = 0.0;
    if (drr_current_ == flow) drr_current_ = -1;
  }

  const ScheduledLink& link_;
  std::int64_t packet_bytes_;
  const std::vector<std::int64_t>& arrivals_;
  std::vector<PacketTrace>* trace_;
  CounterRng burst_rng_;

  std::optional<CrossTraffic> cross_;
  double period_s_ = 0.0;
  double scale_ = 0.0;
  std::uint64_t next_burst_ = 0;
  std::int64_t cross_index_ = 0;
  std::deque<QueuedPacket> cross_pending_;

  std::deque<QueuedPacket> probe_q_;
  std::deque<QueuedPacket> cross_q_;
  std::size_t next_probe_ = 0;
  std::int64_t done_ = 0;
  std::vector<std::int64_t> depart_;
  std::vector<bool> dropped_;

  int drr_current_ = -1;
  int drr_next_ = 0;
  double drr_deficit_[2] = {0.0, 0.0};
};

}  // namespace

// --------------------------------------------------------------------------
// NetworkScenario

void NetworkScenario::validate() const {
  if (packet_size_bytes < 1)
    throw std::invalid_argument("scenario: packet_size_bytes must be >= 1");
  if (!(propagation_delay_s >= 0.0))
    throw std::invalid_argument("scenario: propagation delay must be >= 0");
  if (!(warmup_intervals >= 0.0))
    throw std::invalid_argument("scenario: warmup_intervals must be >= 0");

  if (const auto* onoff = std::get_if<OnOffServer>(&server)) {
    if (!(onoff->p > 0.0 && onoff->p <= 1.0))
      throw std::invalid_argument("scenario: On-Off p must be in (0, 1]");
    if (!(onoff->slot_s > 0.0))
      throw std::invalid_argument("scenario: slot duration must be > 0");
    if (cross && cross->mean_rate_pps > 0.0)
      throw std::invalid_argument("scenario: cross traffic requires a scheduled link");
  } else if (const auto* cr = std::get_if<ConstantRateServer>(&server)) {
    if (!(cr->rate_pps > 0.0))
      throw std::invalid_argument("scenario: constant rate must be > 0");
    if (cross && cross->mean_rate_pps > 0.0)
      throw std::invalid_argument("scenario: cross traffic requires a scheduled link");
  } else {
    const auto& link = std::get<ScheduledLink>(server);
    if (!(link.capacity_pps > 0.0))
      throw std::invalid_argument("scenario: link capacity must be > 0");
    if (link.buffer_packets < 1)
      throw std::invalid_argument("scenario: buffer must hold at least one packet");
    if (cross && cross->mean_rate_pps > 0.0) {
      if (cross->mean_rate_pps > link.capacity_pps)
        throw std::invalid_argument("scenario: cross traffic exceeds link capacity");
      if (!(cross->mean_burst_bytes > 0.0))
        throw std::invalid_argument("scenario: mean burst size must be > 0");
      if (cross->fragment_bytes < 1)
        throw std::invalid_argument("scenario: fragment size must be >= 1");
      if (cross->law == BurstLaw::kPareto && !(cross->pareto_shape > 1.0))
        throw std::invalid_argument("scenario: Pareto shape must be > 1");
    }
  }
}

double NetworkScenario::ground_truth_abw() const {
  if (const auto* onoff = std::get_if<OnOffServer>(&server))
    return onoff->p / onoff->slot_s;
  if (const auto* cr = std::get_if<ConstantRateServer>(&server)) return cr->rate_pps;
  const auto& link = std::get<ScheduledLink>(server);
  double lambda = cross ? cross->mean_rate_pps : 0.0;
  return link.capacity_pps - lambda;
}

double NetworkScenario::cross_burst_period_s() const {
  if (!cross || cross->mean_rate_pps <= 0.0) return 0.0;
  return cross->mean_burst_bytes /
         (cross->mean_rate_pps * static_cast<double>(packet_size_bytes));
}

namespace {

std::string scheduler_name(Scheduler s) {
  switch (s) {
    case Scheduler::kFifo:
      return "fifo";
    case Scheduler::kPriorityCrossHigh:
      return "priority";
    case Scheduler::kFair:
      return "fair";
  }
  throw std::logic_error("scheduler_name: unknown scheduler");
}

Scheduler scheduler_from(const std::string& name) {
  if (name == "fifo") return Scheduler::kFifo;
  if (name == "priority") return Scheduler::kPriorityCrossHigh;
  if (name == "fair") return Scheduler::kFair;
  throw std::invalid_argument("unknown scheduler: " + name);
}

std::string law_name(BurstLaw l) {
  switch (l) {
    case BurstLaw::kExponential:
      return "exponential";
    case BurstLaw::kPareto:
      return "pareto";
    case BurstLaw::kConstant:
      return "constant";
  }
  throw std::logic_error("law_name: unknown law");
}

BurstLaw law_from(const std::string& name) {
  if (name == "exponential") return BurstLaw::kExponential;
  if (name == "pareto") return BurstLaw::kPareto;
  if (name == "constant") return BurstLaw::kConstant;
  throw std::invalid_argument("unknown burst law: " + name);
}

}  // namespace

nlohmann::json NetworkScenario::to_json() const {
  nlohmann::json j;
  if (const auto* onoff = std::get_if<OnOffServer>(&server)) {
    j["server"] = {{"model", "bernoulli_onoff"}, {"p", onoff->p}, {"slot_s", onoff->slot_s}};
  } else if (const auto* cr = std::get_if<ConstantRateServer>(&server)) {
    j["server"] = {{"model", "constant_rate"}, {"rate_pps", cr->rate_pps}};
  } else {
    const auto& link = std::get<ScheduledLink>(server);
    j["server"] = {{"model", "scheduled_link"},
                   {"capacity_pps", link.capacity_pps},
                   {"scheduler", scheduler_name(link.scheduler)},
                   {"buffer_packets", link.buffer_packets}};
  }
  if (cross) {
    j["cross_traffic"] = {{"law", law_name(cross->law)},
                          {"mean_rate_pps", cross->mean_rate_pps},
                          {"mean_burst_bytes", cross->mean_burst_bytes},
                          {"pareto_shape", cross->pareto_shape},
                          {"truncation_bytes", cross->truncation_bytes},
                          {"fragment_bytes", cross->fragment_bytes}};
  } else {
    j["cross_traffic"] = nullptr;
  }
  j["packet_size_bytes"] = packet_size_bytes;
  j["propagation_delay_s"] = propagation_delay_s;
  j["warmup_intervals"] = warmup_intervals;
  j["seed"] = seed;
  return j;
}

NetworkScenario NetworkScenario::from_json(const nlohmann::json& j) {
  NetworkScenario sc;
  const auto& srv = j.at("server");
  std::string model = srv.at("model").get<std::string>();
  if (model == "bernoulli_onoff") {
    OnOffServer s;
    s.p = srv.at("p").get<double>();
    s.slot_s = srv.value("slot_s", 1.0);
    sc.server = s;
  } else if (model == "constant_rate") {
    ConstantRateServer s;
    s.rate_pps = srv.at("rate_pps").get<double>();
    sc.server = s;
  } else if (model == "scheduled_link") {
    ScheduledLink s;
    s.capacity_pps = srv.at("capacity_pps").get<double>();
    s.scheduler = scheduler_from(srv.value("scheduler", std::string("fifo")));
    s.buffer_packets = srv.value("buffer_packets", std::int64_t{1'000'000'000});
    sc.server = s;
  } else {
    throw std::invalid_argument("unknown server model: " + model);
  }
  if (j.contains("cross_traffic") && !j.at("cross_traffic").is_null()) {
    const auto& ct = j.at("cross_traffic");
    CrossTraffic c;
    c.law = law_from(ct.value("law", std::string("exponential")));
    c.mean_rate_pps = ct.at("mean_rate_pps").get<double>();
    c.mean_burst_bytes = ct.value("mean_burst_bytes", 1500.0);
    c.pareto_shape = ct.value("pareto_shape", 1.5);
    c.truncation_bytes = ct.value("truncation_bytes", 65536.0);
    c.fragment_bytes = ct.value("fragment_bytes", std::int64_t{1500});
    sc.cross = c;
  }
  sc.packet_size_bytes = j.value("packet_size_bytes", std::int64_t{1500});
  sc.propagation_delay_s = j.value("propagation_delay_s", 0.0);
  sc.warmup_intervals = j.value("warmup_intervals", 10.0);
  sc.seed = j.value("seed", std::uint64_t{1});
  sc.validate();
  return sc;
}

NetworkScenario NetworkScenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  return from_json(j);
}

// --------------------------------------------------------------------------
// Probing

TimestampSeries run_probe(const NetworkScenario& scenario, const ProbeSpec& probe,
                          std::vector<PacketTrace>* trace) {
  scenario.validate();
  validate_probe(probe);
  std::uint64_t key = probe_key(scenario, probe);
  std::vector<std::int64_t> arrivals = probe_arrivals_ns(probe);

  std::vector<std::int64_t> departures;
  if (const auto* onoff = std::get_if<OnOffServer>(&scenario.server)) {
    departures = run_onoff(*onoff, arrivals, scenario.packet_size_bytes, key, trace);
  } else {
    ScheduledLink link;
    if (const auto* cr = std::get_if<ConstantRateServer>(&scenario.server)) {
      link.capacity_pps = cr->rate_pps;
      link.scheduler = Scheduler::kFifo;
    } else {
      link = std::get<ScheduledLink>(scenario.server);
    }
    LinkSimulation sim(scenario, link, arrivals, key, trace);
    sim.run();
    departures = sim.departures();
  }

  TimestampSeries series;
  series.arrivals.reserve(arrivals.size());
  series.departures.reserve(arrivals.size());
  for (std::size_t n = 0; n < arrivals.size(); ++n) {
    series.arrivals.push_back(to_s(arrivals[n]));
    series.departures.push_back(departures[n] == kNever
                                    ? kInf
                                    : to_s(departures[n]) + scenario.propagation_delay_s);
  }
  series.validate();
  return series;
}

void write_trace_csv(std::ostream& os, const std::vector<PacketTrace>& trace) {
  os << "flow,index,arrival_s,start_s,depart_s,bytes,dropped\n";
  for (const PacketTrace& t : trace) {
    os << (t.is_probe ? "probe" : "cross") << ',' << t.index << ',' << to_s(t.arrival_ns)
       << ',';
    if (t.dropped)
      os << ",,";
    else
      os << to_s(t.start_ns) << ',' << to_s(t.depart_ns) << ',';
    os << t.bytes << ',' << (t.dropped ? 1 : 0) << '\n';
  }
}

// --------------------------------------------------------------------------
// Cross-traffic bursts

double solve_truncated_scale(BurstLaw law, double mean_bytes, double shape,
                             double truncation_bytes) {
  if (!(mean_bytes > 0.0)) throw std::invalid_argument("burst mean must be > 0");
  if (law == BurstLaw::kPareto && !(shape > 1.0))
    throw std::invalid_argument("Pareto shape must be > 1");
  if (law == BurstLaw::kConstant) {
    if (mean_bytes > truncation_bytes)
      throw std::invalid_argument("burst mean infeasible under truncation");
    return mean_bytes;
  }
  if (!(mean_bytes < truncation_bytes))
    throw std::invalid_argument("burst mean infeasible under truncation");

  // censored_mean is strictly increasing in the scale, so bisect.
  double lo = 0.0;
  double hi = law == BurstLaw::kPareto ? truncation_bytes : mean_bytes;
  while (censored_mean(law, hi, shape, truncation_bytes) < mean_bytes) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (censored_mean(law, mid, shape, truncation_bytes) < mean_bytes)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<std::int64_t> generate_cross_burst_sizes(BurstLaw law, double mean_bytes,
                                                     double shape,
                                                     double truncation_bytes,
                                                     std::int64_t count,
                                                     std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("burst count must be >= 0");
  double scale = solve_truncated_scale(law, mean_bytes, shape, truncation_bytes);
  CounterRng rng = CounterRng(seed).derive(kStreamBurstSizes);
  std::vector<std::int64_t> sizes;
  sizes.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i)
    sizes.push_back(std::max<std::int64_t>(
        1, std::llround(draw_burst_bytes(law, scale, shape, truncation_bytes, rng,
                                         static_cast<std::uint64_t>(i)))));
  return sizes;
}

std::vector<std::int64_t> fragment_burst(std::int64_t burst_bytes,
                                         std::int64_t fragment_bytes) {
  if (burst_bytes < 1) throw std::invalid_argument("burst must be >= 1 byte");
  if (fragment_bytes < 1) throw std::invalid_argument("fragment must be >= 1 byte");
  std::vector<std::int64_t> out(static_cast<std::size_t>(burst_bytes / fragment_bytes),
                                fragment_bytes);
  if (std::int64_t rem = burst_bytes % fragment_bytes; rem > 0) out.push_back(rem);
  return out;
}

// --------------------------------------------------------------------------
// Bivariate service instrumentation

BivariateService instrument_bivariate_service(const NetworkScenario& scenario,
                                              const ProbeSpec& probe) {
  scenario.validate();
  validate_probe(probe);
  const auto* onoff = std::get_if<OnOffServer>(&scenario.server);
  if (!onoff)
    throw std::invalid_argument(
        "instrument_bivariate_service: only the On-Off server is max-plus linear; "
        "FIFO aggregation is not");

  std::uint64_t key = probe_key(scenario, probe);
  CounterRng coins = CounterRng(key).derive(kStreamSlots);
  std::int64_t slot_ns = to_ns(onoff->slot_s);
  std::vector<std::int64_t> arrivals = probe_arrivals_ns(probe);
  auto N = static_cast<std::size_t>(probe.train_length);

  std::vector<std::int64_t> eligible(N);  // first usable slot per packet
  for (std::size_t v = 0; v < N; ++v) eligible[v] = ceil_div(arrivals[v], slot_ns);

  // Collect success slots from the earliest eligible slot until every (v, n)
  // pair can be indexed.
  std::vector<std::int64_t> successes;
  std::int64_t k = eligible.front();
  auto extend_until = [&](std::size_t needed) {
    while (successes.size() < needed) {
      if (coins.bernoulli(static_cast<std::uint64_t>(k), onoff->p)) successes.push_back(k);
      ++k;
    }
  };

  BivariateService table(N);
  for (std::size_t v = 0; v < N; ++v) {
    extend_until(N);  // at least N successes before searching
    auto it = std::lower_bound(successes.begin(), successes.end(), eligible[v]);
    auto first = static_cast<std::size_t>(it - successes.begin());
    extend_until(first + N - v);
    it = std::lower_bound(successes.begin(), successes.end(), eligible[v]);
    first = static_cast<std::size_t>(it - successes.begin());
    double arrival_s = to_s(arrivals[v]);
    for (std::size_t n = v; n < N; ++n) {
      std::int64_t end_ns = (successes[first + (n - v)] + 1) * slot_ns;
      table.set(static_cast<std::int64_t>(v), static_cast<std::int64_t>(n),
                to_s(end_ns) - arrival_s);
    }
  }
  return table;
}

}  // namespace bwprobe
