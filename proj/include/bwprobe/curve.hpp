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
// Max-plus / min-plus curve algebra.
//
// A service estimate lives in the max-plus world: T(n) is the time budget for
// the packet with index n (i.e. n+1 packets), and is the lower envelope of
// affine segments n/r + w, one per probed rate r with delay percentile w.
// Its min-plus twin S(t) counts packets served by time t and is the upper
// envelope of lines r*t - B(r).  Both envelopes are kept explicitly; the
// conjugacy between them is exposed through pseudo_inverse and
// legendre_transform and is exercised heavily by the tests.

#ifndef BWPROBE_CURVE_HPP_
#define BWPROBE_CURVE_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bwprobe/common.hpp"

namespace bwprobe {

// ---------------------------------------------------------------------------
// Probe timestamps

// Arrival/departure instants of one packet train, seconds.  A departure of
// +inf marks a packet that never left (dropped, or train cut off).
struct TimestampSeries {
  std::vector<double> arrivals;
  std::vector<double> departures;

  std::size_t packet_count() const { return arrivals.size(); }
  double delay(std::size_t n) const { return departures[n] - arrivals[n]; }
  std::vector<double> delays() const;
  std::size_t loss_count() const;
  double loss_ratio() const;

  // Throws std::invalid_argument unless sizes match, arrivals are finite and
  // nondecreasing, and every departure is >= its arrival.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Max-plus service estimate

struct Segment {
  double rate;         // packets per second, > 0
  double intercept_s;  // delay percentile at this rate, seconds, >= 0, finite
};

class ServiceCurveEstimate {
 public:
  ServiceCurveEstimate(std::vector<Segment> segments, double epsilon_total,
                       std::optional<std::int64_t> domain_limit = std::nullopt);

  // min over segments of n/r + w.  n may be fractional (grid checks); the
  // curve is concave and nondecreasing in n.
  double evaluate(double n) const;

  // Steepest probed rate; the long-run slope of the estimate is 1/limiting_rate.
  double limiting_rate() const;

  const std::vector<Segment>& segments() const { return segments_; }
  double epsilon_total() const { return epsilon_total_; }
  std::optional<std::int64_t> domain_limit() const { return domain_limit_; }

  std::string to_json() const;
  static ServiceCurveEstimate from_json(const std::string& text);
  // Rows "n,time_s" for n = 0..n_max (capped by domain_limit if tighter).
  void write_csv(std::ostream& out, std::int64_t n_max) const;

 private:
  std::vector<Segment> segments_;  // every intercept finite; dominated ones kept
  double epsilon_total_;
  std::optional<std::int64_t> domain_limit_;
};

// Builds the estimate out of per-rate delay percentiles.  Rates whose
// percentile is +inf do not yield a segment but still count toward the
// violation budget: epsilon_total = map_size * eps_per_rate.
// Throws EmptyEstimateError when no rate has a finite percentile.
ServiceCurveEstimate f_transform(const std::map<double, double>& delay_percentile_s,
                                 double eps_per_rate);

// ---------------------------------------------------------------------------
// Min-plus curve

// Convex nondecreasing piecewise-linear function of time, in packets.
// Knots are stored left to right; the last slope extends to infinity and may
// itself be +inf (the convolution identity: 0 at t=0, vertical afterwards).
class MinPlusCurve {
 public:
  struct Knot {
    double t;            // seconds, knots_.front().t == 0
    double value;        // packets
    double slope_after;  // packets per second, strictly increasing over knots
  };

  MinPlusCurve(std::vector<Knot> knots, double epsilon_total);

  double evaluate(double t) const;
  // Packetized view: floor(evaluate(t)) whole packets served by time t.
  std::int64_t floor_evaluate(double t) const;
  double limiting_slope() const { return knots_.back().slope_after; }

  const std::vector<Knot>& knots() const { return knots_; }
  double epsilon_total() const { return epsilon_total_; }

  static MinPlusCurve identity();  // neutral element of min-plus convolution

  std::string to_json() const;
  void write_csv(std::ostream& out, const std::vector<double>& t_grid) const;

 private:
  std::vector<Knot> knots_;
  double epsilon_total_;
};

// Upper envelope of {r*t - B(r)} clamped at zero: the Legendre-Fenchel
// conjugate of the backlog map.  Rates must be > 0 and backlogs >= 0;
// +inf backlogs are skipped (they would contribute nothing).
MinPlusCurve legendre_transform(const std::map<double, double>& backlog_packets,
                                double epsilon_total = 0.0);

// Min-plus (inf-)convolution of two convex curves: slope segments merge in
// ascending order, budgets add.  End-to-end service of tandem systems.
MinPlusCurve minplus_convolve(const MinPlusCurve& a, const MinPlusCurve& b);

// Double conjugation test: samples (s_i, V_i) of a concave function are
// reproduced exactly by transforming twice.  Returns false when the samples
// are not concave (the hull eats the bump).  Tolerance 1e-9 relative.
bool legendre_self_inverse_check(const std::vector<std::pair<double, double>>& samples);

// Smallest n >= 0 with curve.evaluate(n + 1) > t: how many packets a system
// honoring the estimate must have served by time t.  Throws
// DomainExceededError when that n would exceed the curve's domain_limit.
std::int64_t pseudo_inverse(const ServiceCurveEstimate& curve, double t);

// ---------------------------------------------------------------------------
// Sequence operations

// r[n] = max_{v in [0, n]} (arrivals[v] + service[n - v]); saturates on +inf.
std::vector<double> maxplus_convolve(const std::vector<double>& arrivals,
                                     const std::vector<double>& service);

// Packetizer: whole packets completed at level x >= 0.
std::int64_t packetize(double x);

// ---------------------------------------------------------------------------
// Slotted Bernoulli server bounds

// Smallest m with P[#slots for `successes` successes <= m] >= 1 - eps.
std::int64_t nb_quantile(double p, double eps, std::int64_t successes);

struct OnOffBounds {
  std::int64_t lower_slots;  // best possible time budget for index n
  std::int64_t upper_slots;  // budget certified by an eps/(n+1) union bound
};

// Analytic envelope for the Bernoulli(p) slotted server at violation eps:
// lower(n) uses the full eps for n+1 successes, upper(n) splits eps across
// the n+1 indices it must cover jointly.
OnOffBounds onoff_bounds(double p, double eps, std::int64_t n);

// ---------------------------------------------------------------------------
// Sampled bivariate service

// Upper-triangular table T(v, n), 0 <= v <= n < size: time the server spends
// on packets v..n.  Produced by simulator instrumentation for validation.
class BivariateService {
 public:
  explicit BivariateService(std::int64_t size);

  double operator()(std::int64_t v, std::int64_t n) const;
  void set(std::int64_t v, std::int64_t n, double seconds);
  std::int64_t size() const { return size_; }

  // Row T(., n) laid out as service[k] = T(n - k, n), k = 0..n, the order
  // maxplus_convolve consumes.
  std::vector<double> row(std::int64_t n) const;

 private:
  std::int64_t size_;
  std::vector<double> table_;
};

}  // namespace bwprobe

#endif  // BWPROBE_CURVE_HPP_
