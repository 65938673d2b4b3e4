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

#include "bwprobe/curve.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace bwprobe {

namespace {

// Upper envelope of lines y = k*x + b over x in [0, inf), returned as knots
// (x, y, slope_after) with strictly increasing slopes.  Used both for the
// Legendre transform (max of rate lines) and, negated, for the concave lower
// envelope in the self-inverse check.
struct Line {
  double k;  // slope
  double b;  // intercept
};

std::vector<MinPlusCurve::Knot> upper_envelope(std::vector<Line> lines) {
  if (lines.empty()) throw std::invalid_argument("upper_envelope: no lines");
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return a.k < b.k || (a.k == b.k && a.b < b.b);
  });
  // Same slope: only the highest intercept can matter.
  std::vector<Line> uniq;
  for (const Line& l : lines) {
    if (!uniq.empty() && uniq.back().k == l.k)
      uniq.back().b = l.b;  // sorted, so l.b >= current
    else
      uniq.push_back(l);
  }

  // Hull of (line, start_x) pairs; start_x is where the line takes the lead.
  std::vector<Line> hull;
  std::vector<double> start;
  for (const Line& l : uniq) {
    double x = -kInf;
    while (!hull.empty()) {
      const Line& top = hull.back();
      x = (top.b - l.b) / (l.k - top.k);  // l overtakes top here
      if (x > start.back()) break;
      hull.pop_back();
      start.pop_back();
    }
    if (hull.empty()) x = -kInf;
    hull.push_back(l);
    start.push_back(x);
  }
  // Restrict to [0, inf): the last line whose lead starts at or before 0
  // owns the origin.
  std::size_t first = 0;
  for (std::size_t i = 1; i < hull.size(); ++i)
    if (start[i] <= 0.0) first = i;

  std::vector<MinPlusCurve::Knot> knots;
  for (std::size_t i = first; i < hull.size(); ++i) {
    double x = (i == first) ? 0.0 : start[i];
    knots.push_back({x, hull[i].k * x + hull[i].b, hull[i].k});
  }
  return knots;
}

double envelope_value(const std::vector<MinPlusCurve::Knot>& knots, double x) {
  auto it = std::upper_bound(
      knots.begin(), knots.end(), x,
      [](double t, const MinPlusCurve::Knot& k) { return t < k.t; });
  const MinPlusCurve::Knot& k = *std::prev(it);
  if (x == k.t) return k.value;
  return k.value + k.slope_after * (x - k.t);
}

}  // namespace

// ---------------------------------------------------------------------------
// TimestampSeries

std::vector<double> TimestampSeries::delays() const {
  std::vector<double> w(arrivals.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = departures[n] - arrivals[n];
  return w;
}

std::size_t TimestampSeries::loss_count() const {
  std::size_t c = 0;
  for (double d : departures)
    if (!is_finite(d)) ++c;
  return c;
}

double TimestampSeries::loss_ratio() const {
  if (departures.empty()) return 0.0;
  return static_cast<double>(loss_count()) / static_cast<double>(departures.size());
}

void TimestampSeries::validate() const {
  if (arrivals.size() != departures.size())
    throw std::invalid_argument("timestamp series: size mismatch");
  for (std::size_t n = 0; n < arrivals.size(); ++n) {
    if (!is_finite(arrivals[n]))
      throw std::invalid_argument("timestamp series: non-finite arrival");
    if (n > 0 && arrivals[n] < arrivals[n - 1])
      throw std::invalid_argument("timestamp series: arrivals not sorted");
    if (departures[n] < arrivals[n])
      throw std::invalid_argument("timestamp series: departure before arrival");
  }
}

// ---------------------------------------------------------------------------
// ServiceCurveEstimate

ServiceCurveEstimate::ServiceCurveEstimate(std::vector<Segment> segments,
                                           double epsilon_total,
                                           std::optional<std::int64_t> domain_limit)
    : segments_(std::move(segments)),
      epsilon_total_(epsilon_total),
      domain_limit_(domain_limit) {
  if (segments_.empty())
    throw EmptyEstimateError("service curve estimate without segments");
  for (const Segment& s : segments_) {
    if (!(s.rate > 0.0) || !is_finite(s.rate))
      throw std::invalid_argument("segment rate must be positive and finite");
    if (!(s.intercept_s >= 0.0) || !is_finite(s.intercept_s))
      throw std::invalid_argument("segment intercept must be finite and >= 0");
  }
  if (!(epsilon_total_ >= 0.0) || epsilon_total_ > 1.0)
    throw std::invalid_argument("epsilon_total out of range");
  std::sort(segments_.begin(), segments_.end(),
            [](const Segment& a, const Segment& b) { return a.rate < b.rate; });
}

double ServiceCurveEstimate::evaluate(double n) const {
  if (!(n >= 0.0)) throw std::invalid_argument("evaluate: n must be >= 0");
  double best = kInf;
  for (const Segment& s : segments_)
    best = std::min(best, n / s.rate + s.intercept_s);
  return best;
}

double ServiceCurveEstimate::limiting_rate() const {
  return segments_.back().rate;
}

ServiceCurveEstimate f_transform(const std::map<double, double>& delay_percentile_s,
                                 double eps_per_rate) {
  if (delay_percentile_s.empty())
    throw std::invalid_argument("f_transform: no probed rates");
  if (!(eps_per_rate >= 0.0) || !(eps_per_rate <= 1.0))
    throw std::invalid_argument("f_transform: eps_per_rate out of range");
  std::vector<Segment> segs;
  for (const auto& [rate, w] : delay_percentile_s) {
    if (!(rate > 0.0)) throw std::invalid_argument("f_transform: rate <= 0");
    if (!is_finite(w)) continue;  // infinite percentiles contribute no segment
    if (w < 0.0) throw std::invalid_argument("f_transform: negative percentile");
    segs.push_back({rate, w});
  }
  if (segs.empty())
    throw EmptyEstimateError("f_transform: every probed rate had an infinite percentile");
  double eps_total = static_cast<double>(delay_percentile_s.size()) * eps_per_rate;
  return ServiceCurveEstimate(std::move(segs), std::min(eps_total, 1.0));
}

std::string ServiceCurveEstimate::to_json() const {
  nlohmann::json j;
  j["segments"] = nlohmann::json::array();
  for (const Segment& s : segments_)
    j["segments"].push_back({{"rate", s.rate}, {"intercept_s", s.intercept_s}});
  j["epsilon"] = epsilon_total_;
  if (domain_limit_)
    j["domain_limit"] = *domain_limit_;
  else
    j["domain_limit"] = nullptr;
  return j.dump(2);
}

ServiceCurveEstimate ServiceCurveEstimate::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<Segment> segs;
  for (const auto& js : j.at("segments"))
    segs.push_back({js.at("rate").get<double>(), js.at("intercept_s").get<double>()});
  std::optional<std::int64_t> dom;
  if (j.contains("domain_limit") && !j.at("domain_limit").is_null())
    dom = j.at("domain_limit").get<std::int64_t>();
  return ServiceCurveEstimate(std::move(segs), j.at("epsilon").get<double>(), dom);
}

void ServiceCurveEstimate::write_csv(std::ostream& out, std::int64_t n_max) const {
  if (domain_limit_) n_max = std::min(n_max, *domain_limit_);
  out << "n,time_s\n";
  for (std::int64_t n = 0; n <= n_max; ++n)
    out << n << "," << evaluate(static_cast<double>(n)) << "\n";
}

// ---------------------------------------------------------------------------
// MinPlusCurve

MinPlusCurve::MinPlusCurve(std::vector<Knot> knots, double epsilon_total)
    : knots_(std::move(knots)), epsilon_total_(epsilon_total) {
  if (knots_.empty()) throw std::invalid_argument("min-plus curve: no knots");
  if (knots_.front().t != 0.0)
    throw std::invalid_argument("min-plus curve: first knot must sit at t = 0");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (knots_[i].slope_after < 0.0)
      throw std::invalid_argument("min-plus curve: negative slope");
    if (i > 0) {
      if (knots_[i].t <= knots_[i - 1].t)
        throw std::invalid_argument("min-plus curve: knots not increasing");
      if (knots_[i].slope_after <= knots_[i - 1].slope_after)
        throw std::invalid_argument("min-plus curve: not convex");
    }
  }
}

double MinPlusCurve::evaluate(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("evaluate: t must be >= 0");
  double v = envelope_value(knots_, t);
  return std::max(v, 0.0);
}

std::int64_t MinPlusCurve::floor_evaluate(double t) const {
  double v = evaluate(t);
  if (!is_finite(v))
    throw DomainExceededError("floor_evaluate: curve is vertical at this t");
  return static_cast<std::int64_t>(std::floor(v));
}

MinPlusCurve MinPlusCurve::identity() {
  return MinPlusCurve({{0.0, 0.0, kInf}}, 0.0);
}

std::string MinPlusCurve::to_json() const {
  nlohmann::json j;
  j["knots"] = nlohmann::json::array();
  for (const Knot& k : knots_)
    j["knots"].push_back(
        {{"t_s", k.t}, {"packets", k.value}, {"slope_after", k.slope_after}});
  j["epsilon"] = epsilon_total_;
  return j.dump(2);
}

void MinPlusCurve::write_csv(std::ostream& out, const std::vector<double>& t_grid) const {
  out << "t_s,packets\n";
  for (double t : t_grid) out << t << "," << evaluate(t) << "\n";
}

MinPlusCurve legendre_transform(const std::map<double, double>& backlog_packets,
                                double epsilon_total) {
  std::vector<Line> lines;
  lines.push_back({0.0, 0.0});  // clamp at zero
  for (const auto& [rate, backlog] : backlog_packets) {
    if (!(rate > 0.0)) throw std::invalid_argument("legendre_transform: rate <= 0");
    if (!is_finite(backlog)) continue;
    if (backlog < 0.0)
      throw std::invalid_argument("legendre_transform: negative backlog");
    lines.push_back({rate, -backlog});
  }
  return MinPlusCurve(upper_envelope(std::move(lines)), epsilon_total);
}

MinPlusCurve minplus_convolve(const MinPlusCurve& a, const MinPlusCurve& b) {
  double tail = std::min(a.limiting_slope(), b.limiting_slope());

  struct Piece {
    double slope;
    double len;
  };
  std::vector<Piece> pieces;
  auto collect = [&](const MinPlusCurve& c) {
    const auto& ks = c.knots();
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
      double slope = ks[i].slope_after;
      double len = ks[i + 1].t - ks[i].t;
      // Pieces at least as steep as the joint tail are never reached: the
      // other curve keeps absorbing growth at the cheaper tail slope.
      if (slope < tail && len > 0.0) pieces.push_back({slope, len});
    }
  };
  collect(a);
  collect(b);
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& x, const Piece& y) { return x.slope < y.slope; });

  std::vector<MinPlusCurve::Knot> knots;
  double t = 0.0;
  double v = a.evaluate(0.0) + b.evaluate(0.0);
  for (const Piece& p : pieces) {
    if (!knots.empty() && knots.back().slope_after == p.slope) {
      t += p.len;
      v += p.slope * p.len;
      continue;
    }
    knots.push_back({t, v, p.slope});
    t += p.len;
    v += p.slope * p.len;
  }
  if (knots.empty() || knots.back().slope_after != tail)
    knots.push_back({t, v, tail});
  return MinPlusCurve(std::move(knots), a.epsilon_total() + b.epsilon_total());
}

bool legendre_self_inverse_check(const std::vector<std::pair<double, double>>& samples) {
  if (samples.empty())
    throw std::invalid_argument("legendre_self_inverse_check: no samples");
  std::vector<std::pair<double, double>> pts(samples.begin(), samples.end());
  for (const auto& [s, v] : pts)
    if (!is_finite(s) || !is_finite(v) || s < 0.0)
      throw std::invalid_argument("legendre_self_inverse_check: bad sample");
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first == pts[i - 1].first)
      throw std::invalid_argument("legendre_self_inverse_check: duplicate abscissa");
  if (pts.size() <= 2) return true;  // two points always sit on their own chord hull

  // First transform: g(n) = min_i (s_i * n - V_i) over all real n, the lower
  // envelope of one line per sample.  Walk slopes in decreasing order (the
  // steepest line leads as n -> -inf) and keep the lines that appear, with
  // the abscissa where each takes over.
  struct Ln {
    double k, b;  // k * n + b
  };
  std::vector<Ln> lines;
  lines.reserve(pts.size());
  for (const auto& [s, v] : pts) lines.push_back({s, -v});
  std::sort(lines.begin(), lines.end(), [](const Ln& a, const Ln& b) { return a.k > b.k; });
  std::vector<Ln> hull;
  std::vector<double> start;  // hull[i] leads on [start[i], start[i+1])
  for (const Ln& ln : lines) {
    double x = -kInf;
    while (!hull.empty()) {
      x = (ln.b - hull.back().b) / (hull.back().k - ln.k);  // crossing abscissa
      if (x > start.back()) break;
      hull.pop_back();
      start.pop_back();
    }
    hull.push_back(ln);
    start.push_back(hull.size() == 1 ? -kInf : x);
  }

  // Second transform: h(s) = inf over all real n of (s * n - g(n)).  The
  // objective is convex piecewise-linear with breakpoints at the envelope's
  // takeover abscissas; every sampled s lies inside the envelope's slope
  // range, so the infimum is finite and attained at a breakpoint.
  auto g = [&](std::size_t piece, double n) { return hull[piece].k * n + hull[piece].b; };
  for (const auto& [s, v] : pts) {
    double h = kInf;
    for (std::size_t i = 1; i < hull.size(); ++i)
      h = std::min(h, s * start[i] - g(i, start[i]));
    if (std::abs(h - v) > 1e-9 * std::max(1.0, std::abs(v))) return false;
  }
  return true;
}

std::int64_t pseudo_inverse(const ServiceCurveEstimate& curve, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("pseudo_inverse: t must be >= 0");
  // Conjugate candidate: n just below sup_r r*(t - w_r), then settle the
  // boundary with the defining inequality itself.
  double s = 0.0;
  for (const Segment& seg : curve.segments())
    s = std::max(s, seg.rate * (t - seg.intercept_s));
  std::int64_t n = s > 0.0 ? static_cast<std::int64_t>(std::floor(s)) : 0;
  auto served_by = [&](std::int64_t m) {
    return curve.evaluate(static_cast<double>(m) + 1.0) > t;
  };
  int guard = 0;
  while (!served_by(n)) {
    ++n;
    if (++guard > 1000)
      throw std::logic_error("pseudo_inverse: candidate failed to settle");
  }
  while (n > 0 && served_by(n - 1)) {
    --n;
    if (++guard > 1000)
      throw std::logic_error("pseudo_inverse: candidate failed to settle");
  }
  if (curve.domain_limit() && n > *curve.domain_limit())
    throw DomainExceededError("pseudo_inverse: t beyond the curve's horizon");
  return n;
}

// ---------------------------------------------------------------------------
// Sequence operations

std::vector<double> maxplus_convolve(const std::vector<double>& arrivals,
                                     const std::vector<double>& service) {
  if (arrivals.size() != service.size())
    throw std::invalid_argument("maxplus_convolve: length mismatch");
  std::size_t n = arrivals.size();
  std::vector<double> out(n, -kInf);
  for (std::size_t i = 0; i < n; ++i) {
    double best = -kInf;
    for (std::size_t v = 0; v <= i; ++v)
      best = std::max(best, arrivals[v] + service[i - v]);
    out[i] = best;
  }
  return out;
}

std::int64_t packetize(double x) {
  if (!(x >= 0.0) || !is_finite(x))
    throw std::invalid_argument("packetize: x must be finite and >= 0");
  return static_cast<std::int64_t>(std::floor(x));
}

// ---------------------------------------------------------------------------
// Bernoulli server bounds

std::int64_t nb_quantile(double p, double eps, std::int64_t successes) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("nb_quantile: p out of (0, 1]");
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::invalid_argument("nb_quantile: eps out of (0, 1)");
  if (successes < 1) throw std::invalid_argument("nb_quantile: successes < 1");
  if (p == 1.0) return successes;

  // P[#slots = m] = C(m-1, k-1) p^k q^(m-k); walk the cdf with the pmf
  // ratio pmf(m)/pmf(m-1) = q (m-1)/(m-k) carried in log space.
  const double k = static_cast<double>(successes);
  const double logq = std::log1p(-p);
  double log_pmf = k * std::log(p);
  double cdf = std::exp(log_pmf);
  const double target = 1.0 - eps;
  std::int64_t m = successes;
  const std::int64_t cap = successes + static_cast<std::int64_t>(1e9);
  while (cdf < target) {
    ++m;
    if (m > cap) throw std::runtime_error("nb_quantile: cdf failed to reach target");
    log_pmf += logq + std::log(static_cast<double>(m - 1)) -
               std::log(static_cast<double>(m - successes));
    cdf += std::exp(log_pmf);
  }
  return m;
}

OnOffBounds onoff_bounds(double p, double eps, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("onoff_bounds: n < 0");
  std::int64_t lower = nb_quantile(p, eps, n + 1);
  std::int64_t upper = nb_quantile(p, eps / static_cast<double>(n + 1), n + 1);
  return {lower, upper};
}

// ---------------------------------------------------------------------------
// BivariateService

BivariateService::BivariateService(std::int64_t size) : size_(size) {
  if (size <= 0) throw std::invalid_argument("bivariate service: size <= 0");
  table_.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
}

double BivariateService::operator()(std::int64_t v, std::int64_t n) const {
  if (v < 0 || n >= size_ || v > n)
    throw std::invalid_argument("bivariate service: index out of range");
  return table_[static_cast<std::size_t>(v) * size_ + n];
}

void BivariateService::set(std::int64_t v, std::int64_t n, double seconds) {
  if (v < 0 || n >= size_ || v > n)
    throw std::invalid_argument("bivariate service: index out of range");
  table_[static_cast<std::size_t>(v) * size_ + n] = seconds;
}

std::vector<double> BivariateService::row(std::int64_t n) const {
  if (n < 0 || n >= size_)
    throw std::invalid_argument("bivariate service: row out of range");
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (std::int64_t k = 0; k <= n; ++k) out[k] = (*this)(n - k, n);
  return out;
}

}  // namespace bwprobe
