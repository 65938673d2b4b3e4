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
// Command-line front end: loads a network scenario from JSON, runs the
// probing engine and/or the rate-scanning baseline on the built-in seeded
// simulator, and exports curves, per-rate delay samples, analytic bounds,
// and side-by-side comparisons together with a reproduction manifest.
//
// Exit codes: 0 on success, 1 when the estimation itself fails (e.g. no
// probed rate produced a finite percentile), 2 on usage and input errors
// (bad flags, missing or malformed scenario files).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bwprobe/baseline.hpp"
#include "bwprobe/common.hpp"
#include "bwprobe/curve.hpp"
#include "bwprobe/engine.hpp"
#include "bwprobe/sim.hpp"
#include "json.hpp"

#ifndef BWPROBE_VERSION
#define BWPROBE_VERSION "0.0.0"
#endif

using namespace bwprobe;

namespace {

namespace fs = std::filesystem;

// Input/usage problems exit with code 2, estimation failures with code 1.
struct CliError {
  int code;
  std::string message;
};

// ---------------------------------------------------------------------------
// Small formatting helpers

std::string fmt(double v, int precision = 12) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

// Compact token used in file names such as delays_rate_48.csv.
std::string rate_token(double rate) { return fmt(rate, 10); }

std::string iso_timestamp_utc() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join_command(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    std::string arg = argv[i];
    if (arg.find(' ') != std::string::npos) out += '"' + arg + '"';
    else out += arg;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rates: plain numbers are packets/second; an "Mbps" suffix converts using
// the scenario's declared packet size; an optional "pps" suffix is explicit.

double parse_rate(const std::string& text, double packet_size_bytes, const std::string& flag) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw CliError{2, flag + ": cannot parse rate '" + text + "'"};
  }
  std::string suffix = text.substr(pos);
  std::transform(suffix.begin(), suffix.end(), suffix.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (suffix == "mbps") {
    value = value * 1e6 / (8.0 * packet_size_bytes);
  } else if (!suffix.empty() && suffix != "pps") {
    throw CliError{2, flag + ": unknown rate unit '" + text.substr(pos) +
                          "' (use packets/second, a 'pps' suffix, or an 'Mbps' suffix)"};
  }
  if (!(value > 0.0) || !std::isfinite(value))
    throw CliError{2, flag + ": rate must be positive and finite, got '" + text + "'"};
  return value;
}

// ---------------------------------------------------------------------------
// Scenario loading with line/field diagnostics

NetworkScenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{2, "cannot open scenario file: " + path};
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw CliError{2, path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                          e.what()};
  }
  try {
    return NetworkScenario::from_json(j);
  } catch (const std::exception& e) {
    throw CliError{2, path + ": " + e.what()};
  }
}

// ---------------------------------------------------------------------------
// Output plumbing

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{2, "cannot create output directory " + dir.string() + ": " + ec.message()};
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{1, "cannot open " + path.string() + " for writing"};
  out << content;
  out.flush();
  if (!out) throw CliError{1, "write failed for " + path.string()};
}

nlohmann::json make_manifest(const std::string& command, const nlohmann::json& scenario_entry,
                             const nlohmann::json& config, const nlohmann::json& seed_set,
                             const std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["tool"] = "bwprobe";
  m["tool_version"] = BWPROBE_VERSION;
  m["command"] = command;
  m["wall_clock_utc"] = iso_timestamp_utc();
  m["scenario"] = scenario_entry;
  m["config"] = config;
  m["seed_set"] = seed_set;
  m["outputs"] = outputs;
  return m;
}

// ---------------------------------------------------------------------------
// Shared flag bundles

struct EstimateFlags {
  std::string scenario_path;
  std::string out = ".";
  double eps = 0.0;           // total violation budget; 0 count means "not set"
  double eps_w = 0.05;        // per-rate violation probability
  std::string racc = "1";     // rate resolution (pps or Mbps)
  std::int64_t iterations = 250;
  std::int64_t train = 0;     // 0 count means "use the config default"
  std::int64_t train_max = 1 << 16;
  std::string mode = "adaptive";
  std::uint64_t seed = 0;
  double confidence = 0.95;
  int jobs = 0;  // filled with available parallelism below

  CLI::Option* eps_opt = nullptr;
  CLI::Option* train_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

void add_estimate_flags(CLI::App* cmd, EstimateFlags* f) {
  cmd->add_option("--scenario", f->scenario_path, "network scenario JSON file")
      ->required();
  cmd->add_option("--out", f->out, "output directory (created if missing)")
      ->capture_default_str();
  f->eps_opt = cmd->add_option(
      "--eps", f->eps,
      "total violation probability of the estimate; split uniformly across "
      "probed rates (default: eps-w per rate)");
  cmd->add_option("--eps-w", f->eps_w, "per-rate violation probability")
      ->capture_default_str();
  cmd->add_option("--racc", f->racc,
                  "rate resolution: bracket width at which probing stops "
                  "(packets/second, or e.g. 0.6Mbps)")
      ->capture_default_str();
  cmd->add_option("--iterations", f->iterations, "probe trains per rate")
      ->capture_default_str();
  f->train_opt = cmd->add_option(
      "--train", f->train,
      "train length in packets: the fixed length in fixed-short mode, the "
      "starting length in adaptive mode");
  cmd->add_option("--train-max", f->train_max,
                  "adaptive mode: train doubling stops at this length")
      ->capture_default_str();
  cmd->add_option("--mode", f->mode, "probing mode")
      ->check(CLI::IsMember({"adaptive", "fixed-short"}))
      ->capture_default_str();
  f->seed_opt = cmd->add_option("--seed", f->seed, "override the scenario's seed");
  cmd->add_option("--confidence", f->confidence, "confidence level for percentile intervals")
      ->capture_default_str();
  cmd->add_option("--jobs", f->jobs, "concurrent probe trains (default: available parallelism)");
}

ProbingConfig make_probing_config(const EstimateFlags& f, const NetworkScenario& scenario) {
  ProbingConfig config;
  config.r_acc = parse_rate(f.racc, static_cast<double>(scenario.packet_size_bytes), "--racc");
  config.eps_w = f.eps_w;
  if (f.eps_opt->count()) config.eps_total = f.eps;
  config.confidence = f.confidence;
  config.iterations = f.iterations;
  config.train_max = f.train_max;
  if (f.mode == "fixed-short") {
    config.mode = ProbingMode::kFixedShort;
    if (f.train_opt->count()) config.fixed_train_length = f.train;
  } else {
    config.mode = ProbingMode::kAdaptive;
    if (f.train_opt->count()) config.train_min = f.train;
  }
  config.jobs = f.jobs;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError{2, e.what()};
  }
  return config;
}

std::string delays_csv(const DelaySampleSet& m) {
  std::ostringstream csv;
  csv << "# probing rate " << fmt(m.rate, 10) << " packets/second, train length "
      << m.train_length_used << " packets, outcome "
      << m.summary_json().at("outcome").get<std::string>() << "\n";
  csv << "# delay_s: last-packet one-way delay in seconds; inf marks a train "
         "without a steady-state sample\n";
  csv << "iteration,delay_s\n";
  for (std::size_t i = 0; i < m.samples.size(); ++i)
    csv << i << "," << fmt(m.samples[i]) << "\n";
  return csv.str();
}

// ---------------------------------------------------------------------------
// estimate

int run_estimate(const EstimateFlags& flags, const std::string& command) {
  NetworkScenario scenario = load_scenario(flags.scenario_path);
  if (flags.seed_opt->count()) scenario.seed = flags.seed;
  ProbingConfig config = make_probing_config(flags, scenario);

  EstimationReport report = estimate_service_curve(scenario, config);

  fs::path out = prepare_out_dir(flags.out);
  std::vector<std::string> outputs;
  write_file(out / "curve.json", report.curve.to_json() + "\n");
  outputs.push_back("curve.json");
  for (const DelaySampleSet& m : report.measurements) {
    std::string name = "delays_rate_" + rate_token(m.rate) + ".csv";
    write_file(out / name, delays_csv(m));
    outputs.push_back(name);
  }
  outputs.push_back("manifest.json");

  nlohmann::json scenario_entry = {{"path", flags.scenario_path},
                                   {"definition", scenario.to_json()}};
  nlohmann::json manifest =
      make_manifest(command, scenario_entry, config.to_json(),
                    {{"scenario_seed", scenario.seed}}, outputs);
  manifest["results"] = report.to_json();
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "probed " << report.selection.probed.size() << " rates; bracket ["
            << fmt(report.selection.bracket_lo, 10) << ", "
            << fmt(report.selection.bracket_hi, 10) << "] packets/second\n";
  std::cout << "curve: " << report.curve.segments().size() << " segments, epsilon "
            << fmt(report.curve.epsilon_total(), 10) << ", limiting rate "
            << fmt(report.curve.limiting_rate(), 10) << " packets/second, domain limit "
            << (report.curve.domain_limit() ? std::to_string(*report.curve.domain_limit())
                                            : std::string("none"))
            << "\n";
  std::cout << "wrote " << outputs.size() << " files to " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsFlags {
  double p = 0.0;
  double eps = 1e-3;
  std::int64_t n_max = 100;
  std::string out = ".";
};

int run_bounds(const BoundsFlags& flags, const std::string& command) {
  if (!(flags.p > 0.0 && flags.p <= 1.0)) throw CliError{2, "--p must lie in (0, 1]"};
  if (!(flags.eps > 0.0 && flags.eps < 1.0)) throw CliError{2, "--eps must lie in (0, 1)"};
  if (flags.n_max < 0) throw CliError{2, "--nmax must be >= 0"};

  std::ostringstream csv;
  csv << "# Bernoulli(p=" << fmt(flags.p, 10) << ") slotted server, violation probability eps="
      << fmt(flags.eps, 10) << "\n";
  csv << "# lower_slots: full-eps time budget for index n alone; upper_slots: "
         "eps/(n+1) union-bound budget covering indices 0..n jointly\n";
  csv << "n,lower_slots,upper_slots\n";
  for (std::int64_t n = 0; n <= flags.n_max; ++n) {
    OnOffBounds b = onoff_bounds(flags.p, flags.eps, n);
    csv << n << "," << b.lower_slots << "," << b.upper_slots << "\n";
  }

  fs::path out = prepare_out_dir(flags.out);
  write_file(out / "bounds.csv", csv.str());
  nlohmann::json config = {{"p", flags.p}, {"eps", flags.eps}, {"n_max", flags.n_max}};
  nlohmann::json manifest = make_manifest(command, nullptr, config, nlohmann::json::array(),
                                          {"bounds.csv", "manifest.json"});
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "wrote " << (out / "bounds.csv").string() << " (" << (flags.n_max + 1)
            << " rows, units: slots)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareFlags {
  EstimateFlags est;
  std::string max_rate;
  std::string rate_step = "8";
  std::int64_t baseline_train = 800;
  std::int64_t baseline_iterations = 200;
  double t_max = 1.0;
  std::int64_t points = 25;
};

// Rebuilds the service-curve estimate with per-rate percentiles swapped for
// one endpoint of their confidence intervals; nullopt when no rate keeps a
// finite value.
std::optional<ServiceCurveEstimate> curve_from_ci(
    const EstimationReport& report, double PercentileEstimate::*endpoint) {
  std::map<double, double> map;
  for (std::size_t i = 0; i < report.measurements.size(); ++i)
    map[report.measurements[i].rate] = report.percentiles[i].*endpoint;
  try {
    ServiceCurveEstimate curve = f_transform(map, report.eps_per_rate);
    if (report.curve.domain_limit())
      curve = ServiceCurveEstimate(curve.segments(), curve.epsilon_total(),
                                   report.curve.domain_limit());
    return curve;
  } catch (const EmptyEstimateError&) {
    return std::nullopt;
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int run_compare(const CompareFlags& flags, const std::string& command) {
  NetworkScenario scenario = load_scenario(flags.est.scenario_path);
  if (flags.est.seed_opt->count()) scenario.seed = flags.est.seed;
  ProbingConfig config = make_probing_config(flags.est, scenario);

  BaselineConfig baseline_config;
  double packet_size = static_cast<double>(scenario.packet_size_bytes);
  baseline_config.max_rate = parse_rate(flags.max_rate, packet_size, "--max-rate");
  baseline_config.rate_step = parse_rate(flags.rate_step, packet_size, "--rate-step");
  baseline_config.train_length = flags.baseline_train;
  baseline_config.iterations = flags.baseline_iterations;
  baseline_config.jobs = flags.est.jobs;
  try {
    baseline_config.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError{2, e.what()};
  }
  if (!(flags.t_max > 0.0) || !std::isfinite(flags.t_max))
    throw CliError{2, "--tmax must be positive and finite"};
  if (flags.points < 2) throw CliError{2, "--points must be >= 2"};

  std::vector<double> t_grid(flags.points);
  for (std::int64_t k = 0; k < flags.points; ++k)
    t_grid[k] = flags.t_max * static_cast<double>(k) / static_cast<double>(flags.points - 1);

  EstimationReport report = estimate_service_curve(scenario, config);
  BaselineReport baseline = run_baseline(scenario, baseline_config, t_grid);

  // Stochastic estimate on the shared min-plus time grid.
  std::vector<std::int64_t> stochastic(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    try {
      stochastic[k] = pseudo_inverse(report.curve, t_grid[k]);
    } catch (const DomainExceededError& e) {
      throw CliError{1, std::string(e.what()) +
                            " (the fixed-short domain ends before --tmax; lower --tmax or "
                            "raise --train)"};
    }
  }
  std::optional<ServiceCurveEstimate> curve_hi = curve_from_ci(report, &PercentileEstimate::ci_low);
  std::optional<ServiceCurveEstimate> curve_lo = curve_from_ci(report, &PercentileEstimate::ci_high);
  auto invert_or_nan = [](const std::optional<ServiceCurveEstimate>& c, double t) {
    if (!c) return std::numeric_limits<double>::quiet_NaN();
    try {
      return static_cast<double>(pseudo_inverse(*c, t));
    } catch (const DomainExceededError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::ostringstream csv;
  csv << "# stochastic estimate converted to min-plus via pseudo-inverse; "
         "baseline aggregated over " << baseline_config.iterations << " iterations\n";
  csv << "# units: t_s seconds, all other columns packets; empty cells mark "
         "unavailable confidence endpoints\n";
  csv << "t_s,stochastic_packets,stochastic_ci_low_packets,stochastic_ci_high_packets,"
         "baseline_mean_packets,baseline_ci_low_packets,baseline_ci_high_packets\n";
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    double lo = invert_or_nan(curve_lo, t_grid[k]);
    double hi = invert_or_nan(curve_hi, t_grid[k]);
    csv << fmt(t_grid[k]) << "," << stochastic[k] << ","
        << (std::isnan(lo) ? std::string() : fmt(lo)) << ","
        << (std::isnan(hi) ? std::string() : fmt(hi)) << "," << fmt(baseline.mean[k]) << ","
        << fmt(baseline.ci_low[k]) << "," << fmt(baseline.ci_high[k]) << "\n";
  }

  fs::path out = prepare_out_dir(flags.est.out);
  write_file(out / "compare.csv", csv.str());

  nlohmann::json baseline_json = {{"max_rate", baseline_config.max_rate},
                                  {"rate_step", baseline_config.rate_step},
                                  {"train_length", baseline_config.train_length},
                                  {"iterations", baseline_config.iterations},
                                  {"confidence", baseline_config.confidence}};
  nlohmann::json config_json = {{"probing", config.to_json()},
                                {"baseline", baseline_json},
                                {"t_max", flags.t_max},
                                {"points", flags.points}};
  nlohmann::json scenario_entry = {{"path", flags.est.scenario_path},
                                   {"definition", scenario.to_json()}};
  nlohmann::json manifest =
      make_manifest(command, scenario_entry, config_json, {{"scenario_seed", scenario.seed}},
                    {"compare.csv", "manifest.json"});

  // Headline numbers: limiting rates, horizon values, variability.
  std::vector<double> slopes;
  slopes.reserve(baseline.curves.size());
  for (const MinPlusCurve& c : baseline.curves) slopes.push_back(c.limiting_slope());
  double slope_median = median(slopes);

  double t_back = t_grid.back();
  double mean_back = baseline.mean.back();
  std::vector<double> horizon(baseline.curves.size());
  for (std::size_t i = 0; i < baseline.curves.size(); ++i)
    horizon[i] = baseline.curves[i].evaluate(t_back);
  double var = 0.0;
  for (double v : horizon) var += (v - mean_back) * (v - mean_back);
  var = horizon.size() > 1 ? var / static_cast<double>(horizon.size() - 1) : 0.0;

  std::int64_t max_diff = 0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    std::int64_t diff =
        std::abs(baseline.curves.front().floor_evaluate(t_grid[k]) - stochastic[k]);
    max_diff = std::max(max_diff, diff);
  }

  double horizon_lo = invert_or_nan(curve_lo, t_back);
  double horizon_hi = invert_or_nan(curve_hi, t_back);
  double ci_width = horizon_hi - horizon_lo;  // NaN when either endpoint is unavailable
  // The pseudo-inverse floors, so the two views of an identical service differ
  // by up to one packet; only a larger gap counts as overestimation.
  bool overestimates = baseline.ci_low.back() > static_cast<double>(stochastic.back()) + 1.0;

  std::ostringstream rep;
  rep << "stochastic: limiting rate " << fmt(report.curve.limiting_rate(), 10)
      << " packets/second, bracket [" << fmt(report.selection.bracket_lo, 10) << ", "
      << fmt(report.selection.bracket_hi, 10) << "], epsilon "
      << fmt(report.curve.epsilon_total(), 10) << "\n";
  rep << "baseline:   median limiting slope " << fmt(slope_median, 10) << " packets/second over "
      << baseline.curves.size() << " iterations\n";
  rep << "agreement:  max |baseline(iteration 0, floored) - stochastic| over the grid = "
      << max_diff << " packets\n";
  rep << "horizon t = " << fmt(t_back, 10) << " s: baseline mean " << fmt(mean_back, 10)
      << " packets, ci [" << fmt(baseline.ci_low.back(), 10) << ", "
      << fmt(baseline.ci_high.back(), 10) << "]; stochastic " << stochastic.back()
      << " packets\n";
  rep << "overestimation flag: " << (overestimates ? "yes" : "no")
      << " (baseline ci_low at the horizon vs the stochastic estimate, one-packet "
         "packetization margin)\n";
  rep << "variability: baseline cross-iteration variance at the horizon = " << fmt(var, 10)
      << " packets^2 (sd " << fmt(std::sqrt(var), 10) << "), stochastic ci width = "
      << (std::isnan(ci_width) ? std::string("unavailable") : fmt(ci_width, 10) + " packets")
      << (std::isnan(ci_width) ? std::string()
                               : ", variance/width ratio = " + fmt(var / ci_width, 10))
      << "\n";
  std::string report_text = rep.str();

  manifest["results"] = {{"stochastic", report.to_json()},
                         {"baseline_median_limiting_slope", slope_median},
                         {"baseline_horizon_variance", var},
                         {"max_grid_difference_packets", max_diff},
                         {"overestimation_flag", overestimates}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  std::cout << report_text;
  std::cout << "wrote " << (out / "compare.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bwprobe: estimates epsilon-effective service curves of networks with "
      "random service from constant-rate packet-train probes, driven by a "
      "built-in seeded packet-level simulator"};
  app.set_version_flag("--version", std::string("bwprobe ") + BWPROBE_VERSION);
  app.require_subcommand(1);

  int default_jobs = std::max(1u, std::thread::hardware_concurrency());

  EstimateFlags est_flags;
  est_flags.jobs = default_jobs;
  CLI::App* est = app.add_subcommand(
      "estimate", "probe a scenario and export the max-plus service-curve estimate");
  add_estimate_flags(est, &est_flags);

  BoundsFlags bounds_flags;
  CLI::App* bounds = app.add_subcommand(
      "bounds", "analytic service bounds for the Bernoulli on-off server");
  bounds->add_option("--p", bounds_flags.p, "per-slot service probability")->required();
  bounds->add_option("--eps", bounds_flags.eps, "violation probability")->capture_default_str();
  bounds->add_option("--nmax", bounds_flags.n_max, "largest packet index")->capture_default_str();
  bounds->add_option("--out", bounds_flags.out, "output directory")->capture_default_str();

  CompareFlags cmp_flags;
  cmp_flags.est.jobs = default_jobs;
  CLI::App* cmp = app.add_subcommand(
      "compare", "run the stochastic estimator and the rate-scanning baseline side by side");
  add_estimate_flags(cmp, &cmp_flags.est);
  cmp->add_option("--max-rate", cmp_flags.max_rate,
                  "top of the baseline's arithmetic rate grid (packets/second or Mbps)")
      ->required();
  cmp->add_option("--rate-step", cmp_flags.rate_step, "baseline rate-grid increment")
      ->capture_default_str();
  cmp->add_option("--baseline-train", cmp_flags.baseline_train,
                  "baseline train length in packets")
      ->capture_default_str();
  cmp->add_option("--baseline-iterations", cmp_flags.baseline_iterations,
                  "independent repetitions of the baseline scan")
      ->capture_default_str();
  cmp->add_option("--tmax", cmp_flags.t_max, "largest time-grid point in seconds")
      ->capture_default_str();
  cmp->add_option("--points", cmp_flags.points, "number of time-grid points")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string command = join_command(argc, argv);
  try {
    if (est->parsed()) return run_estimate(est_flags, command);
    if (bounds->parsed()) return run_bounds(bounds_flags, command);
    return run_compare(cmp_flags, command);
  } catch (const CliError& e) {
    std::cerr << "bwprobe: " << e.message << "\n";
    return e.code;
  } catch (const EmptyEstimateError& e) {
    std::cerr << "bwprobe: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bwprobe: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "bwprobe: " << e.what() << "\n";
    return 1;
  }
}
