// Copyright 2026 The carand Authors.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carand/allocation.hpp"
#include "carand/summary.hpp"

namespace carand {

struct SimulationOptions {
  bool record_strata = true;
  std::int64_t bin_width = 1;
  /// Strata whose raw final-checkpoint values are kept (for CLT checks).
  std::vector<std::size_t> retained_strata;
  bool check_each_step = false;
};

/// Runs replications [rep_begin, rep_end), each on the stream derived from
/// (master_seed, replication id), split over `workers` threads (0 = hardware
/// concurrency). The result does not depend on the worker count.
SimulationSummary simulate_range(const DesignConfig& design,
                                 std::span<const std::int64_t> n_grid, std::uint64_t rep_begin,
                                 std::uint64_t rep_end, std::uint64_t master_seed,
                                 unsigned workers, const SimulationOptions& options = {});

inline SimulationSummary simulate_many(const DesignConfig& design,
                                       std::span<const std::int64_t> n_grid,
                                       std::uint64_t replications, std::uint64_t master_seed,
                                       unsigned workers, const SimulationOptions& options = {}) {
  return simulate_range(design, n_grid, 0, replications, master_seed, workers, options);
}

enum class Regime { kBounded, kSqrtN };

enum class Justification {
  kThm31i,
  kThm31ii,
  kThm31iii,
  kThm32vi,
  kThm33,
  kCor32,
  kThm41i,
  kThm41ii,
  kThm41iii,
  kThm41iv,
  kThm41v,
};

std::string to_string(Regime regime);
std::string to_string(Justification tag);

struct RegimeEntry {
  ScopeKey key;
  Regime regime;
  Justification tag;
};

struct RegimePrediction {
  std::vector<RegimeEntry> entries;

  const RegimeEntry* find(const ScopeKey& key) const;
};

/// Predicted growth regime for every overall, marginal and within-stratum
/// imbalance (every treatment for multi-arm designs). Depends only on which
/// weights are zero:
///   within-stratum bounded iff w_s > 0;
///   margin (i; ·) bounded iff w_s + w_m[i] > 0;
///   overall always bounded.
RegimePrediction classify_regimes(const DesignConfig& design);

struct Sigma2Estimate {
  double sigma2_hat = 0.0;
  double flatness_ratio = 1.0;
  /// Standard error of sigma2_hat, ignoring the (positive) covariance between
  /// the two checkpoints; conservative.
  double standard_error = 0.0;
};

/// sigma2_hat = (m2(n_b) - m2(n_a)) / (n_b - n_a) and flatness ratio
/// m2(n_b) / m2(n_a) from empirical second moments. A ratio of 0/0 is
/// reported as 1. Throws ConfigError when either checkpoint is missing or
/// n_b < 2·n_a.
Sigma2Estimate estimate_sigma2(const SimulationSummary& summary, const ScopeKey& key,
                               std::int64_t n_a, std::int64_t n_b);

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// the standard normal distribution function.
double ks_distance_normal(std::span<const double> samples);

/// KS distance of samples / sqrt(sigma2_hat·n) against N(0,1); nullopt when
/// sigma2_hat is not positive.
std::optional<double> ks_normality(std::span<const double> samples, double sigma2_hat,
                                   std::int64_t n);

struct DriftDiagnostic {
  double v = 0.0;
  double s = 0.0;
  double expected_drift = 0.0;  // 1 - 4S
  /// E[V' | state] by enumerating the 2m successor states, minus V.
  double enumerated_drift = 0.0;
};

/// Test function V = Σ_k w_s D(k)² + Σ_i Σ_l w_m[i] D(i;l)² + w_o D² and
/// S = Σ_k |Λ(k)|(1/2 - g(4|Λ(k)|)) p(k), for which E[V'] - V = 1 - 4S.
DriftDiagnostic drift_diagnostic(const ImbalanceState& state, const WeightConfig& w,
                                 const GFunction& g, const StratumDistribution& dist);

struct Tolerances {
  double bounded_lo = 0.5;
  double bounded_hi = 2.0;
  double sqrt_lo = 2.8;
  double sqrt_hi = 5.7;
  double ks_max = 0.03;
  double sigma2_se_multiplier = 3.0;
  /// Checkpoint pair for the growth checks; defaults to the first and last
  /// checkpoints of the summary.
  std::optional<std::int64_t> n_a;
  std::optional<std::int64_t> n_b;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

enum class Verdict { kPass, kFail, kInsufficientData };

std::string to_string(Verdict verdict);

struct ReportRow {
  ScopeKey key;
  Regime prediction;
  Justification tag;
  std::optional<double> flatness_ratio;
  std::optional<double> sigma2_hat;
  std::optional<double> sigma2_se;
  std::optional<double> ks;
  Verdict verdict = Verdict::kInsufficientData;
  std::string note;
};

struct VerificationReport {
  std::int64_t n_a = 0;
  std::int64_t n_b = 0;
  std::vector<ReportRow> rows;

  bool all_passed() const;
  const ReportRow* find(const ScopeKey& key) const;
};

/// One row per predicted key. Bounded: flatness ratio within the bounded
/// band. sqrt(n): flatness ratio within the sqrt band, sigma2_hat above
/// multiplier·SE, and KS below ks_max where raw samples were retained.
/// Missing statistics give "insufficient data", never a pass.
VerificationReport build_report(const SimulationSummary& summary,
                                const RegimePrediction& prediction,
                                const Tolerances& tolerances);

}  // namespace carand
