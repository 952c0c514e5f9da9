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

#include "carand/montecarlo_verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "carand/errors.hpp"
#include "carand/random_stream.hpp"
#include "carand/trial_engine.hpp"

namespace carand {

namespace {

SummaryLayout make_layout(const DesignConfig& design, std::span<const std::int64_t> n_grid,
                          const SimulationOptions& options) {
  SummaryLayout layout;
  layout.checkpoints.assign(n_grid.begin(), n_grid.end());
  layout.rows = design.multi_arm() ? design.arms() : 1;
  layout.scale = design.multi_arm() ? static_cast<std::int64_t>(design.arms()) : 1;
  layout.include_strata = options.record_strata;
  layout.bin_width = options.bin_width;
  layout.retained_strata = options.retained_strata;
  return layout;
}

}  // namespace

SimulationSummary simulate_range(const DesignConfig& design,
                                 std::span<const std::int64_t> n_grid, std::uint64_t rep_begin,
                                 std::uint64_t rep_end, std::uint64_t master_seed,
                                 unsigned workers, const SimulationOptions& options) {
  if (n_grid.empty()) throw ConfigError("simulation.n_grid: need at least one checkpoint");
  validate_checkpoints(n_grid.back(), n_grid);
  if (rep_end < rep_begin) throw ConfigError("replication range is reversed");

  const SummaryLayout layout = make_layout(design, n_grid, options);
  const std::uint64_t digest = design.digest();
  const TrialOptions trial_opts{options.record_strata, options.check_each_step};
  const std::int64_t n = n_grid.back();

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t total = rep_end - rep_begin;
  const auto parts = static_cast<std::uint64_t>(
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, total)));

  std::vector<SimulationSummary> partial(
      parts, SimulationSummary(design.spec, layout, master_seed, digest));
  std::vector<std::exception_ptr> errors(parts);

  auto work = [&](std::uint64_t part) {
    try {
      const std::uint64_t lo = rep_begin + total * part / parts;
      const std::uint64_t hi = rep_begin + total * (part + 1) / parts;
      for (std::uint64_t rep = lo; rep < hi; ++rep) {
        RandomStream rng(master_seed, rep);
        partial[part].add(run_trial(design, n, n_grid, rng, trial_opts));
      }
    } catch (...) {
      errors[part] = std::current_exception();
    }
  };

  if (parts == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(parts);
    for (std::uint64_t p = 0; p < parts; ++p) threads.emplace_back(work, p);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::uint64_t p = 1; p < parts; ++p) partial[0].merge(partial[p]);
  return std::move(partial[0]);
}

std::string to_string(Regime regime) {
  return regime == Regime::kBounded ? "bounded" : "sqrt_n";
}

std::string to_string(Justification tag) {
  switch (tag) {
    case Justification::kThm31i:
      return "Thm3.1(i)";
    case Justification::kThm31ii:
      return "Thm3.1(ii)";
    case Justification::kThm31iii:
      return "Thm3.1(iii)";
    case Justification::kThm32vi:
      return "Thm3.2(vi)";
    case Justification::kThm33:
      return "Thm3.3";
    case Justification::kCor32:
      return "Cor3.2";
    case Justification::kThm41i:
      return "Thm4.1(i)";
    case Justification::kThm41ii:
      return "Thm4.1(ii)";
    case Justification::kThm41iii:
      return "Thm4.1(iii)";
    case Justification::kThm41iv:
      return "Thm4.1(iv)";
    case Justification::kThm41v:
      return "Thm4.1(v)";
  }
  return "?";
}

const RegimeEntry* RegimePrediction::find(const ScopeKey& key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

RegimePrediction classify_regimes(const DesignConfig& design) {
  const CovariateSpec& spec = design.spec;
  const WeightConfig& w = design.weights;
  const bool multi = design.multi_arm();
  const std::size_t rows = multi ? design.arms() : 1;
  const bool ws = w.stratum() > 0.0;

  RegimePrediction out;
  for (const ScopeKey& key : layout_keys(spec, rows, true)) {
    RegimeEntry e{key, Regime::kBounded, Justification::kThm31iii};
    switch (key.scope) {
      case Scope::kOverall:
        e.tag = multi ? Justification::kThm41iii : Justification::kThm31iii;
        break;
      case Scope::kMargin: {
        const std::size_t i = static_cast<std::size_t>(spec.margin_at(key.index).covariate - 1);
        const bool wm = w.margin(i) > 0.0;
        if (ws || wm) {
          e.regime = Regime::kBounded;
          if (multi) {
            e.tag = Justification::kThm41ii;
          } else {
            e.tag = ws ? Justification::kThm31ii : Justification::kCor32;
          }
        } else {
          e.regime = Regime::kSqrtN;
          e.tag = multi ? Justification::kThm41v : Justification::kThm33;
        }
        break;
      }
      case Scope::kStratum:
        if (ws) {
          e.regime = Regime::kBounded;
          e.tag = multi ? Justification::kThm41i : Justification::kThm31i;
        } else {
          e.regime = Regime::kSqrtN;
          e.tag = multi ? Justification::kThm41iv : Justification::kThm32vi;
        }
        break;
    }
    out.entries.push_back(e);
  }
  return out;
}

Sigma2Estimate estimate_sigma2(const SimulationSummary& summary, const ScopeKey& key,
                               std::int64_t n_a, std::int64_t n_b) {
  const MomentAccumulator* a = summary.find(n_a, key);
  const MomentAccumulator* b = summary.find(n_b, key);
  std::vector<std::string> problems;
  if (a == nullptr) problems.push_back("checkpoint n_a=" + std::to_string(n_a) + " not tracked");
  if (b == nullptr) problems.push_back("checkpoint n_b=" + std::to_string(n_b) + " not tracked");
  if (n_b < 2 * n_a) problems.push_back("need n_b >= 2·n_a");
  if (!problems.empty()) throw ConfigError(std::move(problems));
  if (a->count() == 0 || b->count() == 0) throw ConfigError("no replications recorded");

  const std::int64_t scale = summary.layout().scale;
  const double m2a = a->mean_square(scale);
  const double m2b = b->mean_square(scale);
  Sigma2Estimate est;
  const double dn = static_cast<double>(n_b - n_a);
  est.sigma2_hat = (m2b - m2a) / dn;
  if (m2a == 0.0) {
    est.flatness_ratio = m2b == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  } else {
    est.flatness_ratio = m2b / m2a;
  }
  auto var_of_square = [scale](const MomentAccumulator& acc) {
    const double m2 = acc.mean_square(scale);
    const double m4 = acc.mean_abs_pow(4.0, scale);
    return std::max(0.0, m4 - m2 * m2) / static_cast<double>(acc.count());
  };
  est.standard_error = std::sqrt(var_of_square(*a) + var_of_square(*b)) / dn;
  return est;
}

double ks_distance_normal(std::span<const double> samples) {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = 0.5 * std::erfc(-x[i] / std::sqrt(2.0));
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::optional<double> ks_normality(std::span<const double> samples, double sigma2_hat,
                                   std::int64_t n) {
  if (!(sigma2_hat > 0.0) || n < 1 || samples.empty()) return std::nullopt;
  const double denom = std::sqrt(sigma2_hat * static_cast<double>(n));
  std::vector<double> z(samples.begin(), samples.end());
  for (double& v : z) v /= denom;
  return ks_distance_normal(z);
}

DriftDiagnostic drift_diagnostic(const ImbalanceState& state, const WeightConfig& w,
                                 const GFunction& g, const StratumDistribution& dist) {
  const CovariateSpec& spec = state.spec();
  auto lyapunov = [&](const ImbalanceState& s) {
    auto sq = [](std::int64_t v) { return static_cast<double>(v) * static_cast<double>(v); };
    double v = w.overall() * sq(s.d_overall());
    for (std::size_t j = 0; j < spec.margin_count(); ++j) {
      v += w.margin(static_cast<std::size_t>(spec.margin_at(j).covariate - 1)) * sq(s.d_margin(j));
    }
    for (std::size_t k = 0; k < spec.stratum_count(); ++k) v += w.stratum() * sq(s.d_stratum(k));
    return v;
  };

  DriftDiagnostic out;
  out.v = lyapunov(state);
  ImbalanceState work = state;
  double expected_next = 0.0;
  for (std::size_t k = 0; k < spec.stratum_count(); ++k) {
    const double lam = lambda_at(state, w, k);
    out.s += std::abs(lam) * (0.5 - g(4.0 * std::abs(lam))) * dist[k];
    const double p1 = g(4.0 * lam);
    const AssignmentRecord r1 = work.apply(k, Arm::kOne);
    expected_next += dist[k] * p1 * lyapunov(work);
    work.undo(r1);
    const AssignmentRecord r2 = work.apply(k, Arm::kTwo);
    expected_next += dist[k] * (1.0 - p1) * lyapunov(work);
    work.undo(r2);
  }
  out.expected_drift = 1.0 - 4.0 * out.s;
  out.enumerated_drift = expected_next - out.v;
  return out;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInsufficientData:
      return "insufficient_data";
  }
  return "?";
}

bool VerificationReport::all_passed() const {
  if (rows.empty()) return false;
  return std::all_of(rows.begin(), rows.end(),
                     [](const ReportRow& r) { return r.verdict == Verdict::kPass; });
}

const ReportRow* VerificationReport::find(const ScopeKey& key) const {
  for (const auto& r : rows) {
    if (r.key == key) return &r;
  }
  return nullptr;
}

VerificationReport build_report(const SimulationSummary& summary,
                                const RegimePrediction& prediction,
                                const Tolerances& tol) {
  VerificationReport report;
  const auto& cps = summary.layout().checkpoints;
  if (!cps.empty()) {
    report.n_a = tol.n_a.value_or(cps.front());
    report.n_b = tol.n_b.value_or(cps.back());
  }
  const bool pair_ok = cps.size() >= 2 && report.n_b >= 2 * report.n_a;
  const bool raw_at_nb = !cps.empty() && report.n_b == cps.back();

  for (const RegimeEntry& e : prediction.entries) {
    ReportRow row;
    row.key = e.key;
    row.prediction = e.regime;
    row.tag = e.tag;
    if (!pair_ok) {
      row.note = "need two checkpoints with n_b >= 2·n_a";
      report.rows.push_back(std::move(row));
      continue;
    }
    const MomentAccumulator* a = summary.find(report.n_a, e.key);
    const MomentAccumulator* b = summary.find(report.n_b, e.key);
    if (a == nullptr || b == nullptr || a->count() == 0 || b->count() == 0) {
      row.note = "no data for this scope at the checkpoint pair";
      report.rows.push_back(std::move(row));
      continue;
    }
    const Sigma2Estimate est = estimate_sigma2(summary, e.key, report.n_a, report.n_b);
    row.flatness_ratio = est.flatness_ratio;
    row.sigma2_hat = est.sigma2_hat;
    row.sigma2_se = est.standard_error;
    const double ratio = est.flatness_ratio;

    if (e.regime == Regime::kBounded) {
      const bool ok = ratio >= tol.bounded_lo && ratio <= tol.bounded_hi;
      row.verdict = ok ? Verdict::kPass : Verdict::kFail;
      if (!ok) row.note = "flatness ratio outside the bounded band";
    } else {
      std::vector<std::string> failures;
      if (!(ratio >= tol.sqrt_lo && ratio <= tol.sqrt_hi)) {
        failures.push_back("flatness ratio outside the sqrt band");
      }
      if (!(est.sigma2_hat > tol.sigma2_se_multiplier * est.standard_error)) {
        failures.push_back("sigma2_hat not positive at the required SE multiple");
      }
      if (raw_at_nb) {
        if (const auto samples = summary.raw_samples(e.key)) {
          row.ks = ks_normality(*samples, est.sigma2_hat, report.n_b);
          if (!row.ks || !(*row.ks < tol.ks_max)) failures.push_back("KS distance too large");
        }
      }
      row.verdict = failures.empty() ? Verdict::kPass : Verdict::kFail;
      for (std::size_t i = 0; i < failures.size(); ++i) {
        row.note += (i ? "; " : "") + failures[i];
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace carand
