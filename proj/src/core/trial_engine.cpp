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

#include "carand/trial_engine.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

#include "carand/errors.hpp"

namespace carand {

void validate_checkpoints(std::int64_t n, std::span<const std::int64_t> checkpoints) {
  std::vector<std::string> problems;
  if (n < 1) problems.push_back("trial length n must be >= 1");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > n) {
      problems.push_back("checkpoint " + std::to_string(checkpoints[i]) + " outside [1, " +
                         std::to_string(n) + "]");
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      problems.push_back("checkpoints must be strictly ascending");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

namespace {

Snapshot snapshot_two_arm(const ImbalanceState& s, bool strata) {
  Snapshot snap;
  snap.n = s.n();
  snap.overall = {s.d_overall()};
  snap.margins.assign(s.d_margins().begin(), s.d_margins().end());
  if (strata) {
    snap.strata.assign(s.d_strata().begin(), s.d_strata().end());
    snap.counts.assign(s.counts().begin(), s.counts().end());
  }
  return snap;
}

Snapshot snapshot_multi(const MultiArmState& s, bool strata) {
  const CovariateSpec& spec = s.spec();
  Snapshot snap;
  snap.n = s.n();
  for (std::size_t t = 0; t < s.arms(); ++t) snap.overall.push_back(s.scaled_overall(t));
  for (std::size_t t = 0; t < s.arms(); ++t) {
    for (std::size_t j = 0; j < spec.margin_count(); ++j) {
      snap.margins.push_back(s.scaled_margin(t, j));
    }
  }
  if (strata) {
    for (std::size_t t = 0; t < s.arms(); ++t) {
      for (std::size_t k = 0; k < spec.stratum_count(); ++k) {
        snap.strata.push_back(s.scaled_stratum(t, k));
      }
    }
    for (std::size_t k = 0; k < spec.stratum_count(); ++k) snap.counts.push_back(s.stratum_total(k));
  }
  return snap;
}

std::size_t pick_treatment(const std::vector<double>& probs, double u) {
  double acc = 0.0;
  for (std::size_t t = 0; t + 1 < probs.size(); ++t) {
    acc += probs[t];
    if (u < acc) return t;
  }
  return probs.size() - 1;
}

}  // namespace

TrialRunner::TrialRunner(const DesignConfig& design, RandomStream& rng)
    : design_(&design), rng_(&rng) {
  if (design.multi_arm()) {
    multi_.emplace(design.spec, design.arms());
  } else {
    two_.emplace(design.spec);
  }
}

std::int64_t TrialRunner::patients() const noexcept { return two_ ? two_->n() : multi_->n(); }

Enrolment TrialRunner::step() {
  const DesignConfig& d = *design_;
  RandomStream& rng = *rng_;
  const std::size_t k = sample_patient(d.dist, rng);
  if (two_) {
    const double p1 = two_->n() == 0 ? 0.5 : assign_prob_two_arm(*two_, d.weights, d.g(), k);
    const Arm arm = rng.uniform() < p1 ? Arm::kOne : Arm::kTwo;
    two_->apply(k, arm);
    return {k, arm == Arm::kOne ? std::size_t{0} : std::size_t{1}};
  }
  const std::size_t arms = multi_->arms();
  std::size_t t;
  if (multi_->n() == 0) {
    t = std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(arms)), arms - 1);
  } else {
    const std::vector<double> p = assign_probs_multi(*multi_, d.weights, d.multi_probs(), k, rng);
    t = pick_treatment(p, rng.uniform());
  }
  multi_->apply(k, t);
  return {k, t};
}

Trajectory run_trial(const DesignConfig& design, std::int64_t n,
                     std::span<const std::int64_t> checkpoints, RandomStream& rng,
                     const TrialOptions& options) {
  validate_checkpoints(n, checkpoints);
  Trajectory traj;
  traj.master_seed = rng.master_seed();
  traj.replication_id = rng.replication_id();
  traj.rows = design.multi_arm() ? design.arms() : 1;
  traj.scale = design.multi_arm() ? static_cast<std::int64_t>(design.arms()) : 1;
  traj.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  traj.snapshots.reserve(checkpoints.size());

  TrialRunner runner(design, rng);
  std::size_t next = 0;
  for (std::int64_t j = 1; j <= n; ++j) {
    runner.step();
    if (options.check_each_step) {
      const bool ok = runner.multi_arm()
                          ? multi_invariants_hold(runner.multi_state())
                          : reconstruct_check(runner.two_arm_state()) &&
                                parity_invariants_hold(runner.two_arm_state());
      if (!ok) {
        throw std::logic_error("imbalance invariants violated after patient " + std::to_string(j));
      }
    }
    if (next < checkpoints.size() && j == checkpoints[next]) {
      traj.snapshots.push_back(runner.multi_arm()
                                   ? snapshot_multi(runner.multi_state(), options.record_strata)
                                   : snapshot_two_arm(runner.two_arm_state(), options.record_strata));
      ++next;
    }
  }
  return traj;
}

ImbalanceState run_two_arm_state(const DesignConfig& design, std::int64_t n, RandomStream& rng) {
  if (design.multi_arm()) throw ConfigError("run_two_arm_state needs a two-arm design");
  validate_checkpoints(n, {});
  TrialRunner runner(design, rng);
  for (std::int64_t j = 1; j <= n; ++j) runner.step();
  return runner.two_arm_state();
}

bool snapshot_invariants_hold(const Snapshot& snap, const CovariateSpec& spec, std::size_t rows,
                              std::int64_t scale) {
  const std::size_t m = spec.stratum_count();
  const std::size_t mc = spec.margin_count();
  if (snap.overall.size() != rows || snap.margins.size() != rows * mc) return false;
  const bool strata = !snap.strata.empty();
  if (strata && (snap.strata.size() != rows * m || snap.counts.size() != m)) return false;

  // margins and overall are the sums of the strata, row by row
  if (strata) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::int64_t overall = 0;
      std::vector<std::int64_t> margins(mc, 0);
      for (std::size_t k = 0; k < m; ++k) {
        const std::int64_t v = snap.strata[r * m + k];
        overall += v;
        for (std::size_t i = 0; i < spec.covariate_count(); ++i) margins[spec.margin_slot(k, i)] += v;
      }
      if (overall != snap.overall[r]) return false;
      for (std::size_t j = 0; j < mc; ++j) {
        if (margins[j] != snap.margins[r * mc + j]) return false;
      }
    }
  }

  if (rows == 1) {
    if ((snap.overall[0] - snap.n) % 2 != 0) return false;
    if (strata) {
      std::int64_t total = 0;
      for (std::size_t k = 0; k < m; ++k) {
        const std::int64_t d = snap.strata[k];
        const std::int64_t c = snap.counts[k];
        if (d > c || -d > c || (d - c) % 2 != 0) return false;
        total += c;
      }
      if (total != snap.n) return false;
    }
    return true;
  }

  // multi-arm: each column sums to zero, and scale·D_t + N ≡ 0 (mod scale)
  auto column_ok = [&](const std::vector<std::int64_t>& values, std::size_t width, std::size_t col,
                       std::optional<std::int64_t> total) {
    std::int64_t sum = 0;
    const std::int64_t first = values[col];
    for (std::size_t r = 0; r < rows; ++r) {
      const std::int64_t v = values[r * width + col];
      sum += v;
      if (total ? (v + *total) % scale != 0 : (v - first) % scale != 0) return false;
    }
    return sum == 0;
  };
  if (!column_ok(snap.overall, 1, 0, snap.n)) return false;
  for (std::size_t j = 0; j < mc; ++j) {
    if (!column_ok(snap.margins, mc, j, std::nullopt)) return false;
  }
  if (strata) {
    std::int64_t total = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (!column_ok(snap.strata, m, k, snap.counts[k])) return false;
      total += snap.counts[k];
    }
    if (total != snap.n) return false;
  }
  return true;
}

}  // namespace carand
