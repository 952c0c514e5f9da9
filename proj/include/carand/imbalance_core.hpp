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
#include <span>
#include <vector>

#include "carand/covariate_model.hpp"

namespace carand {

/// Weights on overall, per-covariate marginal and within-stratum imbalance.
/// Nonnegative and summing to one within 1e-12.
class WeightConfig {
 public:
  static constexpr double kSumTolerance = 1e-12;

  WeightConfig(double overall, std::vector<double> margins, double stratum);

  double overall() const noexcept { return overall_; }
  const std::vector<double>& margins() const noexcept { return margins_; }
  double margin(std::size_t covariate) const noexcept { return margins_[covariate]; }
  double stratum() const noexcept { return stratum_; }

  friend bool operator==(const WeightConfig&, const WeightConfig&) = default;

 private:
  double overall_;
  std::vector<double> margins_;
  double stratum_;
};

/// |Λ| below this is treated as exactly zero. Λ is a weighted sum of
/// integers, so a nonzero value this small can only be rounding residue from
/// weights without an exact binary representation.
inline constexpr double kLambdaZeroTolerance = 1e-9;

inline double snap_lambda(double v) noexcept {
  return (v < kLambdaZeroTolerance && v > -kLambdaZeroTolerance) ? 0.0 : v;
}

enum class Arm : int { kOne = 1, kTwo = 2 };

inline int arm_sign(Arm arm) noexcept { return arm == Arm::kOne ? 1 : -1; }

/// Enough to revert one apply() without copying the state.
struct AssignmentRecord {
  std::size_t stratum;
  int delta;
};

/// Two-arm imbalance state: per-stratum differences D_n(k) (arm 1 minus
/// arm 2), per-stratum patient counts, and the marginal and overall
/// differences, the latter two kept incrementally.
class ImbalanceState {
 public:
  explicit ImbalanceState(CovariateSpec spec);

  /// Builds a state from raw arrays without any consistency checks. Meant for
  /// tests and for rehydrating exported snapshots.
  static ImbalanceState from_raw(CovariateSpec spec, std::int64_t n,
                                 std::vector<std::int64_t> d_strata,
                                 std::vector<std::int64_t> counts,
                                 std::vector<std::int64_t> d_margins,
                                 std::int64_t d_overall);

  /// Builds a consistent state from per-stratum differences and counts;
  /// margins, overall and n are derived.
  static ImbalanceState from_strata(CovariateSpec spec, std::vector<std::int64_t> d_strata,
                                    std::vector<std::int64_t> counts);

  AssignmentRecord apply(std::size_t stratum, Arm arm);
  void undo(const AssignmentRecord& record);

  const CovariateSpec& spec() const noexcept { return spec_; }
  std::int64_t n() const noexcept { return n_; }
  std::int64_t d_overall() const noexcept { return d_overall_; }
  std::int64_t d_stratum(std::size_t k) const noexcept { return d_strata_[k]; }
  std::int64_t count(std::size_t k) const noexcept { return counts_[k]; }
  std::int64_t d_margin(std::size_t margin_flat) const noexcept { return d_margins_[margin_flat]; }
  std::span<const std::int64_t> d_strata() const noexcept { return d_strata_; }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }
  std::span<const std::int64_t> d_margins() const noexcept { return d_margins_; }

  friend bool operator==(const ImbalanceState&, const ImbalanceState&) = default;

 private:
  CovariateSpec spec_;
  std::int64_t n_ = 0;
  std::vector<std::int64_t> d_strata_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> d_margins_;
  std::int64_t d_overall_ = 0;
};

/// Λ(k) for every stratum.
struct LambdaView {
  std::vector<double> values;
};

/// Λ(k) = w_o·D + Σ_i w_m[i]·D(i;k_i) + w_s·D(k) from the stored marginal and
/// overall fields.
LambdaView lambda_view(const ImbalanceState& state, const WeightConfig& w);

/// Λ at one stratum, O(I).
double lambda_at(const ImbalanceState& state, const WeightConfig& w, std::size_t stratum);

/// Λ recomputed from the per-stratum differences alone (margins and overall
/// re-summed), O(m·I).
LambdaView lambda_from_strata(const CovariateSpec& spec, const WeightConfig& w,
                              std::span<const std::int64_t> d_strata);

/// True iff the stored marginal and overall differences equal the sums of the
/// per-stratum differences.
bool reconstruct_check(const ImbalanceState& state);

/// Count and parity invariants: |D(k)| <= N(k), D(k) ≡ N(k) and D ≡ n (mod 2),
/// Σ N(k) = n.
bool parity_invariants_hold(const ImbalanceState& state);

struct MultiAssignmentRecord {
  std::size_t stratum;
  std::size_t treatment;
};

/// Multi-arm state. Counts N_t(·) are stored; the imbalances
/// D_t(·) = N_t(·) - N(·)/T are exposed as integer numerators T·D_t(·) so the
/// zero-sum and mod-T identities are exact. Treatments are 0-based.
class MultiArmState {
 public:
  MultiArmState(CovariateSpec spec, std::size_t arms);

  MultiAssignmentRecord apply(std::size_t stratum, std::size_t treatment);
  void undo(const MultiAssignmentRecord& record);

  const CovariateSpec& spec() const noexcept { return spec_; }
  std::size_t arms() const noexcept { return arms_; }
  std::int64_t n() const noexcept { return n_; }

  std::int64_t count_stratum(std::size_t t, std::size_t k) const noexcept {
    return n_strata_[t * spec_.stratum_count() + k];
  }
  std::int64_t count_margin(std::size_t t, std::size_t slot) const noexcept {
    return n_margins_[t * spec_.margin_count() + slot];
  }
  std::int64_t count_overall(std::size_t t) const noexcept { return n_overall_[t]; }
  std::int64_t stratum_total(std::size_t k) const noexcept { return stratum_totals_[k]; }
  std::int64_t margin_total(std::size_t slot) const noexcept { return margin_totals_[slot]; }

  /// T·D_t(k), T·D_t(i;k_i) (by flat margin slot) and T·D_t.
  std::int64_t scaled_stratum(std::size_t t, std::size_t k) const noexcept {
    return static_cast<std::int64_t>(arms_) * count_stratum(t, k) - stratum_totals_[k];
  }
  std::int64_t scaled_margin(std::size_t t, std::size_t slot) const noexcept {
    return static_cast<std::int64_t>(arms_) * count_margin(t, slot) - margin_totals_[slot];
  }
  std::int64_t scaled_overall(std::size_t t) const noexcept {
    return static_cast<std::int64_t>(arms_) * n_overall_[t] - n_;
  }

  double d_stratum(std::size_t t, std::size_t k) const noexcept {
    return static_cast<double>(scaled_stratum(t, k)) / static_cast<double>(arms_);
  }

  friend bool operator==(const MultiArmState&, const MultiArmState&) = default;

 private:
  CovariateSpec spec_;
  std::size_t arms_;
  std::int64_t n_ = 0;
  std::vector<std::int64_t> n_strata_;
  std::vector<std::int64_t> n_margins_;
  std::vector<std::int64_t> n_overall_;
  std::vector<std::int64_t> stratum_totals_;
  std::vector<std::int64_t> margin_totals_;
};

/// Λ_t(k) for t = 0..T-1 at one stratum.
std::vector<double> lambda_multi(const MultiArmState& state, const WeightConfig& w,
                                 std::size_t stratum);

/// Σ_t D_t(·) = 0 at every scope and T·D_t(·) + N(·) ≡ 0 (mod T), checked on
/// the derived numerators.
bool multi_invariants_hold(const MultiArmState& state);

}  // namespace carand
