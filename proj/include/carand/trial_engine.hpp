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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "carand/allocation.hpp"
#include "carand/random_stream.hpp"

namespace carand {

/// Imbalances at one checkpoint. Values are stored as scale·D, one row per
/// imbalance "arm": a single row of D for two-arm designs, T rows of T·D_t
/// for multi-arm designs. Margin values are laid out row by row in flat
/// margin order, strata row by row in flat stratum order.
struct Snapshot {
  std::int64_t n = 0;
  std::vector<std::int64_t> overall;
  std::vector<std::int64_t> margins;
  std::vector<std::int64_t> strata;  // empty unless strata are recorded
  std::vector<std::int64_t> counts;  // patients per stratum; empty unless strata are recorded

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct Trajectory {
  std::uint64_t master_seed = 0;
  std::uint64_t replication_id = 0;
  std::size_t rows = 1;
  std::int64_t scale = 1;
  std::vector<std::int64_t> checkpoints;
  std::vector<Snapshot> snapshots;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct TrialOptions {
  /// Strata snapshots are O(m) per checkpoint; switch off for large designs.
  bool record_strata = true;
  /// Run reconstruct_check / invariant checks after every patient and throw
  /// std::logic_error on the first violation.
  bool check_each_step = false;
};

/// Throws ConfigError unless checkpoints are strictly ascending within [1, n].
void validate_checkpoints(std::int64_t n, std::span<const std::int64_t> checkpoints);

/// One enrolment: flat stratum and treatment (0-based; for two-arm designs 0
/// is arm 1 and 1 is arm 2).
struct Enrolment {
  std::size_t stratum = 0;
  std::size_t treatment = 0;
};

/// Patient-by-patient trial on a caller-owned stream. run_trial is a loop
/// over step().
class TrialRunner {
 public:
  TrialRunner(const DesignConfig& design, RandomStream& rng);

  Enrolment step();

  std::int64_t patients() const noexcept;
  bool multi_arm() const noexcept { return multi_.has_value(); }
  /// Valid for two-arm designs only.
  const ImbalanceState& two_arm_state() const { return *two_; }
  /// Valid for multi-arm designs only.
  const MultiArmState& multi_state() const { return *multi_; }

 private:
  const DesignConfig* design_;
  RandomStream* rng_;
  std::optional<ImbalanceState> two_;
  std::optional<MultiArmState> multi_;
};

/// Runs one trial of n patients. Patient 1 is assigned by a fair coin (1/2, or
/// 1/T for multi-arm); every later patient by the design's policy. Each
/// patient consumes one draw for the stratum and one for the treatment, plus
/// tie-break draws for multi-arm designs. Deterministic given
/// (design, n, checkpoints, rng state).
Trajectory run_trial(const DesignConfig& design, std::int64_t n,
                     std::span<const std::int64_t> checkpoints, RandomStream& rng,
                     const TrialOptions& options = {});

/// Two-arm only: runs the trial and returns the final state.
ImbalanceState run_two_arm_state(const DesignConfig& design, std::int64_t n, RandomStream& rng);

/// Checks a snapshot: margins and overall agree with strata (when recorded),
/// parity for two-arm, zero-sum and mod-T for multi-arm.
bool snapshot_invariants_hold(const Snapshot& snap, const CovariateSpec& spec,
                              std::size_t rows, std::int64_t scale);

}  // namespace carand
