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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carand/covariate_model.hpp"
#include "carand/trial_engine.hpp"

namespace carand {

// 128-bit accumulators (a GCC/Clang extension) keep fourth-power sums exact.
__extension__ using Int128 = __int128;
__extension__ using UInt128 = unsigned __int128;

enum class Scope { kOverall, kMargin, kStratum };

std::string to_string(Scope scope);

/// One imbalance: scope, row (treatment for multi-arm, 0 for two-arm) and
/// index (flat margin slot or flat stratum; 0 for overall).
struct ScopeKey {
  Scope scope = Scope::kOverall;
  std::size_t row = 0;
  std::size_t index = 0;

  friend auto operator<=>(const ScopeKey&, const ScopeKey&) = default;
};

/// Human-readable index: "-" for overall, "i;k" for margins, the flat index
/// for strata; multi-arm keys get a "t<arm>/" prefix.
std::string format_index(const ScopeKey& key, const CovariateSpec& spec, std::size_t rows);

/// All keys for a design layout, in snapshot order.
std::vector<ScopeKey> layout_keys(const CovariateSpec& spec, std::size_t rows,
                                  bool include_strata);

/// Moments and histogram of integer-valued observations (scale·D). All sums
/// are integers, so merging is exact and independent of order.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::int64_t bin_width = 1) : bin_width_(bin_width) {}

  void push(std::int64_t x);
  void merge(const MomentAccumulator& other);

  std::uint64_t count() const noexcept { return count_; }
  std::int64_t bin_width() const noexcept { return bin_width_; }

  /// Mean of x/scale.
  double mean(std::int64_t scale = 1) const;
  /// Mean of (x/scale)².
  double mean_square(std::int64_t scale = 1) const;
  /// Mean of |x/scale|^r. Exact sums for r = 1..4; other r use the histogram
  /// and are exact only when the bin width is 1.
  double mean_abs_pow(double r, std::int64_t scale = 1) const;
  /// Quantile of x/scale from the histogram (lower bin edge of the bin
  /// holding the q-th observation).
  double quantile(double q, std::int64_t scale = 1) const;

  const std::map<std::int64_t, std::uint64_t>& histogram() const noexcept { return hist_; }

  friend bool operator==(const MomentAccumulator&, const MomentAccumulator&) = default;

 private:
  std::int64_t bin_width_;
  std::uint64_t count_ = 0;
  Int128 sum_ = 0;
  UInt128 abs_pow_[4] = {0, 0, 0, 0};
  std::map<std::int64_t, std::uint64_t> hist_;
};

struct SummaryLayout {
  std::vector<std::int64_t> checkpoints;
  std::size_t rows = 1;
  std::int64_t scale = 1;
  bool include_strata = true;
  std::int64_t bin_width = 1;
  /// Strata whose raw per-replication values are kept at the final
  /// checkpoint (all rows).
  std::vector<std::size_t> retained_strata;

  friend bool operator==(const SummaryLayout&, const SummaryLayout&) = default;
};

/// Mergeable statistics over replications at every checkpoint and scope.
class SimulationSummary {
 public:
  SimulationSummary(CovariateSpec spec, SummaryLayout layout, std::uint64_t master_seed,
                    std::uint64_t design_digest);

  void add(const Trajectory& trajectory);
  /// Throws ConfigError if the layouts, seeds or designs differ.
  void merge(const SimulationSummary& other);

  const CovariateSpec& spec() const noexcept { return spec_; }
  const SummaryLayout& layout() const noexcept { return layout_; }
  const std::vector<ScopeKey>& keys() const noexcept { return keys_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t design_digest() const noexcept { return design_digest_; }
  std::uint64_t replications() const noexcept { return replications_; }
  std::uint64_t invariant_violations() const noexcept { return invariant_violations_; }

  /// nullptr if the checkpoint or key is not tracked.
  const MomentAccumulator* find(std::int64_t checkpoint, const ScopeKey& key) const;

  /// Raw values (D, not scaled) at the final checkpoint ordered by
  /// replication id; nullopt if the key is not retained.
  std::optional<std::vector<double>> raw_samples(const ScopeKey& key) const;

  friend bool operator==(const SimulationSummary&, const SimulationSummary&) = default;

 private:
  std::size_t slot_of(const ScopeKey& key) const;

  CovariateSpec spec_;
  SummaryLayout layout_;
  std::uint64_t master_seed_;
  std::uint64_t design_digest_;
  std::uint64_t replications_ = 0;
  std::uint64_t invariant_violations_ = 0;
  std::vector<ScopeKey> keys_;
  std::vector<std::vector<MomentAccumulator>> acc_;  // [checkpoint][slot]
  std::map<ScopeKey, std::map<std::uint64_t, std::int64_t>> raw_;  // key -> rep -> value
};

}  // namespace carand
