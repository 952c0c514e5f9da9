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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "carand/allocation.hpp"

namespace carand {

/// Exact law of the per-stratum imbalances after n patients. Keys are the
/// rows×m numerators (scale·D) encoded as little-endian int16.
struct StateDistribution {
  std::int64_t n = 0;
  std::size_t rows = 1;
  std::int64_t scale = 1;
  std::unordered_map<std::string, double> mass;

  double total_mass() const;
};

std::string encode_state(std::span<const std::int64_t> values);
std::vector<std::int64_t> decode_state(std::string_view key);

struct OracleLimits {
  std::size_t max_strata_two_arm = 8;
  std::int64_t max_n_two_arm = 16;
  std::size_t max_cells_multi_arm = 12;  // T·m
  std::int64_t max_n_multi_arm = 12;
};

/// Upper bound on the number of support states at step n_max (lattice
/// points with L1 norm at most scale·n_max in rows·m dimensions).
double estimate_state_count(const DesignConfig& design, std::int64_t n_max);

/// Distributions for n = 0..n_max built by pushing mass through the
/// transition law; the first step uses the fair coin. Multi-arm designs use
/// the expected tie-break probabilities. Throws GuardError past the limits.
std::vector<StateDistribution> propagate(const DesignConfig& design, std::int64_t n_max,
                                         const OracleLimits& limits = {});

/// An imbalance functional of the state. `row` selects the treatment for
/// multi-arm designs (0 for two-arm).
struct Statistic {
  enum class Kind { kAbsOverall, kAbsMargin, kAbsStratum, kSquareStratum };
  Kind kind = Kind::kAbsOverall;
  std::size_t index = 0;  // flat margin slot or flat stratum
  std::size_t row = 0;

  friend bool operator==(const Statistic&, const Statistic&) = default;
};

/// Parses "abs_overall", "abs_margin:i:k" (1-based covariate and level),
/// "abs_stratum:f" and "square_stratum:f" (0-based flat stratum), each with
/// an optional "@t" treatment suffix (1-based). Throws ConfigError.
Statistic parse_statistic(std::string_view text, const CovariateSpec& spec, std::size_t rows);
std::string to_string(const Statistic& stat, const CovariateSpec& spec);

/// Value of the statistic on one decoded state (numerators / scale).
double statistic_value(const Statistic& stat, const CovariateSpec& spec, std::size_t rows,
                       std::int64_t scale, std::span<const std::int64_t> state);

/// Σ P(state)·|statistic(state)|^r.
double exact_moment(const StateDistribution& dist, const CovariateSpec& spec,
                    const Statistic& stat, double r);

}  // namespace carand
