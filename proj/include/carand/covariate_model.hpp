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

#include "carand/random_stream.hpp"

namespace carand {

/// A stratum as its covariate profile (k_1, ..., k_I). Levels are 1-based.
struct StratumIndex {
  std::vector<int> coords;

  friend bool operator==(const StratumIndex&, const StratumIndex&) = default;
};

/// Margin (i; k_i): covariate i at level k_i, both 1-based.
struct MarginIndex {
  int covariate = 1;
  int level = 1;

  friend bool operator==(const MarginIndex&, const MarginIndex&) = default;
};

/// Levels per covariate. Strata are flattened row-major over the coordinates
/// (last covariate varies fastest); margins are flattened covariate by
/// covariate, so margin (i; k_i) sits at margin_offset(i) + k_i - 1.
class CovariateSpec {
 public:
  /// Throws ConfigError unless there is at least one covariate and every
  /// covariate has more than one level.
  explicit CovariateSpec(std::vector<int> levels);

  std::size_t covariate_count() const noexcept { return levels_.size(); }
  const std::vector<int>& levels() const noexcept { return levels_; }
  std::size_t stratum_count() const noexcept { return stratum_count_; }
  std::size_t margin_count() const noexcept { return margin_count_; }

  std::size_t flat_index(const StratumIndex& stratum) const;
  StratumIndex stratum_at(std::size_t flat) const;

  /// 0-based level of covariate `covariate` (0-based) inside a flat stratum.
  int level_of(std::size_t flat, std::size_t covariate) const noexcept {
    return static_cast<int>((flat / strides_[covariate]) %
                            static_cast<std::size_t>(levels_[covariate]));
  }

  std::size_t margin_offset(std::size_t covariate) const noexcept {
    return margin_offsets_[covariate];
  }
  std::size_t margin_flat(const MarginIndex& margin) const;
  MarginIndex margin_at(std::size_t margin_flat) const;

  /// Flat margin slot of covariate `covariate` (0-based) for a flat stratum.
  std::size_t margin_slot(std::size_t flat, std::size_t covariate) const noexcept {
    return margin_offsets_[covariate] + static_cast<std::size_t>(level_of(flat, covariate));
  }

  friend bool operator==(const CovariateSpec& a, const CovariateSpec& b) {
    return a.levels_ == b.levels_;
  }

 private:
  std::vector<int> levels_;
  std::vector<std::size_t> strides_;
  std::vector<std::size_t> margin_offsets_;
  std::size_t stratum_count_ = 0;
  std::size_t margin_count_ = 0;
};

/// All strata in row-major order.
std::vector<StratumIndex> enumerate_strata(const CovariateSpec& spec);

/// The I margins a stratum belongs to; throws RangeError for coordinates
/// outside the grid.
std::vector<MarginIndex> margins_of(const CovariateSpec& spec, const StratumIndex& stratum);

/// Stratum probabilities p(k), flat row-major. Every entry must be strictly
/// positive and the entries must sum to one within 1e-12; nothing is
/// renormalized.
class StratumDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit StratumDistribution(std::vector<double> probs);
  static StratumDistribution uniform(std::size_t stratum_count);

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t k) const noexcept { return probs_[k]; }

  friend bool operator==(const StratumDistribution& a, const StratumDistribution& b) {
    return a.probs_ == b.probs_;
  }

 private:
  std::vector<double> probs_;
  std::vector<double> cumulative_;

  friend std::size_t sample_patient(const StratumDistribution&, RandomStream&);
};

/// Draws one patient's flat stratum index. Consumes exactly one uniform.
std::size_t sample_patient(const StratumDistribution& dist, RandomStream& rng);

}  // namespace carand
