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

#include "carand/covariate_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "carand/errors.hpp"

namespace carand {

CovariateSpec::CovariateSpec(std::vector<int> levels) : levels_(std::move(levels)) {
  std::vector<std::string> problems;
  if (levels_.empty()) problems.push_back("covariates.levels: need at least one covariate");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] < 2) {
      problems.push_back("covariates.levels[" + std::to_string(i) +
                         "]: every covariate needs more than one level, got " +
                         std::to_string(levels_[i]));
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));

  const std::size_t count = levels_.size();
  strides_.assign(count, 1);
  for (std::size_t i = count - 1; i > 0; --i) {
    strides_[i - 1] = strides_[i] * static_cast<std::size_t>(levels_[i]);
  }
  stratum_count_ = strides_[0] * static_cast<std::size_t>(levels_[0]);

  margin_offsets_.resize(count);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < count; ++i) {
    margin_offsets_[i] = offset;
    offset += static_cast<std::size_t>(levels_[i]);
  }
  margin_count_ = offset;
}

std::size_t CovariateSpec::flat_index(const StratumIndex& stratum) const {
  if (stratum.coords.size() != levels_.size()) {
    throw RangeError("stratum has " + std::to_string(stratum.coords.size()) +
                     " coordinates, expected " + std::to_string(levels_.size()));
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const int k = stratum.coords[i];
    if (k < 1 || k > levels_[i]) {
      throw RangeError("covariate " + std::to_string(i + 1) + " level " + std::to_string(k) +
                       " outside 1.." + std::to_string(levels_[i]));
    }
    flat += static_cast<std::size_t>(k - 1) * strides_[i];
  }
  return flat;
}

StratumIndex CovariateSpec::stratum_at(std::size_t flat) const {
  if (flat >= stratum_count_) {
    throw RangeError("flat stratum " + std::to_string(flat) + " outside 0.." +
                     std::to_string(stratum_count_ - 1));
  }
  StratumIndex out;
  out.coords.resize(levels_.size());
  for (std::size_t i = 0; i < levels_.size(); ++i) out.coords[i] = level_of(flat, i) + 1;
  return out;
}

std::size_t CovariateSpec::margin_flat(const MarginIndex& margin) const {
  if (margin.covariate < 1 || static_cast<std::size_t>(margin.covariate) > levels_.size()) {
    throw RangeError("covariate " + std::to_string(margin.covariate) + " outside 1.." +
                     std::to_string(levels_.size()));
  }
  const auto i = static_cast<std::size_t>(margin.covariate - 1);
  if (margin.level < 1 || margin.level > levels_[i]) {
    throw RangeError("level " + std::to_string(margin.level) + " of covariate " +
                     std::to_string(margin.covariate) + " outside 1.." +
                     std::to_string(levels_[i]));
  }
  return margin_offsets_[i] + static_cast<std::size_t>(margin.level - 1);
}

MarginIndex CovariateSpec::margin_at(std::size_t margin_flat) const {
  if (margin_flat >= margin_count_) {
    throw RangeError("flat margin " + std::to_string(margin_flat) + " out of range");
  }
  std::size_t i = levels_.size() - 1;
  while (margin_offsets_[i] > margin_flat) --i;
  return MarginIndex{static_cast<int>(i + 1), static_cast<int>(margin_flat - margin_offsets_[i]) + 1};
}

std::vector<StratumIndex> enumerate_strata(const CovariateSpec& spec) {
  std::vector<StratumIndex> out;
  out.reserve(spec.stratum_count());
  for (std::size_t k = 0; k < spec.stratum_count(); ++k) out.push_back(spec.stratum_at(k));
  return out;
}

std::vector<MarginIndex> margins_of(const CovariateSpec& spec, const StratumIndex& stratum) {
  spec.flat_index(stratum);  // range check
  std::vector<MarginIndex> out;
  out.reserve(stratum.coords.size());
  for (std::size_t i = 0; i < stratum.coords.size(); ++i) {
    out.push_back(MarginIndex{static_cast<int>(i + 1), stratum.coords[i]});
  }
  return out;
}

StratumDistribution::StratumDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  std::vector<std::string> problems;
  if (probs_.empty()) problems.push_back("covariates.probs: empty");
  double sum = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    if (!(probs_[k] > 0.0) || !std::isfinite(probs_[k])) {
      problems.push_back("covariates.probs[" + std::to_string(k) +
                         "]: every stratum probability must be > 0");
    }
    sum += probs_[k];
  }
  if (!probs_.empty() && std::abs(sum - 1.0) > kSumTolerance) {
    problems.push_back("covariates.probs: must sum to 1 within 1e-12 (sum is " +
                       std::to_string(sum) + ")");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));

  cumulative_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    acc += probs_[k];
    cumulative_[k] = acc;
  }
}

StratumDistribution StratumDistribution::uniform(std::size_t stratum_count) {
  // 1/m summed m times may miss 1 by a few ulps; that is well inside 1e-12
  return StratumDistribution(
      std::vector<double>(stratum_count, 1.0 / static_cast<double>(stratum_count)));
}

std::size_t sample_patient(const StratumDistribution& dist, RandomStream& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(dist.cumulative_.begin(), dist.cumulative_.end(), u);
  if (it == dist.cumulative_.end()) return dist.cumulative_.size() - 1;
  return static_cast<std::size_t>(it - dist.cumulative_.begin());
}

}  // namespace carand
