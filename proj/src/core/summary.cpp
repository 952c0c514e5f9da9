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

#include "carand/summary.hpp"

#include <algorithm>
#include <cmath>

#include "carand/errors.hpp"

namespace carand {

std::string to_string(Scope scope) {
  switch (scope) {
    case Scope::kOverall:
      return "overall";
    case Scope::kMargin:
      return "margin";
    case Scope::kStratum:
      return "stratum";
  }
  return "?";
}

std::string format_index(const ScopeKey& key, const CovariateSpec& spec, std::size_t rows) {
  std::string idx;
  switch (key.scope) {
    case Scope::kOverall:
      idx = "-";
      break;
    case Scope::kMargin: {
      const MarginIndex mi = spec.margin_at(key.index);
      idx = std::to_string(mi.covariate) + ";" + std::to_string(mi.level);
      break;
    }
    case Scope::kStratum:
      idx = std::to_string(key.index);
      break;
  }
  if (rows > 1) return "t" + std::to_string(key.row + 1) + "/" + idx;
  return idx;
}

std::vector<ScopeKey> layout_keys(const CovariateSpec& spec, std::size_t rows,
                                  bool include_strata) {
  std::vector<ScopeKey> keys;
  for (std::size_t r = 0; r < rows; ++r) keys.push_back({Scope::kOverall, r, 0});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < spec.margin_count(); ++j) keys.push_back({Scope::kMargin, r, j});
  }
  if (include_strata) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < spec.stratum_count(); ++k) keys.push_back({Scope::kStratum, r, k});
    }
  }
  return keys;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double to_double(Int128 v) { return static_cast<double>(v); }
double to_double(UInt128 v) { return static_cast<double>(v); }

}  // namespace

void MomentAccumulator::push(std::int64_t x) {
  ++count_;
  sum_ += x;
  const auto a = static_cast<UInt128>(x < 0 ? -x : x);
  UInt128 p = a;
  for (int r = 0; r < 4; ++r) {
    abs_pow_[r] += p;
    p *= a;
  }
  ++hist_[floor_div(x, bin_width_)];
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.bin_width_ != bin_width_) throw ConfigError("cannot merge histograms with different bin widths");
  count_ += other.count_;
  sum_ += other.sum_;
  for (int r = 0; r < 4; ++r) abs_pow_[r] += other.abs_pow_[r];
  for (const auto& [bin, c] : other.hist_) hist_[bin] += c;
}

double MomentAccumulator::mean(std::int64_t scale) const {
  if (count_ == 0) return std::nan("");
  return to_double(sum_) / static_cast<double>(count_) / static_cast<double>(scale);
}

double MomentAccumulator::mean_square(std::int64_t scale) const {
  if (count_ == 0) return std::nan("");
  const double s = static_cast<double>(scale);
  return to_double(abs_pow_[1]) / static_cast<double>(count_) / (s * s);
}

double MomentAccumulator::mean_abs_pow(double r, std::int64_t scale) const {
  if (count_ == 0) return std::nan("");
  const double s = static_cast<double>(scale);
  if (r == 0.0) return 1.0;
  const double ri = std::round(r);
  if (ri == r && ri >= 1.0 && ri <= 4.0) {
    const int idx = static_cast<int>(ri) - 1;
    return to_double(abs_pow_[idx]) / static_cast<double>(count_) / std::pow(s, r);
  }
  double acc = 0.0;
  for (const auto& [bin, c] : hist_) {
    const double x = static_cast<double>(bin * bin_width_) / s;
    acc += static_cast<double>(c) * std::pow(std::abs(x), r);
  }
  return acc / static_cast<double>(count_);
}

double MomentAccumulator::quantile(double q, std::int64_t scale) const {
  if (count_ == 0) return std::nan("");
  const auto target = static_cast<std::uint64_t>(
      std::max(1.0, std::ceil(std::clamp(q, 0.0, 1.0) * static_cast<double>(count_))));
  std::uint64_t seen = 0;
  for (const auto& [bin, c] : hist_) {
    seen += c;
    if (seen >= target) return static_cast<double>(bin * bin_width_) / static_cast<double>(scale);
  }
  return static_cast<double>(hist_.rbegin()->first * bin_width_) / static_cast<double>(scale);
}

SimulationSummary::SimulationSummary(CovariateSpec spec, SummaryLayout layout,
                                     std::uint64_t master_seed, std::uint64_t design_digest)
    : spec_(std::move(spec)),
      layout_(std::move(layout)),
      master_seed_(master_seed),
      design_digest_(design_digest) {
  if (layout_.bin_width < 1) throw ConfigError("histogram bin width must be >= 1");
  if (!layout_.include_strata && !layout_.retained_strata.empty()) {
    throw ConfigError("retained strata need strata recording enabled");
  }
  for (std::size_t k : layout_.retained_strata) {
    if (k >= spec_.stratum_count()) throw ConfigError("retained stratum " + std::to_string(k) + " out of range");
  }
  keys_ = layout_keys(spec_, layout_.rows, layout_.include_strata);
  acc_.assign(layout_.checkpoints.size(),
              std::vector<MomentAccumulator>(keys_.size(), MomentAccumulator(layout_.bin_width)));
  for (std::size_t r = 0; r < layout_.rows; ++r) {
    for (std::size_t k : layout_.retained_strata) raw_[ScopeKey{Scope::kStratum, r, k}];
  }
}

std::size_t SimulationSummary::slot_of(const ScopeKey& key) const {
  const std::size_t rows = layout_.rows;
  const std::size_t mc = spec_.margin_count();
  switch (key.scope) {
    case Scope::kOverall:
      return key.row;
    case Scope::kMargin:
      return rows + key.row * mc + key.index;
    case Scope::kStratum:
      return rows + rows * mc + key.row * spec_.stratum_count() + key.index;
  }
  return 0;
}

void SimulationSummary::add(const Trajectory& t) {
  if (t.checkpoints != layout_.checkpoints || t.rows != layout_.rows || t.scale != layout_.scale) {
    throw ConfigError("trajectory does not match the summary layout");
  }
  const std::size_t m = spec_.stratum_count();
  const std::size_t mc = spec_.margin_count();
  for (std::size_t c = 0; c < t.snapshots.size(); ++c) {
    const Snapshot& s = t.snapshots[c];
    if (!snapshot_invariants_hold(s, spec_, layout_.rows, layout_.scale)) ++invariant_violations_;
    auto& acc = acc_[c];
    for (std::size_t r = 0; r < layout_.rows; ++r) {
      acc[r].push(s.overall[r]);
      for (std::size_t j = 0; j < mc; ++j) acc[layout_.rows + r * mc + j].push(s.margins[r * mc + j]);
    }
    if (layout_.include_strata) {
      if (s.strata.size() != layout_.rows * m) throw ConfigError("trajectory lacks strata snapshots");
      const std::size_t base = layout_.rows + layout_.rows * mc;
      for (std::size_t i = 0; i < layout_.rows * m; ++i) acc[base + i].push(s.strata[i]);
    }
  }
  if (!t.snapshots.empty()) {
    const Snapshot& last = t.snapshots.back();
    for (auto& [key, values] : raw_) values[t.replication_id] = last.strata[key.row * m + key.index];
  }
  ++replications_;
}

void SimulationSummary::merge(const SimulationSummary& other) {
  if (!(spec_ == other.spec_) || !(layout_ == other.layout_) ||
      master_seed_ != other.master_seed_ || design_digest_ != other.design_digest_) {
    throw ConfigError("cannot merge summaries of different designs, layouts or seeds");
  }
  for (std::size_t c = 0; c < acc_.size(); ++c) {
    for (std::size_t i = 0; i < acc_[c].size(); ++i) acc_[c][i].merge(other.acc_[c][i]);
  }
  for (const auto& [key, values] : other.raw_) {
    auto& mine = raw_[key];
    for (const auto& [rep, v] : values) mine[rep] = v;
  }
  replications_ += other.replications_;
  invariant_violations_ += other.invariant_violations_;
}

const MomentAccumulator* SimulationSummary::find(std::int64_t checkpoint, const ScopeKey& key) const {
  const auto it = std::find(layout_.checkpoints.begin(), layout_.checkpoints.end(), checkpoint);
  if (it == layout_.checkpoints.end()) return nullptr;
  if (key.row >= layout_.rows) return nullptr;
  if (key.scope == Scope::kStratum && (!layout_.include_strata || key.index >= spec_.stratum_count())) {
    return nullptr;
  }
  if (key.scope == Scope::kMargin && key.index >= spec_.margin_count()) return nullptr;
  if (key.scope == Scope::kOverall && key.index != 0) return nullptr;
  return &acc_[static_cast<std::size_t>(it - layout_.checkpoints.begin())][slot_of(key)];
}

std::optional<std::vector<double>> SimulationSummary::raw_samples(const ScopeKey& key) const {
  const auto it = raw_.find(key);
  if (it == raw_.end()) return std::nullopt;
  std::vector<double> out;
  out.reserve(it->second.size());
  for (const auto& [rep, v] : it->second) {
    out.push_back(static_cast<double>(v) / static_cast<double>(layout_.scale));
  }
  return out;
}

}  // namespace carand
