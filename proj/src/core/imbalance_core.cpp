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

#include "carand/imbalance_core.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "carand/errors.hpp"

namespace carand {

WeightConfig::WeightConfig(double overall, std::vector<double> margins, double stratum)
    : overall_(overall), margins_(std::move(margins)), stratum_(stratum) {
  std::vector<std::string> problems;
  auto check = [&](double v, const std::string& name) {
    if (!(v >= 0.0) || !std::isfinite(v)) problems.push_back(name + ": weight must be >= 0");
  };
  check(overall_, "weights.overall");
  for (std::size_t i = 0; i < margins_.size(); ++i) {
    check(margins_[i], "weights.margins[" + std::to_string(i) + "]");
  }
  check(stratum_, "weights.stratum");
  double sum = overall_ + stratum_;
  for (double m : margins_) sum += m;
  if (std::abs(sum - 1.0) > kSumTolerance) {
    problems.push_back("weights: overall + margins + stratum must equal 1 within 1e-12 (sum is " +
                       std::to_string(sum) + ")");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

ImbalanceState::ImbalanceState(CovariateSpec spec)
    : spec_(std::move(spec)),
      d_strata_(spec_.stratum_count(), 0),
      counts_(spec_.stratum_count(), 0),
      d_margins_(spec_.margin_count(), 0) {}

ImbalanceState ImbalanceState::from_raw(CovariateSpec spec, std::int64_t n,
                                        std::vector<std::int64_t> d_strata,
                                        std::vector<std::int64_t> counts,
                                        std::vector<std::int64_t> d_margins,
                                        std::int64_t d_overall) {
  ImbalanceState s(std::move(spec));
  if (d_strata.size() != s.d_strata_.size() || counts.size() != s.counts_.size() ||
      d_margins.size() != s.d_margins_.size()) {
    throw ConfigError("ImbalanceState::from_raw: array sizes do not match the covariate spec");
  }
  s.n_ = n;
  s.d_strata_ = std::move(d_strata);
  s.counts_ = std::move(counts);
  s.d_margins_ = std::move(d_margins);
  s.d_overall_ = d_overall;
  return s;
}

ImbalanceState ImbalanceState::from_strata(CovariateSpec spec, std::vector<std::int64_t> d_strata,
                                           std::vector<std::int64_t> counts) {
  ImbalanceState s(std::move(spec));
  if (d_strata.size() != s.d_strata_.size() || counts.size() != s.counts_.size()) {
    throw ConfigError("ImbalanceState::from_strata: array sizes do not match the covariate spec");
  }
  s.d_strata_ = std::move(d_strata);
  s.counts_ = std::move(counts);
  for (std::size_t k = 0; k < s.d_strata_.size(); ++k) {
    s.d_overall_ += s.d_strata_[k];
    s.n_ += s.counts_[k];
    for (std::size_t i = 0; i < s.spec_.covariate_count(); ++i) {
      s.d_margins_[s.spec_.margin_slot(k, i)] += s.d_strata_[k];
    }
  }
  return s;
}

AssignmentRecord ImbalanceState::apply(std::size_t stratum, Arm arm) {
  if (stratum >= d_strata_.size()) throw RangeError("stratum out of range");
  const int delta = arm_sign(arm);
  ++n_;
  ++counts_[stratum];
  d_strata_[stratum] += delta;
  d_overall_ += delta;
  for (std::size_t i = 0; i < spec_.covariate_count(); ++i) {
    d_margins_[spec_.margin_slot(stratum, i)] += delta;
  }
  return AssignmentRecord{stratum, delta};
}

void ImbalanceState::undo(const AssignmentRecord& record) {
  --n_;
  --counts_[record.stratum];
  d_strata_[record.stratum] -= record.delta;
  d_overall_ -= record.delta;
  for (std::size_t i = 0; i < spec_.covariate_count(); ++i) {
    d_margins_[spec_.margin_slot(record.stratum, i)] -= record.delta;
  }
}

double lambda_at(const ImbalanceState& state, const WeightConfig& w, std::size_t stratum) {
  const CovariateSpec& spec = state.spec();
  double v = w.overall() * static_cast<double>(state.d_overall());
  for (std::size_t i = 0; i < spec.covariate_count(); ++i) {
    v += w.margin(i) * static_cast<double>(state.d_margin(spec.margin_slot(stratum, i)));
  }
  v += w.stratum() * static_cast<double>(state.d_stratum(stratum));
  return snap_lambda(v);
}

LambdaView lambda_view(const ImbalanceState& state, const WeightConfig& w) {
  LambdaView out;
  out.values.resize(state.spec().stratum_count());
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = lambda_at(state, w, k);
  return out;
}

LambdaView lambda_from_strata(const CovariateSpec& spec, const WeightConfig& w,
                              std::span<const std::int64_t> d_strata) {
  std::int64_t overall = 0;
  std::vector<std::int64_t> margins(spec.margin_count(), 0);
  for (std::size_t k = 0; k < spec.stratum_count(); ++k) {
    overall += d_strata[k];
    for (std::size_t i = 0; i < spec.covariate_count(); ++i) {
      margins[spec.margin_slot(k, i)] += d_strata[k];
    }
  }
  LambdaView out;
  out.values.resize(spec.stratum_count());
  for (std::size_t k = 0; k < spec.stratum_count(); ++k) {
    double v = w.overall() * static_cast<double>(overall);
    for (std::size_t i = 0; i < spec.covariate_count(); ++i) {
      v += w.margin(i) * static_cast<double>(margins[spec.margin_slot(k, i)]);
    }
    v += w.stratum() * static_cast<double>(d_strata[k]);
    out.values[k] = snap_lambda(v);
  }
  return out;
}

bool reconstruct_check(const ImbalanceState& state) {
  const CovariateSpec& spec = state.spec();
  std::int64_t overall = 0;
  std::vector<std::int64_t> margins(spec.margin_count(), 0);
  for (std::size_t k = 0; k < spec.stratum_count(); ++k) {
    overall += state.d_stratum(k);
    for (std::size_t i = 0; i < spec.covariate_count(); ++i) {
      margins[spec.margin_slot(k, i)] += state.d_stratum(k);
    }
  }
  if (overall != state.d_overall()) return false;
  for (std::size_t j = 0; j < margins.size(); ++j) {
    if (margins[j] != state.d_margin(j)) return false;
  }
  return true;
}

bool parity_invariants_hold(const ImbalanceState& state) {
  std::int64_t total = 0;
  for (std::size_t k = 0; k < state.spec().stratum_count(); ++k) {
    const std::int64_t d = state.d_stratum(k);
    const std::int64_t c = state.count(k);
    if (std::llabs(d) > c) return false;
    if ((d - c) % 2 != 0) return false;
    total += c;
  }
  if (total != state.n()) return false;
  return (state.d_overall() - state.n()) % 2 == 0;
}

MultiArmState::MultiArmState(CovariateSpec spec, std::size_t arms)
    : spec_(std::move(spec)),
      arms_(arms),
      n_strata_(arms * spec_.stratum_count(), 0),
      n_margins_(arms * spec_.margin_count(), 0),
      n_overall_(arms, 0),
      stratum_totals_(spec_.stratum_count(), 0),
      margin_totals_(spec_.margin_count(), 0) {
  if (arms < 2) throw ConfigError("multi-arm state needs at least 2 treatments");
}

MultiAssignmentRecord MultiArmState::apply(std::size_t stratum, std::size_t treatment) {
  if (stratum >= spec_.stratum_count()) throw RangeError("stratum out of range");
  if (treatment >= arms_) throw RangeError("treatment out of range");
  ++n_;
  ++n_overall_[treatment];
  ++n_strata_[treatment * spec_.stratum_count() + stratum];
  ++stratum_totals_[stratum];
  for (std::size_t i = 0; i < spec_.covariate_count(); ++i) {
    const std::size_t slot = spec_.margin_slot(stratum, i);
    ++n_margins_[treatment * spec_.margin_count() + slot];
    ++margin_totals_[slot];
  }
  return MultiAssignmentRecord{stratum, treatment};
}

void MultiArmState::undo(const MultiAssignmentRecord& record) {
  --n_;
  --n_overall_[record.treatment];
  --n_strata_[record.treatment * spec_.stratum_count() + record.stratum];
  --stratum_totals_[record.stratum];
  for (std::size_t i = 0; i < spec_.covariate_count(); ++i) {
    const std::size_t slot = spec_.margin_slot(record.stratum, i);
    --n_margins_[record.treatment * spec_.margin_count() + slot];
    --margin_totals_[slot];
  }
}

std::vector<double> lambda_multi(const MultiArmState& state, const WeightConfig& w,
                                 std::size_t stratum) {
  const CovariateSpec& spec = state.spec();
  const double arms = static_cast<double>(state.arms());
  std::vector<double> out(state.arms());
  for (std::size_t t = 0; t < state.arms(); ++t) {
    double v = w.overall() * static_cast<double>(state.scaled_overall(t));
    for (std::size_t i = 0; i < spec.covariate_count(); ++i) {
      v += w.margin(i) * static_cast<double>(state.scaled_margin(t, spec.margin_slot(stratum, i)));
    }
    v += w.stratum() * static_cast<double>(state.scaled_stratum(t, stratum));
    out[t] = snap_lambda(v / arms);
  }
  return out;
}

bool multi_invariants_hold(const MultiArmState& state) {
  const CovariateSpec& spec = state.spec();
  const auto arms = static_cast<std::int64_t>(state.arms());
  auto column_ok = [&](auto&& scaled, std::int64_t total) {
    std::int64_t sum = 0;
    for (std::size_t t = 0; t < state.arms(); ++t) {
      const std::int64_t v = scaled(t);
      if ((v + total) % arms != 0) return false;
      sum += v;
    }
    return sum == 0;
  };
  if (!column_ok([&](std::size_t t) { return state.scaled_overall(t); }, state.n())) return false;
  for (std::size_t j = 0; j < spec.margin_count(); ++j) {
    if (!column_ok([&](std::size_t t) { return state.scaled_margin(t, j); },
                   state.margin_total(j))) {
      return false;
    }
  }
  for (std::size_t k = 0; k < spec.stratum_count(); ++k) {
    if (!column_ok([&](std::size_t t) { return state.scaled_stratum(t, k); },
                   state.stratum_total(k))) {
      return false;
    }
    for (std::size_t t = 0; t < state.arms(); ++t) {
      if (state.count_stratum(t, k) < 0) return false;
    }
  }
  return true;
}

}  // namespace carand
