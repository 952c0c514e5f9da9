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

#include "carand/allocation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "carand/errors.hpp"

namespace carand {

GFunction GFunction::efron(double p) {
  if (!(p >= 0.5 + kMinTailGap && p < 1.0)) {
    throw ConfigError("policy.p: Efron's coin needs 1/2 < p < 1 (and p >= 0.5 + 1e-5), got " +
                      std::to_string(p));
  }
  return GFunction(EfronBiasedCoin{p});
}

GFunction GFunction::logistic(double beta) {
  if (!(beta >= 1e-6) || !std::isfinite(beta)) {
    throw ConfigError("policy.beta: logistic coin needs beta >= 1e-6, got " + std::to_string(beta));
  }
  return GFunction(LogisticCoin{beta});
}

GFunction GFunction::heavy_tail(double a, double q_min) {
  std::vector<std::string> problems;
  if (!(a > 0.0) || !std::isfinite(a)) {
    problems.push_back("policy.a: heavy-tail coin needs a > 0, got " + std::to_string(a));
  }
  if (!(q_min > 0.0 && q_min <= 0.5 - 2 * kMinTailGap)) {
    problems.push_back("policy.q_min: heavy-tail coin needs 0 < q_min < 1/2, got " +
                       std::to_string(q_min));
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return GFunction(HeavyTailCoin{a, q_min});
}

std::string GFunction::name() const {
  struct Namer {
    std::string operator()(const EfronBiasedCoin&) const { return "efron"; }
    std::string operator()(const LogisticCoin&) const { return "logistic"; }
    std::string operator()(const HeavyTailCoin&) const { return "heavytail"; }
  };
  return std::visit(Namer{}, v_);
}

double GFunction::eval_nonnegative(double x) const {
  struct Eval {
    double x;
    double operator()(const EfronBiasedCoin& c) const { return x > 0.0 ? 1.0 - c.p : 0.5; }
    double operator()(const LogisticCoin& c) const {
      const double e = std::exp(-c.beta * x);
      return e / (1.0 + e);
    }
    double operator()(const HeavyTailCoin& c) const {
      if (x == 0.0) return 0.5;
      const double ratio = 1.0 / (1.0 + std::pow(x, -c.a));
      return 0.5 - (0.5 - c.q_min) * ratio;
    }
  };
  return std::clamp(std::visit(Eval{x}, v_), kFloor, 0.5);
}

double GFunction::operator()(double x) const {
  if (x < 0.0) return 1.0 - eval_nonnegative(-x);
  return eval_nonnegative(x);
}

double imb_measure(const ImbalanceState& state, const WeightConfig& w, std::size_t stratum,
                   Arm arm) {
  const CovariateSpec& spec = state.spec();
  const auto s = static_cast<double>(arm_sign(arm));
  auto sq = [](double v) { return v * v; };
  double out = w.overall() * sq(static_cast<double>(state.d_overall()) + s);
  for (std::size_t i = 0; i < spec.covariate_count(); ++i) {
    out += w.margin(i) * sq(static_cast<double>(state.d_margin(spec.margin_slot(stratum, i))) + s);
  }
  out += w.stratum() * sq(static_cast<double>(state.d_stratum(stratum)) + s);
  return out;
}

double delta_imb(const ImbalanceState& state, const WeightConfig& w, std::size_t stratum) {
  return imb_measure(state, w, stratum, Arm::kOne) - imb_measure(state, w, stratum, Arm::kTwo);
}

double assign_prob_two_arm(const ImbalanceState& state, const WeightConfig& w,
                           const GFunction& g, std::size_t stratum) {
  // 4Λ rather than the difference of squares: Λ is snapped to exact zero,
  // so g(0) = 1/2 is not lost to rounding residue
  return g(4.0 * lambda_at(state, w, stratum));
}

MultiArmProbs::MultiArmProbs(std::vector<double> probs) : probs_(std::move(probs)) {
  std::vector<std::string> problems;
  if (probs_.size() < 2) problems.push_back("policy.probs: need at least 2 treatments");
  double sum = 0.0;
  for (std::size_t t = 0; t < probs_.size(); ++t) {
    if (!(probs_[t] >= 0.0) || !std::isfinite(probs_[t])) {
      problems.push_back("policy.probs[" + std::to_string(t) + "]: must be >= 0");
    }
    if (t > 0 && probs_[t] > probs_[t - 1]) {
      problems.push_back("policy.probs: must be non-increasing (p_1 >= p_2 >= ... >= p_T)");
    }
    sum += probs_[t];
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    problems.push_back("policy.probs: must sum to 1 within 1e-12 (sum is " + std::to_string(sum) +
                       ")");
  }
  if (probs_.size() >= 2 && !(probs_.front() > probs_.back() && probs_.back() > 0.0)) {
    problems.push_back("policy.probs: need p_1 > p_T > 0");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

namespace {

std::vector<std::size_t> order_by_lambda(std::span<const double> lambdas) {
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas[a] < lambdas[b]; });
  return order;
}

// [begin, end) rank ranges of tied treatments in `order`.
template <typename F>
void for_each_tie_block(std::span<const double> lambdas, const std::vector<std::size_t>& order,
                        F&& f) {
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    while (end < order.size() &&
           lambdas[order[end]] - lambdas[order[begin]] <= kTieTolerance) {
      ++end;
    }
    f(begin, end);
    begin = end;
  }
}

void check_arms(std::span<const double> lambdas, const MultiArmProbs& probs) {
  if (lambdas.size() != probs.arms()) {
    throw ConfigError("multi-arm: " + std::to_string(lambdas.size()) + " treatments but " +
                      std::to_string(probs.arms()) + " probabilities");
  }
}

}  // namespace

std::vector<double> ranked_probs(std::span<const double> lambdas, const MultiArmProbs& probs,
                                 RandomStream& rng) {
  check_arms(lambdas, probs);
  std::vector<std::size_t> order = order_by_lambda(lambdas);
  for_each_tie_block(lambdas, order, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = end - begin; i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_index(i));
      std::swap(order[begin + i - 1], order[begin + j]);
    }
  });
  std::vector<double> out(lambdas.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) out[order[rank]] = probs[rank];
  return out;
}

std::vector<double> ranked_probs_expected(std::span<const double> lambdas,
                                          const MultiArmProbs& probs) {
  check_arms(lambdas, probs);
  const std::vector<std::size_t> order = order_by_lambda(lambdas);
  std::vector<double> out(lambdas.size());
  for_each_tie_block(lambdas, order, [&](std::size_t begin, std::size_t end) {
    double avg = 0.0;
    for (std::size_t r = begin; r < end; ++r) avg += probs[r];
    avg /= static_cast<double>(end - begin);
    for (std::size_t r = begin; r < end; ++r) out[order[r]] = avg;
  });
  return out;
}

std::vector<double> assign_probs_multi(const MultiArmState& state, const WeightConfig& w,
                                       const MultiArmProbs& probs, std::size_t stratum,
                                       RandomStream& rng) {
  const std::vector<double> lambdas = lambda_multi(state, w, stratum);
  return ranked_probs(lambdas, probs, rng);
}

std::vector<double> assign_probs_multi_expected(const MultiArmState& state,
                                                const WeightConfig& w,
                                                const MultiArmProbs& probs,
                                                std::size_t stratum) {
  const std::vector<double> lambdas = lambda_multi(state, w, stratum);
  return ranked_probs_expected(lambdas, probs);
}

double imb_multi(const MultiArmState& state, const WeightConfig& w, std::size_t stratum,
                 std::size_t treatment) {
  const CovariateSpec& spec = state.spec();
  const auto arms = static_cast<double>(state.arms());
  auto potential = [&](std::int64_t scaled, std::size_t h) {
    const double d = static_cast<double>(scaled) / arms;
    return d + (h == treatment ? 1.0 : 0.0) - 1.0 / arms;
  };
  double out = 0.0;
  for (std::size_t h = 0; h < state.arms(); ++h) {
    const double o = potential(state.scaled_overall(h), h);
    out += w.overall() * o * o;
    for (std::size_t i = 0; i < spec.covariate_count(); ++i) {
      const double m = potential(state.scaled_margin(h, spec.margin_slot(stratum, i)), h);
      out += w.margin(i) * m * m;
    }
    const double s = potential(state.scaled_stratum(h, stratum), h);
    out += w.stratum() * s * s;
  }
  return out;
}

DesignConfig::DesignConfig(CovariateSpec spec_in, StratumDistribution dist_in,
                           WeightConfig weights_in, Policy policy_in)
    : spec(std::move(spec_in)),
      dist(std::move(dist_in)),
      weights(std::move(weights_in)),
      policy(std::move(policy_in)) {
  std::vector<std::string> problems;
  if (dist.size() != spec.stratum_count()) {
    problems.push_back("covariates.probs: " + std::to_string(dist.size()) +
                       " probabilities for " + std::to_string(spec.stratum_count()) + " strata");
  }
  if (weights.margins().size() != spec.covariate_count()) {
    problems.push_back("weights.margins: " + std::to_string(weights.margins().size()) +
                       " weights for " + std::to_string(spec.covariate_count()) + " covariates");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::uint64_t DesignConfig::digest() const {
  std::uint64_t h = 0x63617261'6e640001ULL;
  auto feed = [&h](std::uint64_t v) { h = mix64(h ^ v); };
  auto feed_d = [&feed](double v) { feed(std::bit_cast<std::uint64_t>(v)); };
  feed(spec.covariate_count());
  for (int m : spec.levels()) feed(static_cast<std::uint64_t>(m));
  for (double p : dist.probs()) feed_d(p);
  feed_d(weights.overall());
  for (double m : weights.margins()) feed_d(m);
  feed_d(weights.stratum());
  if (multi_arm()) {
    feed(0x4D41);
    for (double p : multi_probs().values()) feed_d(p);
  } else {
    struct Feed {
      decltype(feed)& f;
      decltype(feed_d)& fd;
      void operator()(const EfronBiasedCoin& c) const { f(1); fd(c.p); }
      void operator()(const LogisticCoin& c) const { f(2); fd(c.beta); }
      void operator()(const HeavyTailCoin& c) const { f(3); fd(c.a); fd(c.q_min); }
    };
    std::visit(Feed{feed, feed_d}, g().variant());
  }
  return h;
}

}  // namespace carand
