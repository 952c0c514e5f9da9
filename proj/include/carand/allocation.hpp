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
#include <variant>
#include <vector>

#include "carand/covariate_model.hpp"
#include "carand/imbalance_core.hpp"
#include "carand/random_stream.hpp"

namespace carand {

/// Efron's biased coin: q for x > 0, 1/2 at 0, p for x < 0.
struct EfronBiasedCoin {
  double p = 0.75;
  friend bool operator==(const EfronBiasedCoin&, const EfronBiasedCoin&) = default;
};

/// 1 / (1 + exp(beta·x)).
struct LogisticCoin {
  double beta = 1.0;
  friend bool operator==(const LogisticCoin&, const LogisticCoin&) = default;
};

/// 1/2 - (1/2 - q_min)·x^a / (1 + x^a) for x >= 0, mirrored for x < 0. Decays
/// polynomially towards q_min; a stand-in for an adjustable heavy-tailed coin.
struct HeavyTailCoin {
  double a = 1.0;
  double q_min = 0.1;
  friend bool operator==(const HeavyTailCoin&, const HeavyTailCoin&) = default;
};

/// Two-arm allocation function g. Every accepted parameterization satisfies
/// 0 < g < 1, g(-x) = 1 - g(x), g(x) <= 1/2 for x >= 0 and
/// g(100) < 1/2 - 1e-6.
class GFunction {
 public:
  using Variant = std::variant<EfronBiasedCoin, LogisticCoin, HeavyTailCoin>;

  /// Smallest allowed gap between g at +infinity and 1/2.
  static constexpr double kMinTailGap = 1e-5;
  /// g is clamped into [kFloor, 1 - kFloor] so it never reaches 0 or 1.
  static constexpr double kFloor = 1e-12;

  static GFunction efron(double p = 0.75);
  static GFunction logistic(double beta);
  static GFunction heavy_tail(double a, double q_min);

  const Variant& variant() const noexcept { return v_; }
  std::string name() const;

  double operator()(double x) const;

  friend bool operator==(const GFunction&, const GFunction&) = default;

 private:
  explicit GFunction(Variant v) : v_(v) {}
  double eval_nonnegative(double x) const;

  Variant v_;
};

inline double g_eval(const GFunction& g, double x) { return g(x); }

/// Imb for a hypothetical assignment of the next patient in `stratum`:
/// w_o(D±1)² + Σ_i w_m[i](D(i;k_i)±1)² + w_s(D(k)±1)², + for arm 1.
double imb_measure(const ImbalanceState& state, const WeightConfig& w, std::size_t stratum,
                   Arm arm);

/// Imb(arm 1) - Imb(arm 2), evaluated from the squares. Equals 4·Λ(stratum).
double delta_imb(const ImbalanceState& state, const WeightConfig& w, std::size_t stratum);

/// Probability that the next patient in `stratum` goes to arm 1: g(4·Λ(stratum)).
double assign_prob_two_arm(const ImbalanceState& state, const WeightConfig& w,
                           const GFunction& g, std::size_t stratum);

/// Ordered multi-arm probabilities p_1 >= ... >= p_T, nonnegative, summing to
/// one within 1e-12, with p_1 > p_T > 0.
class MultiArmProbs {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit MultiArmProbs(std::vector<double> probs);

  std::size_t arms() const noexcept { return probs_.size(); }
  std::span<const double> values() const noexcept { return probs_; }
  double operator[](std::size_t rank) const noexcept { return probs_[rank]; }

  friend bool operator==(const MultiArmProbs&, const MultiArmProbs&) = default;

 private:
  std::vector<double> probs_;
};

/// Two Λ values closer than this are a tie.
inline constexpr double kTieTolerance = 1e-9;

/// Ranks treatments by Λ ascending (smallest Λ gets p_1) and returns each
/// treatment's probability. Each block of tied treatments is ordered by one
/// uniformly random permutation drawn from `rng`; no draws are made when
/// there are no ties.
std::vector<double> ranked_probs(std::span<const double> lambdas, const MultiArmProbs& probs,
                                 RandomStream& rng);

/// Same ranking, but each tied treatment receives the average of the
/// probabilities over its block's rank positions (the expectation over the
/// random tie-break).
std::vector<double> ranked_probs_expected(std::span<const double> lambdas,
                                          const MultiArmProbs& probs);

std::vector<double> assign_probs_multi(const MultiArmState& state, const WeightConfig& w,
                                       const MultiArmProbs& probs, std::size_t stratum,
                                       RandomStream& rng);

std::vector<double> assign_probs_multi_expected(const MultiArmState& state,
                                                const WeightConfig& w,
                                                const MultiArmProbs& probs,
                                                std::size_t stratum);

/// Imb_t for the next patient in `stratum` computed directly from the
/// potential imbalances of all T treatments.
double imb_multi(const MultiArmState& state, const WeightConfig& w, std::size_t stratum,
                 std::size_t treatment);

/// Everything needed to run the procedure.
struct DesignConfig {
  using Policy = std::variant<GFunction, MultiArmProbs>;

  DesignConfig(CovariateSpec spec, StratumDistribution dist, WeightConfig weights,
               Policy policy);

  bool multi_arm() const noexcept { return std::holds_alternative<MultiArmProbs>(policy); }
  std::size_t arms() const noexcept {
    return multi_arm() ? std::get<MultiArmProbs>(policy).arms() : 2;
  }
  const GFunction& g() const { return std::get<GFunction>(policy); }
  const MultiArmProbs& multi_probs() const { return std::get<MultiArmProbs>(policy); }

  /// Stable 64-bit digest of every design parameter.
  std::uint64_t digest() const;

  friend bool operator==(const DesignConfig&, const DesignConfig&) = default;

  CovariateSpec spec;
  StratumDistribution dist;
  WeightConfig weights;
  Policy policy;
};

}  // namespace carand
