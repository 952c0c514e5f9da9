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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "carand/errors.hpp"
#include "carand/montecarlo_verify.hpp"
#include "reference.hpp"

namespace carand {
namespace {

DesignConfig pocock_simon(double p = 0.75) {
  return DesignConfig(CovariateSpec({2, 2}), StratumDistribution::uniform(4),
                      WeightConfig(0.0, {0.5, 0.5}, 0.0), GFunction::efron(p));
}

DesignConfig hu_hu() {
  return DesignConfig(CovariateSpec({2, 2}), StratumDistribution::uniform(4),
                      WeightConfig(0.3, {0.2, 0.2}, 0.3), GFunction::efron(0.85));
}

DesignConfig efron_overall() {
  return DesignConfig(CovariateSpec({2, 2}), StratumDistribution::uniform(4),
                      WeightConfig(1.0, {0.0, 0.0}, 0.0), GFunction::efron(0.75));
}

DesignConfig multi_arm() {
  return DesignConfig(CovariateSpec({2, 2}), StratumDistribution::uniform(4),
                      WeightConfig(0.0, {0.5, 0.5}, 0.0), MultiArmProbs({0.6, 0.3, 0.1}));
}

const ScopeKey kOverall{Scope::kOverall, 0, 0};

ScopeKey stratum(std::size_t k, std::size_t row = 0) { return {Scope::kStratum, row, k}; }
ScopeKey margin(std::size_t j, std::size_t row = 0) { return {Scope::kMargin, row, j}; }

TEST(Simulate, SingleReplicationHasNoSpread) {
  const std::vector<std::int64_t> grid{5, 10};
  const SimulationSummary s = simulate_many(pocock_simon(), grid, 1, 3, 1);
  EXPECT_EQ(s.replications(), 1u);
  for (const ScopeKey& key : s.keys()) {
    for (std::int64_t n : grid) {
      const MomentAccumulator* acc = s.find(n, key);
      ASSERT_NE(acc, nullptr);
      EXPECT_EQ(acc->count(), 1u);
      EXPECT_EQ(acc->histogram().size(), 1u);
      EXPECT_DOUBLE_EQ(acc->mean_square(), acc->mean() * acc->mean());
    }
  }
}

TEST(Simulate, SplitRangesMergeToTheFullRun) {
  const std::vector<std::int64_t> grid{10, 50, 200};
  SimulationOptions opts;
  opts.retained_strata = {0, 3};
  for (const DesignConfig& d : {pocock_simon(), multi_arm()}) {
    const SimulationSummary full = simulate_many(d, grid, 1000, 42, 1, opts);
    SimulationSummary a = simulate_range(d, grid, 0, 500, 42, 1, opts);
    const SimulationSummary b = simulate_range(d, grid, 500, 1000, 42, 1, opts);
    SimulationSummary ab = a;
    ab.merge(b);
    EXPECT_EQ(ab, full);
    SimulationSummary ba = b;
    ba.merge(a);
    EXPECT_EQ(ba, full);
    // associativity over three pieces
    const SimulationSummary p1 = simulate_range(d, grid, 0, 300, 42, 1, opts);
    const SimulationSummary p2 = simulate_range(d, grid, 300, 700, 42, 1, opts);
    const SimulationSummary p3 = simulate_range(d, grid, 700, 1000, 42, 1, opts);
    SimulationSummary left = p1;
    left.merge(p2);
    left.merge(p3);
    SimulationSummary right = p2;
    right.merge(p3);
    SimulationSummary right_total = p1;
    right_total.merge(right);
    EXPECT_EQ(left, full);
    EXPECT_EQ(right_total, full);
  }
}

TEST(Simulate, WorkerCountDoesNotChangeTheResult) {
  const std::vector<std::int64_t> grid{20, 100};
  SimulationOptions opts;
  opts.retained_strata = {1};
  const SimulationSummary one = simulate_many(hu_hu(), grid, 301, 9, 1, opts);
  for (unsigned workers : {2u, 3u, 8u, 0u}) {
    EXPECT_EQ(simulate_many(hu_hu(), grid, 301, 9, workers, opts), one) << workers;
  }
}

TEST(Simulate, MergeRejectsMismatchedRuns) {
  const std::vector<std::int64_t> grid{10};
  SimulationSummary a = simulate_many(pocock_simon(), grid, 10, 1, 1);
  EXPECT_THROW(a.merge(simulate_many(pocock_simon(), grid, 10, 2, 1)), ConfigError);
  EXPECT_THROW(a.merge(simulate_many(pocock_simon(0.8), grid, 10, 1, 1)), ConfigError);
  const std::vector<std::int64_t> other_grid{10, 20};
  EXPECT_THROW(a.merge(simulate_many(pocock_simon(), other_grid, 10, 1, 1)), ConfigError);
}

TEST(Simulate, RejectsBadGrids) {
  const std::vector<std::int64_t> empty;
  const std::vector<std::int64_t> unsorted{10, 5};
  EXPECT_THROW(simulate_many(pocock_simon(), empty, 10, 1, 1), ConfigError);
  EXPECT_THROW(simulate_many(pocock_simon(), unsorted, 10, 1, 1), ConfigError);
  const std::vector<std::int64_t> grid{4};
  EXPECT_THROW(simulate_range(pocock_simon(), grid, 10, 5, 1, 1), ConfigError);
}

TEST(Simulate, EfronOverallMeanAtTwoMatchesOracle) {
  const std::vector<std::int64_t> grid{2, 3};
  const SimulationSummary s = simulate_many(efron_overall(), grid, 100000, 17, 1);
  const MomentAccumulator* a2 = s.find(2, kOverall);
  const MomentAccumulator* a3 = s.find(3, kOverall);
  const double r = 100000.0;
  const double se2 = std::sqrt((a2->mean_square() - std::pow(a2->mean_abs_pow(1), 2)) / r);
  const double se3 = std::sqrt((a3->mean_square() - std::pow(a3->mean_abs_pow(1), 2)) / r);
  EXPECT_NEAR(a2->mean_abs_pow(1), 0.5, 3 * se2);
  EXPECT_NEAR(a3->mean_abs_pow(1), 1.125, 3 * se3);
  EXPECT_EQ(s.invariant_violations(), 0u);
}

TEST(Simulate, RetainedStrataKeepRawFinalValues) {
  const std::vector<std::int64_t> grid{10, 40};
  SimulationOptions opts;
  opts.retained_strata = {2};
  const SimulationSummary s = simulate_many(multi_arm(), grid, 50, 3, 1, opts);
  for (std::size_t t = 0; t < 3; ++t) {
    const auto raw = s.raw_samples(stratum(2, t));
    ASSERT_TRUE(raw.has_value());
    ASSERT_EQ(raw->size(), 50u);
    double sum_sq = 0.0;
    for (double v : *raw) sum_sq += v * v;
    EXPECT_NEAR(sum_sq / 50.0, s.find(40, stratum(2, t))->mean_square(3), 1e-9);
  }
  EXPECT_FALSE(s.raw_samples(stratum(1)).has_value());
  EXPECT_FALSE(s.raw_samples(kOverall).has_value());
}

TEST(MomentAccumulator, MomentsAndQuantiles) {
  MomentAccumulator acc;
  for (std::int64_t x : {-3, -1, 0, 2, 2, 4}) acc.push(x);
  EXPECT_EQ(acc.count(), 6u);
  EXPECT_DOUBLE_EQ(acc.mean(), 4.0 / 6);
  EXPECT_DOUBLE_EQ(acc.mean_square(), 34.0 / 6);
  EXPECT_DOUBLE_EQ(acc.mean_abs_pow(1), 12.0 / 6);
  EXPECT_DOUBLE_EQ(acc.mean_abs_pow(3), (27 + 1 + 8 + 8 + 64) / 6.0);
  EXPECT_DOUBLE_EQ(acc.mean_abs_pow(4), (81 + 1 + 16 + 16 + 256) / 6.0);
  EXPECT_DOUBLE_EQ(acc.mean_abs_pow(0.5), (std::sqrt(3) + 1 + 0 + 2 * std::sqrt(2) + 2) / 6.0);
  EXPECT_DOUBLE_EQ(acc.mean_abs_pow(0), 1.0);
  EXPECT_DOUBLE_EQ(acc.mean(3), 4.0 / 18);
  EXPECT_DOUBLE_EQ(acc.quantile(0.5), 0.0);
  EXPECT_DOUBLE_EQ(acc.quantile(0.0), -3.0);
  EXPECT_DOUBLE_EQ(acc.quantile(1.0), 4.0);
}

TEST(MomentAccumulator, LargeValuesStayExact) {
  MomentAccumulator a;
  MomentAccumulator b;
  const std::int64_t big = 3000000;
  a.push(big);
  a.push(-big);
  b.push(1);
  MomentAccumulator ab = a;
  ab.merge(b);
  MomentAccumulator ba = b;
  ba.merge(a);
  EXPECT_EQ(ab, ba);
  EXPECT_DOUBLE_EQ(ab.mean(), 1.0 / 3);
  EXPECT_DOUBLE_EQ(ab.mean_abs_pow(4), (2.0 * std::pow(3e6, 4) + 1) / 3);
}

TEST(ClassifyRegimes, PocockSimonMarginsBoundedStrataGrow) {
  const RegimePrediction p = classify_regimes(pocock_simon());
  EXPECT_EQ(p.entries.size(), 1u + 4u + 4u);
  for (const auto& e : p.entries) {
    switch (e.key.scope) {
      case Scope::kOverall:
        EXPECT_EQ(e.regime, Regime::kBounded);
        EXPECT_EQ(to_string(e.tag), "Thm3.1(iii)");
        break;
      case Scope::kMargin:
        EXPECT_EQ(e.regime, Regime::kBounded);
        EXPECT_EQ(to_string(e.tag), "Cor3.2");
        break;
      case Scope::kStratum:
        EXPECT_EQ(e.regime, Regime::kSqrtN);
        EXPECT_EQ(to_string(e.tag), "Thm3.2(vi)");
        break;
    }
  }
}

TEST(ClassifyRegimes, StratumWeightBoundsEverything) {
  for (const auto& e : classify_regimes(hu_hu()).entries) {
    EXPECT_EQ(e.regime, Regime::kBounded);
    if (e.key.scope == Scope::kStratum) {
      EXPECT_EQ(to_string(e.tag), "Thm3.1(i)");
    }
    if (e.key.scope == Scope::kMargin) {
      EXPECT_EQ(to_string(e.tag), "Thm3.1(ii)");
    }
  }
}

TEST(ClassifyRegimes, UnweightedCovariateMarginsGrow) {
  const DesignConfig d(CovariateSpec({2, 3}), StratumDistribution::uniform(6),
                       WeightConfig(0.0, {1.0, 0.0}, 0.0), GFunction::efron(0.75));
  const RegimePrediction p = classify_regimes(d);
  for (std::size_t j = 0; j < 5; ++j) {
    const RegimeEntry* e = p.find(margin(j));
    ASSERT_NE(e, nullptr);
    if (j < 2) {
      EXPECT_EQ(e->regime, Regime::kBounded);
      EXPECT_EQ(to_string(e->tag), "Cor3.2");
    } else {
      EXPECT_EQ(e->regime, Regime::kSqrtN);
      EXPECT_EQ(to_string(e->tag), "Thm3.3");
    }
  }
}

TEST(ClassifyRegimes, MultiArmCoversEveryTreatment) {
  const RegimePrediction p = classify_regimes(multi_arm());
  EXPECT_EQ(p.entries.size(), 3u * (1 + 4 + 4));
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(to_string(p.find(ScopeKey{Scope::kOverall, t, 0})->tag), "Thm4.1(iii)");
    EXPECT_EQ(p.find(margin(1, t))->regime, Regime::kBounded);
    EXPECT_EQ(to_string(p.find(margin(1, t))->tag), "Thm4.1(ii)");
    EXPECT_EQ(p.find(stratum(3, t))->regime, Regime::kSqrtN);
    EXPECT_EQ(to_string(p.find(stratum(3, t))->tag), "Thm4.1(iv)");
  }
  const DesignConfig d(CovariateSpec({2, 2}), StratumDistribution::uniform(4),
                       WeightConfig(1.0, {0.0, 0.0}, 0.0), MultiArmProbs({0.5, 0.5 - 1e-3, 1e-3}));
  const RegimePrediction q = classify_regimes(d);
  EXPECT_EQ(to_string(q.find(margin(0, 2))->tag), "Thm4.1(v)");
  EXPECT_EQ(q.find(margin(0, 2))->regime, Regime::kSqrtN);
}

TEST(ClassifyRegimes, DependsOnlyOnWhichWeightsAreZero) {
  const CovariateSpec spec({2, 3});
  const auto dist = StratumDistribution::uniform(6);
  const DesignConfig a(spec, dist, WeightConfig(0.1, {0.6, 0.0}, 0.3), GFunction::efron(0.75));
  const DesignConfig b(spec, dist, WeightConfig(0.5, {0.2, 0.0}, 0.3), GFunction::logistic(2.0));
  const DesignConfig c(spec, StratumDistribution({0.5, 0.1, 0.1, 0.1, 0.1, 0.1}),
                       WeightConfig(0.0, {0.01, 0.0}, 0.99), GFunction::heavy_tail(2, 0.3));
  const auto pa = classify_regimes(a);
  const auto pb = classify_regimes(b);
  const auto pc = classify_regimes(c);
  ASSERT_EQ(pa.entries.size(), pb.entries.size());
  for (std::size_t i = 0; i < pa.entries.size(); ++i) {
    EXPECT_EQ(pa.entries[i].regime, pb.entries[i].regime);
    EXPECT_EQ(pa.entries[i].regime, pc.entries[i].regime);
    EXPECT_EQ(pa.entries[i].tag, pb.entries[i].tag);
  }
}

TEST(EstimateSigma2, ZeroSamplesGiveZeroAndUnitRatio) {
  SummaryLayout layout;
  layout.checkpoints = {2, 4};
  layout.include_strata = false;
  const CovariateSpec spec({2});
  SimulationSummary s(spec, layout, 0, 0);
  Trajectory t;
  t.checkpoints = {2, 4};
  t.snapshots = {Snapshot{2, {0}, {0, 0}, {}, {}}, Snapshot{4, {0}, {0, 0}, {}, {}}};
  for (int i = 0; i < 10; ++i) s.add(t);
  const Sigma2Estimate e = estimate_sigma2(s, kOverall, 2, 4);
  EXPECT_EQ(e.sigma2_hat, 0.0);
  EXPECT_EQ(e.flatness_ratio, 1.0);
  EXPECT_EQ(e.standard_error, 0.0);
}

TEST(EstimateSigma2, RatioAndSlopeFromSecondMoments) {
  SummaryLayout layout;
  layout.checkpoints = {10, 40};
  layout.include_strata = false;
  const CovariateSpec spec({2});
  SimulationSummary s(spec, layout, 0, 0);
  Trajectory t;
  t.checkpoints = {10, 40};
  for (std::int64_t a : {2, -2}) {
    for (std::int64_t b : {4, -4}) {
      t.snapshots = {Snapshot{10, {a}, {0, 0}, {}, {}}, Snapshot{40, {b}, {0, 0}, {}, {}}};
      s.add(t);
    }
  }
  const Sigma2Estimate e = estimate_sigma2(s, kOverall, 10, 40);
  EXPECT_DOUBLE_EQ(e.sigma2_hat, (16.0 - 4.0) / 30.0);
  EXPECT_DOUBLE_EQ(e.flatness_ratio, 4.0);
  EXPECT_DOUBLE_EQ(e.standard_error, 0.0);
  EXPECT_THROW(estimate_sigma2(s, kOverall, 10, 15), ConfigError);
  EXPECT_THROW(estimate_sigma2(s, kOverall, 30, 40), ConfigError);
  EXPECT_THROW(estimate_sigma2(s, kOverall, 40, 10), ConfigError);
}

TEST(KsDistance, NormalSamplesAreClose) {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(10000);
  for (double& v : x) v = normal(gen);
  EXPECT_LT(ks_distance_normal(x), 0.02);
  // a shifted sample is far
  for (double& v : x) v += 0.5;
  EXPECT_GT(ks_distance_normal(x), 0.15);
}

TEST(KsDistance, ConstantSamplesAreHalfAway) {
  const std::vector<double> zeros(1000, 0.0);
  const auto ks = ks_normality(zeros, 1.0, 100);
  ASSERT_TRUE(ks.has_value());
  EXPECT_NEAR(*ks, 0.5, 1e-12);
  EXPECT_FALSE(ks_normality(zeros, 0.0, 100).has_value());
  EXPECT_FALSE(ks_normality({}, 1.0, 100).has_value());
}

TEST(KsDistance, SingleSampleHandValue) {
  const std::vector<double> one{0.0};
  EXPECT_NEAR(ks_distance_normal(one), 0.5, 1e-15);
  const std::vector<double> two{-1.0, 1.0};
  // F(-1) ≈ 0.158655; steps at 1/2 and 1
  EXPECT_NEAR(ks_distance_normal(two), 0.5 - 0.15865525393145707, 1e-12);
}

TEST(DriftDiagnostic, ExpectedDriftMatchesEnumeration) {
  std::mt19937_64 gen(7);
  const CovariateSpec spec({2, 3});
  const std::vector<std::pair<WeightConfig, GFunction>> designs{
      {WeightConfig(0.0, {0.5, 0.5}, 0.0), GFunction::efron(0.75)},
      {WeightConfig(0.3, {0.2, 0.2}, 0.3), GFunction::logistic(0.8)},
      {WeightConfig(0.1, {0.6, 0.0}, 0.3), GFunction::heavy_tail(1.5, 0.2)},
      {WeightConfig(1.0, {0.0, 0.0}, 0.0), GFunction::efron(0.6)},
  };
  const StratumDistribution dist({0.1, 0.2, 0.1, 0.25, 0.15, 0.2});
  for (const auto& [w, g] : designs) {
    for (int trial = 0; trial < 250; ++trial) {
      std::vector<std::int64_t> d;
      std::vector<std::int64_t> counts;
      ref::random_strata(gen, 6, 30, d, counts);
      const ImbalanceState state = ImbalanceState::from_strata(spec, d, counts);
      const DriftDiagnostic diag = drift_diagnostic(state, w, g, dist);
      EXPECT_NEAR(diag.enumerated_drift, diag.expected_drift, 1e-9 * (1 + diag.v));
      // 0 <= 1/2 - g(4|Λ|) <= 1/2
      double weighted_abs = 0.0;
      for (std::size_t k = 0; k < 6; ++k) weighted_abs += std::abs(lambda_at(state, w, k)) * dist[k];
      EXPECT_GE(diag.s, 0.0);
      EXPECT_LE(diag.s, 0.5 * weighted_abs + 1e-12);
    }
  }
}

TEST(DriftDiagnostic, EfronQuarterCoinGivesClosedFormS) {
  // Efron p = 3/4: every nonzero Λ contributes |Λ|·(1/2 - 1/4)·p(k).
  std::mt19937_64 gen(8);
  const CovariateSpec spec({2, 2});
  const WeightConfig w(0.0, {0.5, 0.5}, 0.0);
  const StratumDistribution dist({0.4, 0.1, 0.3, 0.2});
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::int64_t> d;
    std::vector<std::int64_t> counts;
    ref::random_strata(gen, 4, 20, d, counts);
    const ImbalanceState state = ImbalanceState::from_strata(spec, d, counts);
    double closed = 0.0;
    for (std::size_t k = 0; k < 4; ++k) closed += 0.25 * std::abs(lambda_at(state, w, k)) * dist[k];
    EXPECT_NEAR(drift_diagnostic(state, w, GFunction::efron(0.75), dist).s, closed, 1e-12);
  }
}

TEST(DriftDiagnostic, ZeroStateDriftsUpByOne) {
  const CovariateSpec spec({2, 2});
  const ImbalanceState zero(spec);
  const DriftDiagnostic diag =
      drift_diagnostic(zero, WeightConfig(0.3, {0.2, 0.2}, 0.3), GFunction::efron(0.75),
                       StratumDistribution::uniform(4));
  EXPECT_EQ(diag.v, 0.0);
  EXPECT_EQ(diag.s, 0.0);
  EXPECT_DOUBLE_EQ(diag.expected_drift, 1.0);
  EXPECT_DOUBLE_EQ(diag.enumerated_drift, 1.0);
}

TEST(DriftDiagnostic, FarStateDriftsDown) {
  const CovariateSpec spec({2, 2});
  const ImbalanceState far = ImbalanceState::from_strata(spec, {20, 20, 20, 20}, {20, 20, 20, 20});
  const DriftDiagnostic diag =
      drift_diagnostic(far, WeightConfig(0.3, {0.2, 0.2}, 0.3), GFunction::efron(0.75),
                       StratumDistribution::uniform(4));
  EXPECT_LT(diag.expected_drift, 0.0);
  EXPECT_NEAR(diag.enumerated_drift, diag.expected_drift, 1e-9 * diag.v);
}

TEST(BuildReport, BoundedDesignPasses) {
  const std::vector<std::int64_t> grid{200, 800};
  const DesignConfig d = hu_hu();
  const SimulationSummary s = simulate_many(d, grid, 2000, 11, 1);
  const VerificationReport r = build_report(s, classify_regimes(d), Tolerances{});
  EXPECT_EQ(r.n_a, 200);
  EXPECT_EQ(r.n_b, 800);
  EXPECT_EQ(r.rows.size(), 9u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.verdict, Verdict::kPass) << to_string(row.key.scope) << row.key.index << " "
                                            << row.note;
  }
  EXPECT_TRUE(r.all_passed());
}

TEST(BuildReport, MislabelledStrataFail) {
  // Pocock–Simon strata grow like sqrt(n); claiming they are bounded must fail.
  const std::vector<std::int64_t> grid{200, 800};
  const DesignConfig d = pocock_simon();
  const SimulationSummary s = simulate_many(d, grid, 2000, 12, 1);
  RegimePrediction wrong = classify_regimes(d);
  for (auto& e : wrong.entries) {
    if (e.key.scope == Scope::kStratum) e.regime = Regime::kBounded;
  }
  const VerificationReport r = build_report(s, wrong, Tolerances{});
  for (const auto& row : r.rows) {
    if (row.key.scope == Scope::kStratum) {
      EXPECT_EQ(row.verdict, Verdict::kFail);
    }
  }
  EXPECT_FALSE(r.all_passed());
  // the honest prediction passes the growth checks for strata
  const VerificationReport honest = build_report(s, classify_regimes(d), Tolerances{});
  for (const auto& row : honest.rows) {
    EXPECT_EQ(row.verdict, Verdict::kPass) << to_string(row.key.scope) << row.key.index << " "
                                            << row.note;
  }
}

TEST(BuildReport, BoundedClaimOnGrowingMarginsFails) {
  // w_m = (1, 0): the second covariate's margins are not controlled.
  const std::vector<std::int64_t> grid{200, 800};
  const DesignConfig d(CovariateSpec({2, 2}), StratumDistribution::uniform(4),
                       WeightConfig(0.0, {1.0, 0.0}, 0.0), GFunction::efron(0.75));
  const SimulationSummary s = simulate_many(d, grid, 2000, 13, 1);
  RegimePrediction wrong = classify_regimes(d);
  for (auto& e : wrong.entries) e.regime = Regime::kBounded;
  const VerificationReport r = build_report(s, wrong, Tolerances{});
  EXPECT_EQ(r.find(margin(2))->verdict, Verdict::kFail);
  EXPECT_EQ(r.find(margin(3))->verdict, Verdict::kFail);
  EXPECT_EQ(r.find(margin(0))->verdict, Verdict::kPass);
}

TEST(BuildReport, MissingDataIsNeverAPass) {
  const std::vector<std::int64_t> grid{100};
  const DesignConfig d = pocock_simon();
  const SimulationSummary s = simulate_many(d, grid, 20, 1, 1);
  const VerificationReport r = build_report(s, classify_regimes(d), Tolerances{});
  EXPECT_FALSE(r.rows.empty());
  for (const auto& row : r.rows) EXPECT_EQ(row.verdict, Verdict::kInsufficientData);
  EXPECT_FALSE(r.all_passed());

  const std::vector<std::int64_t> two{50, 200};
  SimulationOptions no_strata;
  no_strata.record_strata = false;
  const SimulationSummary t = simulate_many(d, two, 20, 1, 1, no_strata);
  const VerificationReport q = build_report(t, classify_regimes(d), Tolerances{});
  EXPECT_EQ(q.find(stratum(0))->verdict, Verdict::kInsufficientData);
  EXPECT_FALSE(q.all_passed());

  EXPECT_FALSE(VerificationReport{}.all_passed());
  EXPECT_EQ(to_string(Verdict::kInsufficientData), "insufficient_data");
}

}  // namespace
}  // namespace carand
