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
#include <set>

#include "carand/covariate_model.hpp"
#include "carand/errors.hpp"
#include "carand/random_stream.hpp"
#include "reference.hpp"

namespace carand {
namespace {

std::vector<StratumIndex> strata(std::initializer_list<std::vector<int>> rows) {
  std::vector<StratumIndex> out;
  for (const auto& r : rows) out.push_back(StratumIndex{r});
  return out;
}

TEST(CovariateSpec, EnumeratesTwoByTwoRowMajor) {
  EXPECT_EQ(enumerate_strata(CovariateSpec({2, 2})), strata({{1, 1}, {1, 2}, {2, 1}, {2, 2}}));
}

TEST(CovariateSpec, EnumeratesSingleCovariate) {
  EXPECT_EQ(enumerate_strata(CovariateSpec({3})), strata({{1}, {2}, {3}}));
}

TEST(CovariateSpec, StratumCountIsProductOfLevels) {
  const CovariateSpec spec({2, 3, 2});
  EXPECT_EQ(spec.stratum_count(), 12u);
  EXPECT_EQ(enumerate_strata(spec).size(), 12u);
  EXPECT_EQ(spec.margin_count(), 7u);
}

TEST(CovariateSpec, EnumerationIsDistinctForManyShapes) {
  for (const std::vector<int>& levels : std::vector<std::vector<int>>{
           {2}, {5}, {2, 2}, {3, 4}, {2, 3, 2}, {4, 2, 3, 2}}) {
    const CovariateSpec spec(levels);
    const auto all = enumerate_strata(spec);
    std::set<std::vector<int>> seen;
    for (const auto& s : all) seen.insert(s.coords);
    EXPECT_EQ(seen.size(), ref::Grid{levels}.strata());
    EXPECT_EQ(all.size(), ref::Grid{levels}.strata());
    for (std::size_t k = 0; k < all.size(); ++k) {
      EXPECT_EQ(spec.flat_index(all[k]), k);
      EXPECT_EQ(spec.stratum_at(k), all[k]);
    }
  }
}

TEST(CovariateSpec, RejectsBadLevels) {
  EXPECT_THROW(CovariateSpec({}), ConfigError);
  EXPECT_THROW(CovariateSpec({2, 1}), ConfigError);
  EXPECT_THROW(CovariateSpec({0}), ConfigError);
}

TEST(CovariateSpec, FlatIndexRejectsOutOfRangeCoordinates) {
  const CovariateSpec spec({2, 3});
  EXPECT_THROW(spec.flat_index(StratumIndex{{3, 1}}), RangeError);
  EXPECT_THROW(spec.flat_index(StratumIndex{{1, 0}}), RangeError);
  EXPECT_THROW(spec.flat_index(StratumIndex{{1}}), RangeError);
}

TEST(MarginsOf, Examples) {
  EXPECT_EQ(margins_of(CovariateSpec({2, 2}), StratumIndex{{1, 2}}),
            (std::vector<MarginIndex>{{1, 1}, {2, 2}}));
  EXPECT_EQ(margins_of(CovariateSpec({3}), StratumIndex{{3}}), (std::vector<MarginIndex>{{1, 3}}));
  EXPECT_EQ(margins_of(CovariateSpec({2, 3, 2}), StratumIndex{{2, 1, 2}}),
            (std::vector<MarginIndex>{{1, 2}, {2, 1}, {3, 2}}));
}

TEST(MarginsOf, ConsistentWithCoordinates) {
  const CovariateSpec spec({3, 2, 4});
  for (const auto& s : enumerate_strata(spec)) {
    const auto margins = margins_of(spec, s);
    ASSERT_EQ(margins.size(), s.coords.size());
    const std::size_t flat = spec.flat_index(s);
    for (std::size_t i = 0; i < margins.size(); ++i) {
      EXPECT_EQ(margins[i].covariate, static_cast<int>(i) + 1);
      EXPECT_EQ(margins[i].level, s.coords[i]);
      EXPECT_EQ(spec.margin_slot(flat, i), spec.margin_flat(margins[i]));
      EXPECT_EQ(spec.margin_at(spec.margin_slot(flat, i)), margins[i]);
    }
  }
  EXPECT_THROW(margins_of(spec, StratumIndex{{4, 1, 1}}), RangeError);
}

TEST(StratumDistribution, Validation) {
  EXPECT_THROW(StratumDistribution({0.5, 0.4}), ConfigError);
  EXPECT_THROW(StratumDistribution({1.0, 0.0}), ConfigError);
  EXPECT_THROW(StratumDistribution({1.2, -0.2}), ConfigError);
  EXPECT_THROW(StratumDistribution({}), ConfigError);
  EXPECT_NO_THROW(StratumDistribution({0.25, 0.25, 0.25, 0.25}));
  EXPECT_NO_THROW(StratumDistribution::uniform(7));
}

TEST(SamplePatient, DegenerateDistributionAlwaysPicksItsStratum) {
  const StratumDistribution dist({1.0});
  RandomStream rng(1, 2);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_patient(dist, rng), 0u);
}

TEST(SamplePatient, FairSplitFrequencyWithinTolerance) {
  const StratumDistribution dist({0.5, 0.5});
  RandomStream rng(20130917, 0);
  const int draws = 1000000;
  int first = 0;
  for (int i = 0; i < draws; ++i) first += sample_patient(dist, rng) == 0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(first) / draws, 0.5, 0.002);
}

TEST(SamplePatient, EveryStratumWithinThreeSigma) {
  const std::vector<double> probs{0.1, 0.2, 0.3, 0.05, 0.15, 0.2};
  const StratumDistribution dist(probs);
  RandomStream rng(77, 5);
  const int draws = 400000;
  std::vector<int> hits(probs.size(), 0);
  for (int i = 0; i < draws; ++i) ++hits[sample_patient(dist, rng)];
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double sd = std::sqrt(probs[k] * (1 - probs[k]) / draws);
    EXPECT_NEAR(static_cast<double>(hits[k]) / draws, probs[k], 3 * sd) << "stratum " << k;
  }
}

TEST(SamplePatient, SameSeedSameSequence) {
  const StratumDistribution dist({0.2, 0.3, 0.5});
  RandomStream a(99, 3);
  RandomStream b(99, 3);
  RandomStream c(99, 4);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = sample_patient(dist, a);
    EXPECT_EQ(x, sample_patient(dist, b));
    differs |= x != sample_patient(dist, c);
  }
  EXPECT_TRUE(differs);
}

TEST(RandomStream, UniformIndexIsInRangeAndCoversValues) {
  RandomStream rng(5, 5);
  std::vector<int> hits(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const auto v = rng.uniform_index(6);
    ASSERT_LT(v, 6u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_NEAR(h, 10000, 400);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace carand
