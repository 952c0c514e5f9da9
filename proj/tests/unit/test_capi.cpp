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
#include <filesystem>
#include <string>

#include "carand/carand.h"

namespace {

std::string take(carand_text* t) {
  std::string s(carand_text_data(t), carand_text_size(t));
  carand_text_free(t);
  return s;
}

struct ConfigHandle {
  carand_config* p = nullptr;
  ~ConfigHandle() { carand_config_free(p); }
};

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(carand_version(), "0.1.0");
  EXPECT_STREQ(carand_status_name(CARAND_OK), "ok");
  EXPECT_STREQ(carand_status_name(CARAND_ERR_GUARD), "state-space guard exceeded");
}

TEST(CApi, NullArgumentsAreRejected) {
  EXPECT_EQ(carand_config_from_preset(nullptr, nullptr), CARAND_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(carand_last_error()), "");
  carand_text* t = nullptr;
  EXPECT_EQ(carand_classify(nullptr, &t), CARAND_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(t, nullptr);
  carand_config_free(nullptr);
  carand_text_free(nullptr);
  carand_trial_free(nullptr);
}

TEST(CApi, ConfigErrorsCarryEveryProblem) {
  carand_config* c = nullptr;
  EXPECT_EQ(carand_config_load_string(R"({"covariates": {"levels": [2, 2]},
      "weights": {"overall": 0.5, "margins": [0.2, 0.2]},
      "policy": {"type": "efron", "p": 0.3}})",
                                      &c),
            CARAND_ERR_CONFIG);
  EXPECT_EQ(c, nullptr);
  const std::string err = carand_last_error();
  EXPECT_NE(err.find("weights"), std::string::npos) << err;
  EXPECT_NE(err.find("policy"), std::string::npos) << err;
  EXPECT_EQ(carand_config_from_preset("nope", &c), CARAND_ERR_CONFIG);
  EXPECT_EQ(carand_config_load_file("/nonexistent.json", &c), CARAND_ERR_CONFIG);
}

TEST(CApi, PresetSerializeAndReload) {
  ConfigHandle a;
  ASSERT_EQ(carand_config_from_preset("hu-hu", &a.p), CARAND_OK);
  ASSERT_EQ(carand_config_set_seed(a.p, 99), CARAND_OK);
  ASSERT_EQ(carand_config_set_out_dir(a.p, "somewhere"), CARAND_OK);
  carand_text* t = nullptr;
  ASSERT_EQ(carand_config_serialize(a.p, &t), CARAND_OK);
  const std::string json = take(t);
  EXPECT_NE(json.find("\"seed\": 99"), std::string::npos) << json;
  ConfigHandle b;
  ASSERT_EQ(carand_config_load_string(json.c_str(), &b.p), CARAND_OK);
  ASSERT_EQ(carand_config_out_dir(b.p, &t), CARAND_OK);
  EXPECT_EQ(take(t), "somewhere");
  ASSERT_EQ(carand_preset_names(&t), CARAND_OK);
  EXPECT_EQ(take(t), "pocock-simon\nhu-hu\nstratified\nefron-overall\nmultiarm-ps\n");
}

TEST(CApi, ClassifyAndOracle) {
  ConfigHandle c;
  ASSERT_EQ(carand_config_from_preset("efron-overall", &c.p), CARAND_OK);
  carand_text* t = nullptr;
  ASSERT_EQ(carand_classify(c.p, &t), CARAND_OK);
  EXPECT_NE(take(t).find("overall,-,bounded,Thm3.1(iii)"), std::string::npos);
  ASSERT_EQ(carand_oracle(c.p, 3, "abs_overall", 1.0, &t), CARAND_OK);
  EXPECT_NE(take(t).find("3,abs_overall,1,1.125\n"), std::string::npos);
  EXPECT_EQ(carand_oracle(c.p, 40, "abs_overall", 1.0, &t), CARAND_ERR_GUARD);
  EXPECT_NE(std::string(carand_last_error()).find("oracle refused"), std::string::npos);
  EXPECT_EQ(carand_oracle(c.p, 3, "abs_whatever", 1.0, &t), CARAND_ERR_CONFIG);
  EXPECT_EQ(carand_oracle(c.p, 3, nullptr, 1.0, &t), CARAND_ERR_INVALID_ARGUMENT);
}

TEST(CApi, TwoArmTrialStepping) {
  ConfigHandle c;
  ASSERT_EQ(carand_config_from_preset("pocock-simon", &c.p), CARAND_OK);
  carand_trial* trial = nullptr;
  ASSERT_EQ(carand_trial_new(c.p, 0, &trial), CARAND_OK);
  EXPECT_EQ(carand_trial_strata(trial), 4u);
  double sum = 0.0;
  for (int j = 0; j < 100; ++j) {
    size_t k = 99;
    int t = 0;
    ASSERT_EQ(carand_trial_step(trial, &k, &t), CARAND_OK);
    EXPECT_LT(k, 4u);
    EXPECT_TRUE(t == 1 || t == 2);
  }
  EXPECT_EQ(carand_trial_patients(trial), 100);
  for (size_t k = 0; k < 4; ++k) {
    double d = 0.0;
    ASSERT_EQ(carand_trial_stratum_imbalance(trial, k, 0, &d), CARAND_OK);
    sum += d;
  }
  double overall = 0.0;
  ASSERT_EQ(carand_trial_overall_imbalance(trial, 0, &overall), CARAND_OK);
  EXPECT_EQ(sum, overall);
  double d = 0.0;
  EXPECT_EQ(carand_trial_stratum_imbalance(trial, 4, 0, &d), CARAND_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(carand_trial_step(trial, nullptr, nullptr), CARAND_OK);
  carand_trial_free(trial);
}

TEST(CApi, TrialsAreReproducible) {
  ConfigHandle c;
  ASSERT_EQ(carand_config_from_preset("multiarm-ps", &c.p), CARAND_OK);
  carand_trial* a = nullptr;
  carand_trial* b = nullptr;
  ASSERT_EQ(carand_trial_new(c.p, 5, &a), CARAND_OK);
  ASSERT_EQ(carand_trial_new(c.p, 5, &b), CARAND_OK);
  for (int j = 0; j < 200; ++j) {
    size_t ka = 0;
    size_t kb = 0;
    int ta = 0;
    int tb = 0;
    carand_trial_step(a, &ka, &ta);
    carand_trial_step(b, &kb, &tb);
    ASSERT_EQ(ka, kb);
    ASSERT_EQ(ta, tb);
    EXPECT_TRUE(ta >= 1 && ta <= 3);
  }
  double total = 0.0;
  for (int t = 1; t <= 3; ++t) {
    double v = 0.0;
    ASSERT_EQ(carand_trial_overall_imbalance(a, t, &v), CARAND_OK);
    total += v;
  }
  EXPECT_NEAR(total, 0.0, 1e-12);
  double v = 0.0;
  EXPECT_EQ(carand_trial_overall_imbalance(a, 4, &v), CARAND_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(carand_trial_overall_imbalance(a, 0, &v), CARAND_ERR_INVALID_ARGUMENT);
  carand_trial_free(a);
  carand_trial_free(b);
}

TEST(CApi, VerifyReportsPassFlag) {
  ConfigHandle c;
  ASSERT_EQ(carand_config_load_string(R"({"preset": "hu-hu",
      "simulation": {"n_grid": [200, 800], "replications": 1000, "workers": 1,
                     "export_trajectories": 0}})",
                                      &c.p),
            CARAND_OK);
  const auto dir = std::filesystem::temp_directory_path() / "carand_capi_verify";
  std::filesystem::remove_all(dir);
  int passed = -1;
  carand_text* t = nullptr;
  ASSERT_EQ(carand_verify(c.p, dir.string().c_str(), &passed, &t), CARAND_OK);
  const std::string table = take(t);
  EXPECT_EQ(passed, 1) << table;
  EXPECT_NE(table.find("9/9 checks passed"), std::string::npos) << table;
  EXPECT_TRUE(std::filesystem::exists(dir / "report.csv"));
  std::filesystem::remove_all(dir);
}

}  // namespace
