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

#include "carand/carand.h"

#include <filesystem>
#include <ios>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "carand/commands.hpp"
#include "carand/config.hpp"
#include "carand/errors.hpp"
#include "carand/random_stream.hpp"
#include "carand/trial_engine.hpp"

struct carand_config {
  carand::RunConfig config;
};

struct carand_text {
  std::string data;
};

struct carand_trial {
  carand::DesignConfig design;
  carand::RandomStream rng;
  carand::TrialRunner runner;

  carand_trial(const carand::DesignConfig& d, std::uint64_t seed, std::uint64_t rep)
      : design(d), rng(seed, rep), runner(design, rng) {}
  carand_trial(const carand_trial&) = delete;
  carand_trial& operator=(const carand_trial&) = delete;
};

namespace {

thread_local std::string g_last_error;

carand_status fail(carand_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

std::string joined(const carand::ConfigError& e) {
  std::string out;
  for (const auto& p : e.problems()) out += (out.empty() ? "" : "\n") + p;
  return out.empty() ? e.what() : out;
}

// Runs `f`, translating exceptions into status codes.
template <typename F>
carand_status guarded(F&& f) {
  try {
    f();
    return CARAND_OK;
  } catch (const carand::ConfigError& e) {
    return fail(CARAND_ERR_CONFIG, joined(e));
  } catch (const carand::GuardError& e) {
    return fail(CARAND_ERR_GUARD, e.what());
  } catch (const carand::RangeError& e) {
    return fail(CARAND_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(CARAND_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(CARAND_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CARAND_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CARAND_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CARAND_ERR_INTERNAL, "unknown error");
  }
}

carand_status null_arg(const char* name) {
  return fail(CARAND_ERR_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

carand_text* make_text(std::string s) { return new carand_text{std::move(s)}; }

}  // namespace

extern "C" {

const char* carand_version(void) { return "0.1.0"; }

const char* carand_last_error(void) { return g_last_error.c_str(); }

const char* carand_status_name(carand_status status) {
  switch (status) {
    case CARAND_OK:
      return "ok";
    case CARAND_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case CARAND_ERR_CONFIG:
      return "configuration error";
    case CARAND_ERR_GUARD:
      return "state-space guard exceeded";
    case CARAND_ERR_IO:
      return "i/o error";
    case CARAND_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* carand_text_data(const carand_text* text) { return text ? text->data.c_str() : ""; }

size_t carand_text_size(const carand_text* text) { return text ? text->data.size() : 0; }

void carand_text_free(carand_text* text) { delete text; }

carand_status carand_config_load_file(const char* path, carand_config** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = new carand_config{carand::load_config_file(path)}; });
}

carand_status carand_config_load_string(const char* json, carand_config** out) {
  if (json == nullptr) return null_arg("json");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = new carand_config{carand::load_config_text(json)}; });
}

carand_status carand_config_from_preset(const char* name, carand_config** out) {
  if (name == nullptr) return null_arg("name");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = new carand_config{carand::preset_config(name)}; });
}

void carand_config_free(carand_config* config) { delete config; }

carand_status carand_config_set_seed(carand_config* config, uint64_t seed) {
  if (config == nullptr) return null_arg("config");
  config->config.simulation.seed = seed;
  return CARAND_OK;
}

carand_status carand_config_set_workers(carand_config* config, uint32_t workers) {
  if (config == nullptr) return null_arg("config");
  config->config.simulation.workers = workers;
  return CARAND_OK;
}

carand_status carand_config_set_out_dir(carand_config* config, const char* dir) {
  if (config == nullptr) return null_arg("config");
  if (dir == nullptr) return null_arg("dir");
  return guarded([&] { config->config.out_dir = dir; });
}

carand_status carand_config_out_dir(const carand_config* config, carand_text** out) {
  if (config == nullptr) return null_arg("config");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = make_text(config->config.out_dir); });
}

carand_status carand_config_serialize(const carand_config* config, carand_text** out) {
  if (config == nullptr) return null_arg("config");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = make_text(carand::serialize_config(config->config)); });
}

carand_status carand_preset_names(carand_text** out) {
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    std::string s;
    for (const auto& n : carand::preset_names()) s += n + "\n";
    *out = make_text(std::move(s));
  });
}

carand_status carand_classify(const carand_config* config, carand_text** csv) {
  if (config == nullptr) return null_arg("config");
  if (csv == nullptr) return null_arg("csv");
  return guarded([&] { *csv = make_text(carand::run_classify(config->config)); });
}

carand_status carand_oracle(const carand_config* config, int64_t n_max, const char* stat,
                            double r, carand_text** csv) {
  if (config == nullptr) return null_arg("config");
  if (stat == nullptr) return null_arg("stat");
  if (csv == nullptr) return null_arg("csv");
  return guarded([&] { *csv = make_text(carand::run_oracle(config->config, n_max, stat, r)); });
}

carand_status carand_simulate(const carand_config* config, const char* out_dir,
                              carand_text** summary) {
  if (config == nullptr) return null_arg("config");
  if (summary == nullptr) return null_arg("summary");
  return guarded([&] {
    const std::string dir = out_dir ? out_dir : config->config.out_dir;
    *summary = make_text(carand::run_simulate(config->config, dir));
  });
}

carand_status carand_verify(const carand_config* config, const char* out_dir, int* passed,
                            carand_text** table) {
  if (config == nullptr) return null_arg("config");
  if (passed == nullptr) return null_arg("passed");
  if (table == nullptr) return null_arg("table");
  return guarded([&] {
    const std::string dir = out_dir ? out_dir : config->config.out_dir;
    carand::VerifyOutcome outcome = carand::run_verify(config->config, dir);
    *passed = outcome.passed ? 1 : 0;
    *table = make_text(std::move(outcome.table));
  });
}

carand_status carand_trial_new(const carand_config* config, uint64_t replication_id,
                               carand_trial** out) {
  if (config == nullptr) return null_arg("config");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = new carand_trial(config->config.design, config->config.simulation.seed, replication_id);
  });
}

void carand_trial_free(carand_trial* trial) { delete trial; }

carand_status carand_trial_step(carand_trial* trial, size_t* stratum, int* treatment) {
  if (trial == nullptr) return null_arg("trial");
  return guarded([&] {
    const carand::Enrolment e = trial->runner.step();
    if (stratum) *stratum = e.stratum;
    if (treatment) *treatment = static_cast<int>(e.treatment) + 1;
  });
}

int64_t carand_trial_patients(const carand_trial* trial) {
  return trial ? trial->runner.patients() : 0;
}

size_t carand_trial_strata(const carand_trial* trial) {
  return trial ? trial->design.spec.stratum_count() : 0;
}

namespace {

carand_status check_treatment(const carand_trial* trial, int treatment) {
  if (!trial->runner.multi_arm()) return CARAND_OK;
  if (treatment < 1 || static_cast<std::size_t>(treatment) > trial->design.arms()) {
    return fail(CARAND_ERR_INVALID_ARGUMENT,
                "treatment must be in [1, " + std::to_string(trial->design.arms()) + "]");
  }
  return CARAND_OK;
}

}  // namespace

carand_status carand_trial_stratum_imbalance(const carand_trial* trial, size_t stratum,
                                             int treatment, double* out) {
  if (trial == nullptr) return null_arg("trial");
  if (out == nullptr) return null_arg("out");
  if (stratum >= trial->design.spec.stratum_count()) {
    return fail(CARAND_ERR_INVALID_ARGUMENT, "stratum out of range");
  }
  if (const carand_status s = check_treatment(trial, treatment); s != CARAND_OK) return s;
  if (trial->runner.multi_arm()) {
    *out = trial->runner.multi_state().d_stratum(static_cast<std::size_t>(treatment - 1), stratum);
  } else {
    *out = static_cast<double>(trial->runner.two_arm_state().d_stratum(stratum));
  }
  return CARAND_OK;
}

carand_status carand_trial_overall_imbalance(const carand_trial* trial, int treatment,
                                             double* out) {
  if (trial == nullptr) return null_arg("trial");
  if (out == nullptr) return null_arg("out");
  if (const carand_status s = check_treatment(trial, treatment); s != CARAND_OK) return s;
  if (trial->runner.multi_arm()) {
    const auto& st = trial->runner.multi_state();
    *out = static_cast<double>(st.scaled_overall(static_cast<std::size_t>(treatment - 1))) /
           static_cast<double>(st.arms());
  } else {
    *out = static_cast<double>(trial->runner.two_arm_state().d_overall());
  }
  return CARAND_OK;
}

}  // extern "C"
