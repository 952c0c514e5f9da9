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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "carand/carand.h"

namespace {

constexpr const char* kUsage =
    "usage: carand <simulate|oracle|verify|classify> [--config FILE | --preset NAME]\n"
    "              [--out-dir DIR] [--seed N] [--workers N]\n"
    "       carand oracle ... --n N --stat STAT [--r R]\n"
    "run 'carand <subcommand> --help' for details\n";

struct Common {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> workers;
};

void add_common(CLI::App* sub, Common& c) {
  auto* cfg = sub->add_option("--config", c.config_path, "JSON run configuration")
                  ->check(CLI::ExistingFile);
  sub->add_option("--preset", c.preset, "built-in design (pocock-simon, hu-hu, stratified, "
                                        "efron-overall, multiarm-ps)")
      ->excludes(cfg);
  sub->add_option("--out-dir", c.out_dir, "output directory (overrides the config)");
  sub->add_option("--seed", c.seed, "master seed (overrides the config)");
  sub->add_option("--workers", c.workers,
                  "worker threads, 0 = all cores (falls back to CARAND_WORKERS, then the config)");
}

int report(carand_status status) {
  std::fprintf(stderr, "carand: %s: %s\n", carand_status_name(status), carand_last_error());
  return 1;
}

// Loads the configuration and applies flag and environment overrides.
carand_status load(const Common& c, carand_config** out) {
  carand_status st;
  if (!c.config_path.empty()) {
    st = carand_config_load_file(c.config_path.c_str(), out);
  } else {
    st = carand_config_from_preset(c.preset.empty() ? "pocock-simon" : c.preset.c_str(), out);
  }
  if (st != CARAND_OK) return st;
  if (c.seed) carand_config_set_seed(*out, *c.seed);
  std::optional<std::uint32_t> workers = c.workers;
  if (!workers) {
    if (const char* env = std::getenv("CARAND_WORKERS"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const unsigned long v = std::strtoul(env, &end, 10);
      if (*end != '\0') {
        std::fprintf(stderr, "carand: ignoring non-numeric CARAND_WORKERS=%s\n", env);
      } else {
        workers = static_cast<std::uint32_t>(v);
      }
    }
  }
  if (workers) carand_config_set_workers(*out, *workers);
  if (!c.out_dir.empty()) carand_config_set_out_dir(*out, c.out_dir.c_str());
  return CARAND_OK;
}

std::string out_dir_of(const carand_config* cfg) {
  carand_text* t = nullptr;
  if (carand_config_out_dir(cfg, &t) != CARAND_OK) return "carand-out";
  std::string s = carand_text_data(t);
  carand_text_free(t);
  return s;
}

int emit(carand_status st, carand_text* text) {
  if (st != CARAND_OK) return report(st);
  if (text == nullptr) return 0;
  std::fwrite(carand_text_data(text), 1, carand_text_size(text), stdout);
  carand_text_free(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string known[] = {"simulate", "oracle", "verify", "classify"};
  if (argc < 2) {
    std::fputs(kUsage, stderr);
    return 2;
  }
  const std::string first = argv[1];
  if (first == "--help" || first == "-h") {
    std::fputs(kUsage, stdout);
    return 0;
  }
  if (first == "--version") {
    std::printf("carand %s\n", carand_version());
    return 0;
  }
  if (std::find(std::begin(known), std::end(known), first) == std::end(known)) {
    std::fprintf(stderr, "carand: unknown subcommand '%s'\n%s", first.c_str(), kUsage);
    return 2;
  }

  CLI::App app{"Covariate-adaptive randomization simulator and verifier", "carand"};
  app.require_subcommand(1);
  Common common;
  std::int64_t oracle_n = 0;
  std::string oracle_stat;
  double oracle_r = 1.0;

  auto* simulate = app.add_subcommand("simulate", "run replications; write summary and trajectory CSVs");
  add_common(simulate, common);
  auto* oracle = app.add_subcommand("oracle", "exact moment table from forward propagation");
  add_common(oracle, common);
  oracle->add_option("--n", oracle_n, "largest trial size")->required()->check(CLI::PositiveNumber);
  oracle->add_option("--stat", oracle_stat,
                     "abs_overall | abs_margin:i:k | abs_stratum:f | square_stratum:f, "
                     "optional @t treatment suffix")
      ->required();
  oracle->add_option("--r", oracle_r, "moment order (default 1)");
  auto* verify = app.add_subcommand("verify", "simulate and check predicted growth regimes");
  add_common(verify, common);
  auto* classify = app.add_subcommand("classify", "predicted regime for every imbalance");
  add_common(classify, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  carand_config* cfg = nullptr;
  if (const carand_status st = load(common, &cfg); st != CARAND_OK) return report(st);
  const std::string dir = out_dir_of(cfg);
  int rc = 0;
  carand_text* text = nullptr;
  if (simulate->parsed()) {
    const carand_status st = carand_simulate(cfg, dir.c_str(), &text);
    rc = emit(st, text);
  } else if (oracle->parsed()) {
    const carand_status st = carand_oracle(cfg, oracle_n, oracle_stat.c_str(), oracle_r, &text);
    rc = emit(st, text);
  } else if (classify->parsed()) {
    const carand_status st = carand_classify(cfg, &text);
    rc = emit(st, text);
  } else if (verify->parsed()) {
    int passed = 0;
    const carand_status st = carand_verify(cfg, dir.c_str(), &passed, &text);
    rc = emit(st, text);
    if (rc == 0 && !passed) rc = 1;
  }
  carand_config_free(cfg);
  return rc;
}
