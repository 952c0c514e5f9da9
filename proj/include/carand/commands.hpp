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

#include <cstdint>
#include <filesystem>
#include <string>

#include "carand/config.hpp"

namespace carand {

// The four CLI subcommands as library calls. Each returns the text printed on
// stdout; files go under `out_dir`.

/// Writes summary.csv, trajectories.csv and (two-arm, strata recorded)
/// state_rep0.csv; returns a short text summary.
std::string run_simulate(const RunConfig& config, const std::filesystem::path& out_dir);

/// Exact moment table for n = 1..n_max as CSV.
std::string run_oracle(const RunConfig& config, std::int64_t n_max, const std::string& stat,
                       double r);

/// RegimePrediction as CSV.
std::string run_classify(const RunConfig& config);

struct VerifyOutcome {
  bool passed = false;
  std::string table;
};

/// Simulates, builds the report, writes report.csv and summary.csv.
VerifyOutcome run_verify(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace carand
