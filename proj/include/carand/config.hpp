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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carand/allocation.hpp"
#include "carand/montecarlo_verify.hpp"

namespace carand {

struct SimulationSettings {
  std::vector<std::int64_t> n_grid{1000, 4000};
  std::uint64_t replications = 10000;
  std::uint64_t seed = 20130917;
  unsigned workers = 0;  // 0 = hardware concurrency
  /// Strata (flat, 0-based) whose final raw values are kept; nullopt = all
  /// strata when m <= 64, none otherwise.
  std::optional<std::vector<std::size_t>> retained_strata;
  bool record_strata = true;
  std::int64_t histogram_bin_width = 1;
  /// Number of leading replications written to the trajectory CSV.
  std::uint64_t export_trajectories = 100;

  friend bool operator==(const SimulationSettings&, const SimulationSettings&) = default;
};

struct VerificationSettings {
  bool enabled = true;
  Tolerances tolerances;

  friend bool operator==(const VerificationSettings&, const VerificationSettings&) = default;
};

struct RunConfig {
  DesignConfig design;
  SimulationSettings simulation;
  VerificationSettings verification;
  std::string out_dir = "carand-out";

  std::vector<std::size_t> effective_retained_strata() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::vector<std::string> preset_names();

/// Built-in designs. `levels` defaults to (2, 2) (multi-arm too).
///   pocock-simon   w_m[i] = 1/I, Efron(0.75)
///   hu-hu          w_s = w_m[i] = 1/(I+1), Efron(0.75)
///   stratified     w_s = 1, Efron(0.75)
///   efron-overall  w_o = 1, Efron(0.75)
///   multiarm-ps    w_m[i] = 1/I, T = 3, probs (0.6, 0.3, 0.1)
/// Throws ConfigError for unknown names.
RunConfig preset_config(std::string_view name, std::optional<std::vector<int>> levels = {});

/// Parses a JSON document. A top-level "preset" key seeds every field from
/// that preset before the document's own keys are applied. Throws
/// ConfigError listing every problem found (parse errors carry line and
/// column).
RunConfig load_config_text(std::string_view text, std::string_view origin = "<string>");
RunConfig load_config_file(const std::filesystem::path& path);

/// Fully explicit JSON; load_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

}  // namespace carand
