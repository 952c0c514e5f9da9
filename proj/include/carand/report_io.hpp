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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "carand/exact_oracle.hpp"
#include "carand/imbalance_core.hpp"
#include "carand/montecarlo_verify.hpp"
#include "carand/summary.hpp"
#include "carand/trial_engine.hpp"

namespace carand {

// CSV writers. Every file starts with one "# design_digest=<hex> seed=<n>"
// comment line, then a header row; comma-delimited, '\n'-terminated.

std::string digest_hex(std::uint64_t digest);

void write_provenance(std::ostream& out, std::uint64_t design_digest, std::uint64_t seed);

/// One row per stratum (flat_index, coords, count, d_stratum) after a header
/// block of comment lines carrying n, d_overall and the margins.
void write_state_csv(std::ostream& out, const ImbalanceState& state, std::uint64_t design_digest,
                     std::uint64_t seed);

/// Columns: replication, checkpoint_n, scope, index, value.
void write_trajectory_csv(std::ostream& out, std::span<const Trajectory> trajectories,
                          const CovariateSpec& spec, std::uint64_t design_digest);

void write_summary_csv(std::ostream& out, const SimulationSummary& summary);

/// Columns: scope, index, prediction, justification.
void write_classify_csv(std::ostream& out, const RegimePrediction& prediction,
                        const CovariateSpec& spec, std::size_t rows, std::uint64_t design_digest,
                        std::uint64_t seed);

struct OracleRow {
  std::int64_t n;
  std::string stat;
  double r;
  double value;
};

/// Columns: n, stat, r, value.
void write_oracle_csv(std::ostream& out, std::span<const OracleRow> rows,
                      std::uint64_t design_digest, std::uint64_t seed);

/// Columns: scope, index, prediction, flatness_ratio, sigma2_hat, ks, verdict.
void write_report_csv(std::ostream& out, const VerificationReport& report,
                      const CovariateSpec& spec, std::size_t rows, std::uint64_t design_digest,
                      std::uint64_t seed);

/// Aligned text table for terminals.
void write_report_table(std::ostream& out, const VerificationReport& report,
                        const CovariateSpec& spec, std::size_t rows);

}  // namespace carand
