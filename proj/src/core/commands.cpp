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

#include "carand/commands.hpp"

#include <algorithm>
#include <fstream>
#include <ios>
#include <sstream>

#include "carand/errors.hpp"
#include "carand/exact_oracle.hpp"
#include "carand/random_stream.hpp"
#include "carand/report_io.hpp"

namespace carand {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure(path.string() + ": cannot open for writing");
  return out;
}

SimulationOptions options_for(const RunConfig& config) {
  SimulationOptions o;
  o.record_strata = config.simulation.record_strata;
  o.bin_width = config.simulation.histogram_bin_width;
  o.retained_strata = config.effective_retained_strata();
  return o;
}

std::size_t rows_of(const DesignConfig& d) { return d.multi_arm() ? d.arms() : 1; }

}  // namespace

std::string run_simulate(const RunConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const DesignConfig& design = config.design;
  const SimulationSettings& sim = config.simulation;
  const std::uint64_t digest = design.digest();

  const SimulationSummary summary = simulate_many(design, sim.n_grid, sim.replications, sim.seed,
                                                  sim.workers, options_for(config));
  {
    auto out = open_out(out_dir / "summary.csv");
    write_summary_csv(out, summary);
  }

  // Leading replications are re-run on their own streams for the trajectory
  // export; they are bit-identical to the ones folded into the summary.
  const std::uint64_t exported = std::min(sim.export_trajectories, sim.replications);
  std::vector<Trajectory> trajectories;
  const TrialOptions trial_opts{sim.record_strata, false};
  for (std::uint64_t rep = 0; rep < exported; ++rep) {
    RandomStream rng(sim.seed, rep);
    trajectories.push_back(run_trial(design, sim.n_grid.back(), sim.n_grid, rng, trial_opts));
  }
  {
    auto out = open_out(out_dir / "trajectories.csv");
    write_trajectory_csv(out, trajectories, design.spec, digest);
  }

  bool state_written = false;
  if (!design.multi_arm()) {
    RandomStream rng(sim.seed, 0);
    const ImbalanceState state = run_two_arm_state(design, sim.n_grid.back(), rng);
    auto out = open_out(out_dir / "state_rep0.csv");
    write_state_csv(out, state, digest, sim.seed);
    state_written = true;
  }

  std::ostringstream text;
  text << "simulated " << summary.replications() << " replications to n=" << sim.n_grid.back()
       << " (design " << digest_hex(digest) << ", seed " << sim.seed << ")\n";
  text << "invariant violations: " << summary.invariant_violations() << '\n';
  text << "wrote " << (out_dir / "summary.csv").string() << ", "
       << (out_dir / "trajectories.csv").string();
  if (state_written) text << ", " << (out_dir / "state_rep0.csv").string();
  text << '\n';
  return text.str();
}

std::string run_oracle(const RunConfig& config, std::int64_t n_max, const std::string& stat,
                       double r) {
  const DesignConfig& design = config.design;
  if (n_max < 1) throw ConfigError("oracle: --n must be >= 1");
  if (!(r >= 0.0)) throw ConfigError("oracle: --r must be >= 0");
  const Statistic statistic = parse_statistic(stat, design.spec, rows_of(design));
  const std::vector<StateDistribution> dists = propagate(design, n_max);
  std::vector<OracleRow> rows;
  const std::string name = to_string(statistic, design.spec);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    rows.push_back({n, name, r, exact_moment(dists[static_cast<std::size_t>(n)], design.spec,
                                             statistic, r)});
  }
  std::ostringstream out;
  write_oracle_csv(out, rows, design.digest(), config.simulation.seed);
  return out.str();
}

std::string run_classify(const RunConfig& config) {
  std::ostringstream out;
  write_classify_csv(out, classify_regimes(config.design), config.design.spec,
                     rows_of(config.design), config.design.digest(), config.simulation.seed);
  return out.str();
}

VerifyOutcome run_verify(const RunConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const DesignConfig& design = config.design;
  const SimulationSettings& sim = config.simulation;
  const SimulationSummary summary = simulate_many(design, sim.n_grid, sim.replications, sim.seed,
                                                  sim.workers, options_for(config));
  const VerificationReport report =
      build_report(summary, classify_regimes(design), config.verification.tolerances);
  {
    auto out = open_out(out_dir / "report.csv");
    write_report_csv(out, report, design.spec, rows_of(design), design.digest(), sim.seed);
  }
  {
    auto out = open_out(out_dir / "summary.csv");
    write_summary_csv(out, summary);
  }
  std::ostringstream table;
  write_report_table(table, report, design.spec, rows_of(design));
  if (summary.invariant_violations() != 0) {
    table << "invariant violations: " << summary.invariant_violations() << '\n';
  }
  return {report.all_passed() && summary.invariant_violations() == 0, table.str()};
}

}  // namespace carand
