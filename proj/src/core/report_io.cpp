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

#include "carand/report_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <iomanip>

namespace carand {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

std::string scaled(std::int64_t v, std::int64_t scale) {
  if (scale == 1) return std::to_string(v);
  return num(static_cast<double>(v) / static_cast<double>(scale));
}

}  // namespace

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, digest);
  return buf;
}

void write_provenance(std::ostream& out, std::uint64_t design_digest, std::uint64_t seed) {
  out << "# design_digest=" << digest_hex(design_digest) << " seed=" << seed << '\n';
}

void write_state_csv(std::ostream& out, const ImbalanceState& state, std::uint64_t design_digest,
                     std::uint64_t seed) {
  const CovariateSpec& spec = state.spec();
  write_provenance(out, design_digest, seed);
  out << "# n=" << state.n() << " d_overall=" << state.d_overall() << '\n';
  out << "# margins";
  for (std::size_t j = 0; j < spec.margin_count(); ++j) {
    const MarginIndex mi = spec.margin_at(j);
    out << ' ' << mi.covariate << ';' << mi.level << '=' << state.d_margin(j);
  }
  out << '\n';
  out << "flat_index,coords,count,d_stratum\n";
  for (std::size_t k = 0; k < spec.stratum_count(); ++k) {
    const StratumIndex s = spec.stratum_at(k);
    out << k << ',';
    for (std::size_t i = 0; i < s.coords.size(); ++i) out << (i ? ";" : "") << s.coords[i];
    out << ',' << state.count(k) << ',' << state.d_stratum(k) << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, std::span<const Trajectory> trajectories,
                          const CovariateSpec& spec, std::uint64_t design_digest) {
  write_provenance(out, design_digest, trajectories.empty() ? 0 : trajectories.front().master_seed);
  out << "replication,checkpoint_n,scope,index,value\n";
  for (const Trajectory& t : trajectories) {
    const std::size_t mc = spec.margin_count();
    const std::size_t m = spec.stratum_count();
    for (const Snapshot& s : t.snapshots) {
      auto row = [&](Scope scope, std::size_t r, std::size_t idx, std::int64_t v) {
        out << t.replication_id << ',' << s.n << ',' << to_string(scope) << ','
            << format_index({scope, r, idx}, spec, t.rows) << ',' << scaled(v, t.scale) << '\n';
      };
      for (std::size_t r = 0; r < t.rows; ++r) row(Scope::kOverall, r, 0, s.overall[r]);
      for (std::size_t r = 0; r < t.rows; ++r) {
        for (std::size_t j = 0; j < mc; ++j) row(Scope::kMargin, r, j, s.margins[r * mc + j]);
      }
      if (!s.strata.empty()) {
        for (std::size_t r = 0; r < t.rows; ++r) {
          for (std::size_t k = 0; k < m; ++k) row(Scope::kStratum, r, k, s.strata[r * m + k]);
        }
      }
    }
  }
}

void write_summary_csv(std::ostream& out, const SimulationSummary& summary) {
  write_provenance(out, summary.design_digest(), summary.master_seed());
  out << "checkpoint_n,scope,index,count,mean,mean_square,mean_abs,q05,q50,q95\n";
  const std::int64_t scale = summary.layout().scale;
  for (std::int64_t n : summary.layout().checkpoints) {
    for (const ScopeKey& key : summary.keys()) {
      const MomentAccumulator* acc = summary.find(n, key);
      if (acc == nullptr) continue;
      out << n << ',' << to_string(key.scope) << ','
          << format_index(key, summary.spec(), summary.layout().rows) << ',' << acc->count() << ','
          << num(acc->mean(scale)) << ',' << num(acc->mean_square(scale)) << ','
          << num(acc->mean_abs_pow(1.0, scale)) << ',' << num(acc->quantile(0.05, scale)) << ','
          << num(acc->quantile(0.5, scale)) << ',' << num(acc->quantile(0.95, scale)) << '\n';
    }
  }
}

void write_classify_csv(std::ostream& out, const RegimePrediction& prediction,
                        const CovariateSpec& spec, std::size_t rows, std::uint64_t design_digest,
                        std::uint64_t seed) {
  write_provenance(out, design_digest, seed);
  out << "scope,index,prediction,justification\n";
  for (const RegimeEntry& e : prediction.entries) {
    out << to_string(e.key.scope) << ',' << format_index(e.key, spec, rows) << ','
        << to_string(e.regime) << ',' << to_string(e.tag) << '\n';
  }
}

void write_oracle_csv(std::ostream& out, std::span<const OracleRow> rows,
                      std::uint64_t design_digest, std::uint64_t seed) {
  write_provenance(out, design_digest, seed);
  out << "n,stat,r,value\n";
  for (const OracleRow& r : rows) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out << r.n << ',' << r.stat << ',' << num(r.r) << ',' << buf << '\n';
  }
}

void write_report_csv(std::ostream& out, const VerificationReport& report,
                      const CovariateSpec& spec, std::size_t rows, std::uint64_t design_digest,
                      std::uint64_t seed) {
  write_provenance(out, design_digest, seed);
  out << "scope,index,prediction,flatness_ratio,sigma2_hat,ks,verdict\n";
  for (const ReportRow& r : report.rows) {
    out << to_string(r.key.scope) << ',' << format_index(r.key, spec, rows) << ','
        << to_string(r.prediction) << ',' << opt_num(r.flatness_ratio) << ','
        << opt_num(r.sigma2_hat) << ',' << opt_num(r.ks) << ',' << to_string(r.verdict) << '\n';
  }
}

void write_report_table(std::ostream& out, const VerificationReport& report,
                        const CovariateSpec& spec, std::size_t rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"scope", "index", "prediction", "basis", "flatness", "sigma2_hat", "se", "ks",
                   "verdict", "note"});
  for (const ReportRow& r : report.rows) {
    cells.push_back({to_string(r.key.scope), format_index(r.key, spec, rows),
                     to_string(r.prediction), to_string(r.tag), opt_num(r.flatness_ratio),
                     opt_num(r.sigma2_hat), opt_num(r.sigma2_se), opt_num(r.ks),
                     to_string(r.verdict), r.note});
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  out << "checkpoints n_a=" << report.n_a << " n_b=" << report.n_b << '\n';
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << std::left << std::setw(static_cast<int>(c + 1 < row.size() ? width[c] + 2 : 0))
          << row[c];
    }
    out << '\n';
  }
  std::size_t passed = 0;
  for (const ReportRow& r : report.rows) passed += r.verdict == Verdict::kPass ? 1 : 0;
  out << passed << '/' << report.rows.size() << " checks passed\n";
}

}  // namespace carand
