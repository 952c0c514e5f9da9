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

#include "carand/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carand/errors.hpp"

namespace carand {

double StateDistribution::total_mass() const {
  double sum = 0.0;
  for (const auto& [key, p] : mass) sum += p;
  return sum;
}

std::string encode_state(std::span<const std::int64_t> values) {
  std::string key(values.size() * 2, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::int64_t v = values[i];
    if (v < std::numeric_limits<std::int16_t>::min() || v > std::numeric_limits<std::int16_t>::max()) {
      throw RangeError("state value does not fit the int16 encoding");
    }
    const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
    key[2 * i] = static_cast<char>(u & 0xFF);
    key[2 * i + 1] = static_cast<char>(u >> 8);
  }
  return key;
}

std::vector<std::int64_t> decode_state(std::string_view key) {
  std::vector<std::int64_t> out(key.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto lo = static_cast<std::uint16_t>(static_cast<unsigned char>(key[2 * i]));
    const auto hi = static_cast<std::uint16_t>(static_cast<unsigned char>(key[2 * i + 1]));
    out[i] = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
  }
  return out;
}

namespace {

double binomial(double n, double k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

}  // namespace

double estimate_state_count(const DesignConfig& design, std::int64_t n_max) {
  const double m = static_cast<double>(design.spec.stratum_count());
  if (design.multi_arm()) {
    // states are determined by the T·m cell counts summing to n
    const double cells = static_cast<double>(design.arms()) * m;
    return binomial(static_cast<double>(n_max) + cells - 1, cells - 1);
  }
  // lattice points of Z^m with L1 norm <= n
  double total = 1.0;
  for (std::int64_t j = 1; j <= n_max; ++j) {
    for (std::int64_t k = 1; k <= std::min<std::int64_t>(j, static_cast<std::int64_t>(m)); ++k) {
      total += binomial(m, static_cast<double>(k)) * std::pow(2.0, static_cast<double>(k)) *
               binomial(static_cast<double>(j - 1), static_cast<double>(k - 1));
    }
  }
  return total;
}

namespace {

void check_guard(const DesignConfig& design, std::int64_t n_max, const OracleLimits& limits) {
  if (n_max < 0) throw ConfigError("oracle: n must be >= 0");
  const std::size_t m = design.spec.stratum_count();
  bool ok;
  std::string rule;
  if (design.multi_arm()) {
    ok = design.arms() * m <= limits.max_cells_multi_arm && n_max <= limits.max_n_multi_arm;
    rule = "T*m <= " + std::to_string(limits.max_cells_multi_arm) +
           " and n <= " + std::to_string(limits.max_n_multi_arm);
  } else {
    ok = m <= limits.max_strata_two_arm && n_max <= limits.max_n_two_arm;
    rule = "m <= " + std::to_string(limits.max_strata_two_arm) +
           " and n <= " + std::to_string(limits.max_n_two_arm);
  }
  if (!ok) {
    const double estimate = estimate_state_count(design, n_max);
    std::ostringstream msg;
    msg << "oracle refused: state space guard requires " << rule << " (m=" << m
        << ", n=" << n_max << ", up to ~" << estimate << " states)";
    throw GuardError(msg.str(), estimate);
  }
}

struct MultiScratch {
  std::vector<std::int64_t> overall;
  std::vector<std::int64_t> margins;
};

}  // namespace

std::vector<StateDistribution> propagate(const DesignConfig& design, std::int64_t n_max,
                                         const OracleLimits& limits) {
  check_guard(design, n_max, limits);
  const CovariateSpec& spec = design.spec;
  const std::size_t m = spec.stratum_count();
  const std::size_t mc = spec.margin_count();
  const std::size_t rows = design.multi_arm() ? design.arms() : 1;
  const auto scale = static_cast<std::int64_t>(design.multi_arm() ? design.arms() : 1);
  const WeightConfig& w = design.weights;

  std::vector<StateDistribution> out;
  out.reserve(static_cast<std::size_t>(n_max) + 1);
  StateDistribution start;
  start.rows = rows;
  start.scale = scale;
  start.mass.emplace(encode_state(std::vector<std::int64_t>(rows * m, 0)), 1.0);
  out.push_back(std::move(start));

  MultiScratch scratch;
  for (std::int64_t step = 1; step <= n_max; ++step) {
    const StateDistribution& prev = out.back();
    StateDistribution next;
    next.n = step;
    next.rows = rows;
    next.scale = scale;
    next.mass.reserve(prev.mass.size() * 2);

    for (const auto& [key, mass] : prev.mass) {
      std::vector<std::int64_t> state = decode_state(key);

      if (!design.multi_arm()) {
        const LambdaView lambda = lambda_from_strata(spec, w, state);
        for (std::size_t k = 0; k < m; ++k) {
          const double p1 = (step == 1) ? 0.5 : design.g()(4.0 * lambda.values[k]);
          const double pk = design.dist[k];
          state[k] += 1;
          next.mass[encode_state(state)] += mass * pk * p1;
          state[k] -= 2;
          next.mass[encode_state(state)] += mass * pk * (1.0 - p1);
          state[k] += 1;
        }
        continue;
      }

      // multi-arm: rows are treatments, values are T·D_t(k)
      scratch.overall.assign(rows, 0);
      scratch.margins.assign(rows * mc, 0);
      for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t k = 0; k < m; ++k) {
          const std::int64_t v = state[t * m + k];
          scratch.overall[t] += v;
          for (std::size_t i = 0; i < spec.covariate_count(); ++i) {
            scratch.margins[t * mc + spec.margin_slot(k, i)] += v;
          }
        }
      }
      std::vector<double> lambdas(rows);
      for (std::size_t k = 0; k < m; ++k) {
        std::vector<double> probs;
        if (step == 1) {
          probs.assign(rows, 1.0 / static_cast<double>(rows));
        } else {
          for (std::size_t t = 0; t < rows; ++t) {
            double v = w.overall() * static_cast<double>(scratch.overall[t]);
            for (std::size_t i = 0; i < spec.covariate_count(); ++i) {
              v += w.margin(i) * static_cast<double>(scratch.margins[t * mc + spec.margin_slot(k, i)]);
            }
            v += w.stratum() * static_cast<double>(state[t * m + k]);
            lambdas[t] = snap_lambda(v / static_cast<double>(scale));
          }
          probs = ranked_probs_expected(lambdas, design.multi_probs());
        }
        const double pk = design.dist[k];
        for (std::size_t t = 0; t < rows; ++t) {
          for (std::size_t h = 0; h < rows; ++h) state[h * m + k] += (h == t) ? scale - 1 : -1;
          next.mass[encode_state(state)] += mass * pk * probs[t];
          for (std::size_t h = 0; h < rows; ++h) state[h * m + k] -= (h == t) ? scale - 1 : -1;
        }
      }
    }
    out.push_back(std::move(next));
  }
  return out;
}

Statistic parse_statistic(std::string_view text, const CovariateSpec& spec, std::size_t rows) {
  Statistic stat;
  std::string body(text);
  if (const auto at = body.find('@'); at != std::string::npos) {
    const std::string arm = body.substr(at + 1);
    body.resize(at);
    std::size_t t = 0;
    try {
      t = std::stoul(arm);
    } catch (const std::exception&) {
      throw ConfigError("statistic '" + std::string(text) + "': bad treatment suffix");
    }
    if (t < 1 || t > rows) {
      throw ConfigError("statistic '" + std::string(text) + "': treatment outside 1.." +
                        std::to_string(rows));
    }
    stat.row = t - 1;
  }
  std::vector<std::string> parts;
  std::stringstream ss(body);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  auto number = [&](const std::string& s) -> long {
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("statistic '" + std::string(text) + "': '" + s + "' is not an integer");
    }
  };
  if (parts.size() == 1 && parts[0] == "abs_overall") {
    stat.kind = Statistic::Kind::kAbsOverall;
  } else if (parts.size() == 3 && parts[0] == "abs_margin") {
    stat.kind = Statistic::Kind::kAbsMargin;
    try {
      stat.index = spec.margin_flat(MarginIndex{static_cast<int>(number(parts[1])),
                                                static_cast<int>(number(parts[2]))});
    } catch (const RangeError& e) {
      throw ConfigError("statistic '" + std::string(text) + "': " + e.what());
    }
  } else if (parts.size() == 2 && (parts[0] == "abs_stratum" || parts[0] == "square_stratum")) {
    stat.kind = parts[0] == "abs_stratum" ? Statistic::Kind::kAbsStratum
                                          : Statistic::Kind::kSquareStratum;
    const long k = number(parts[1]);
    if (k < 0 || static_cast<std::size_t>(k) >= spec.stratum_count()) {
      throw ConfigError("statistic '" + std::string(text) + "': stratum outside 0.." +
                        std::to_string(spec.stratum_count() - 1));
    }
    stat.index = static_cast<std::size_t>(k);
  } else {
    throw ConfigError("unknown statistic '" + std::string(text) +
                      "' (expected abs_overall, abs_margin:i:k, abs_stratum:f or square_stratum:f)");
  }
  return stat;
}

std::string to_string(const Statistic& stat, const CovariateSpec& spec) {
  std::string s;
  switch (stat.kind) {
    case Statistic::Kind::kAbsOverall:
      s = "abs_overall";
      break;
    case Statistic::Kind::kAbsMargin: {
      const MarginIndex mi = spec.margin_at(stat.index);
      s = "abs_margin:" + std::to_string(mi.covariate) + ":" + std::to_string(mi.level);
      break;
    }
    case Statistic::Kind::kAbsStratum:
      s = "abs_stratum:" + std::to_string(stat.index);
      break;
    case Statistic::Kind::kSquareStratum:
      s = "square_stratum:" + std::to_string(stat.index);
      break;
  }
  if (stat.row > 0) s += "@" + std::to_string(stat.row + 1);
  return s;
}

double statistic_value(const Statistic& stat, const CovariateSpec& spec, std::size_t rows,
                       std::int64_t scale, std::span<const std::int64_t> state) {
  const std::size_t m = spec.stratum_count();
  if (stat.row >= rows) throw ConfigError("statistic treatment out of range");
  const std::span<const std::int64_t> row = state.subspan(stat.row * m, m);
  std::int64_t v = 0;
  switch (stat.kind) {
    case Statistic::Kind::kAbsOverall:
      for (std::int64_t x : row) v += x;
      break;
    case Statistic::Kind::kAbsMargin: {
      const MarginIndex mi = spec.margin_at(stat.index);
      const auto i = static_cast<std::size_t>(mi.covariate - 1);
      for (std::size_t k = 0; k < m; ++k) {
        if (spec.margin_slot(k, i) == stat.index) v += row[k];
      }
      break;
    }
    case Statistic::Kind::kAbsStratum:
    case Statistic::Kind::kSquareStratum:
      v = row[stat.index];
      break;
  }
  const double d = static_cast<double>(v) / static_cast<double>(scale);
  return stat.kind == Statistic::Kind::kSquareStratum ? d * d : d;
}

double exact_moment(const StateDistribution& dist, const CovariateSpec& spec,
                    const Statistic& stat, double r) {
  double acc = 0.0;
  for (const auto& [key, p] : dist.mass) {
    const std::vector<std::int64_t> state = decode_state(key);
    const double v = statistic_value(stat, spec, dist.rows, dist.scale, state);
    acc += p * std::pow(std::abs(v), r);
  }
  return acc;
}

}  // namespace carand
