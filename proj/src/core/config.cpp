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

#include "carand/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "carand/errors.hpp"

namespace carand {

using Json = nlohmann::ordered_json;

std::vector<std::size_t> RunConfig::effective_retained_strata() const {
  if (simulation.retained_strata) return *simulation.retained_strata;
  std::vector<std::size_t> all;
  const std::size_t m = design.spec.stratum_count();
  if (simulation.record_strata && m <= 64) {
    for (std::size_t k = 0; k < m; ++k) all.push_back(k);
  }
  return all;
}

std::vector<std::string> preset_names() {
  return {"pocock-simon", "hu-hu", "stratified", "efron-overall", "multiarm-ps"};
}

RunConfig preset_config(std::string_view name, std::optional<std::vector<int>> levels_in) {
  const std::vector<int> levels = levels_in.value_or(std::vector<int>{2, 2});
  CovariateSpec spec(levels);
  const std::size_t covs = spec.covariate_count();
  const auto I = static_cast<double>(covs);
  StratumDistribution dist = StratumDistribution::uniform(spec.stratum_count());

  auto two_arm = [&](double overall, std::vector<double> margins, double stratum) {
    return RunConfig{DesignConfig(spec, dist, WeightConfig(overall, std::move(margins), stratum),
                                  GFunction::efron(0.75)),
                     {}, {}, "carand-out"};
  };
  if (name == "pocock-simon") return two_arm(0.0, std::vector<double>(covs, 1.0 / I), 0.0);
  if (name == "hu-hu") {
    const double w = 1.0 / (I + 1.0);
    return two_arm(0.0, std::vector<double>(covs, w), w);
  }
  if (name == "stratified") return two_arm(0.0, std::vector<double>(covs, 0.0), 1.0);
  if (name == "efron-overall") return two_arm(1.0, std::vector<double>(covs, 0.0), 0.0);
  if (name == "multiarm-ps") {
    return RunConfig{
        DesignConfig(spec, dist, WeightConfig(0.0, std::vector<double>(covs, 1.0 / I), 0.0),
                     MultiArmProbs({0.6, 0.3, 0.1})),
        {}, {}, "carand-out"};
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("preset: unknown preset \"" + std::string(name) + "\" (known: " + known + ")");
}

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Collects problems with the key path and, where the key text can be found in
// the source document, its line.
class Reader {
 public:
  Reader(std::string_view text, std::string_view origin) : text_(text), origin_(origin) {}

  void problem(const std::string& path, const std::string& message) {
    std::string where = std::string(origin_);
    const std::string leaf = path.substr(path.find_last_of('.') + 1);
    const std::size_t at = text_.find("\"" + leaf + "\"");
    if (at != std::string_view::npos) {
      const std::string lc = line_col(text_, at);
      where += ":" + lc.substr(0, lc.find(','));
    }
    problems_.push_back(where + ": " + path + ": " + message);
  }

  void problems_from(const std::string& path, const ConfigError& e) {
    for (const auto& p : e.problems()) problem(path, p);
  }

  std::optional<double> number(const Json& j, const std::string& path) {
    if (!j.is_number()) {
      problem(path, "expected a number");
      return std::nullopt;
    }
    return j.get<double>();
  }

  std::optional<std::int64_t> integer(const Json& j, const std::string& path, std::int64_t min) {
    if (!j.is_number_integer()) {
      problem(path, "expected an integer");
      return std::nullopt;
    }
    const auto v = j.get<std::int64_t>();
    if (v < min) {
      problem(path, "must be >= " + std::to_string(min));
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> boolean(const Json& j, const std::string& path) {
    if (!j.is_boolean()) {
      problem(path, "expected true or false");
      return std::nullopt;
    }
    return j.get<bool>();
  }

  std::optional<std::vector<double>> numbers(const Json& j, const std::string& path) {
    if (!j.is_array()) {
      problem(path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto v = number(j[i], path + "[" + std::to_string(i) + "]");
      if (v) out.push_back(*v);
      else ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<std::vector<std::int64_t>> integers(const Json& j, const std::string& path,
                                                    std::int64_t min) {
    if (!j.is_array()) {
      problem(path, "expected an array of integers");
      return std::nullopt;
    }
    std::vector<std::int64_t> out;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto v = integer(j[i], path + "[" + std::to_string(i) + "]", min);
      if (v) out.push_back(*v);
      else ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }

  // Flags keys of `obj` that are not in `allowed`.
  void only_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      problem(path, "expected an object");
      return;
    }
    for (const auto& [key, value] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        problem(path.empty() ? key : path + "." + key, "unknown key");
      }
    }
  }

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::string_view text_;
  std::string_view origin_;
  std::vector<std::string> problems_;
};

Json serialize_json(const RunConfig& c) {
  const DesignConfig& d = c.design;
  Json j;
  j["covariates"]["levels"] = d.spec.levels();
  const StratumDistribution uni = StratumDistribution::uniform(d.spec.stratum_count());
  const auto probs = d.dist.probs();
  if (std::equal(probs.begin(), probs.end(), uni.probs().begin(), uni.probs().end())) {
    j["covariates"]["probs"] = "uniform";
  } else {
    j["covariates"]["probs"] = std::vector<double>(probs.begin(), probs.end());
  }
  j["weights"]["overall"] = d.weights.overall();
  j["weights"]["margins"] = d.weights.margins();
  j["weights"]["stratum"] = d.weights.stratum();
  Json policy;
  if (d.multi_arm()) {
    policy["type"] = "multiarm";
    policy["arms"] = d.arms();
    const auto v = d.multi_probs().values();
    policy["probs"] = std::vector<double>(v.begin(), v.end());
  } else {
    struct Emit {
      Json& p;
      void operator()(const EfronBiasedCoin& g) const {
        p["type"] = "efron";
        p["p"] = g.p;
      }
      void operator()(const LogisticCoin& g) const {
        p["type"] = "logistic";
        p["beta"] = g.beta;
      }
      void operator()(const HeavyTailCoin& g) const {
        p["type"] = "heavytail";
        p["a"] = g.a;
        p["q_min"] = g.q_min;
      }
    };
    std::visit(Emit{policy}, d.g().variant());
  }
  j["policy"] = policy;

  const SimulationSettings& s = c.simulation;
  Json sim;
  sim["n_grid"] = s.n_grid;
  sim["replications"] = s.replications;
  sim["seed"] = s.seed;
  sim["workers"] = s.workers;
  sim["retained_strata"] = s.retained_strata ? Json(*s.retained_strata) : Json(nullptr);
  sim["record_strata"] = s.record_strata;
  sim["histogram_bin_width"] = s.histogram_bin_width;
  sim["export_trajectories"] = s.export_trajectories;
  j["simulation"] = sim;

  const Tolerances& t = c.verification.tolerances;
  Json ver;
  ver["enabled"] = c.verification.enabled;
  ver["bounded_band"] = {t.bounded_lo, t.bounded_hi};
  ver["sqrt_band"] = {t.sqrt_lo, t.sqrt_hi};
  ver["ks_max"] = t.ks_max;
  ver["se_multiplier"] = t.sigma2_se_multiplier;
  ver["n_a"] = t.n_a ? Json(*t.n_a) : Json(nullptr);
  ver["n_b"] = t.n_b ? Json(*t.n_b) : Json(nullptr);
  j["verification"] = ver;
  j["output"]["dir"] = c.out_dir;
  return j;
}

std::optional<DesignConfig> read_design(const Json& j, Reader& rd) {
  std::optional<CovariateSpec> spec;
  std::optional<StratumDistribution> dist;
  std::optional<WeightConfig> weights;
  std::optional<DesignConfig::Policy> policy;

  const Json& cov = j.at("covariates");
  rd.only_keys(cov, "covariates", {"levels", "probs"});
  if (cov.contains("levels")) {
    if (auto lv = rd.integers(cov["levels"], "covariates.levels", 2)) {
      try {
        spec.emplace(std::vector<int>(lv->begin(), lv->end()));
      } catch (const ConfigError& e) {
        rd.problems_from("covariates.levels", e);
      }
    }
  } else {
    rd.problem("covariates.levels", "required");
  }
  if (spec) {
    const Json probs = cov.value("probs", Json("uniform"));
    if (probs.is_string()) {
      if (probs.get<std::string>() == "uniform") {
        dist = StratumDistribution::uniform(spec->stratum_count());
      } else {
        rd.problem("covariates.probs", "expected \"uniform\" or an array of numbers");
      }
    } else if (auto p = rd.numbers(probs, "covariates.probs")) {
      try {
        dist.emplace(std::move(*p));
      } catch (const ConfigError& e) {
        rd.problems_from("covariates.probs", e);
      }
    }
  }

  const Json& w = j.at("weights");
  rd.only_keys(w, "weights", {"overall", "margins", "stratum"});
  {
    auto o = rd.number(w.value("overall", Json(0.0)), "weights.overall");
    auto s = rd.number(w.value("stratum", Json(0.0)), "weights.stratum");
    std::optional<std::vector<double>> m;
    if (w.contains("margins")) {
      m = rd.numbers(w["margins"], "weights.margins");
    } else if (spec) {
      m = std::vector<double>(spec->covariate_count(), 0.0);
    }
    if (o && s && m) {
      try {
        weights.emplace(*o, std::move(*m), *s);
      } catch (const ConfigError& e) {
        rd.problems_from("weights", e);
      }
    }
  }

  const Json& p = j.at("policy");
  const std::string type = p.value("type", std::string("efron"));
  try {
    if (type == "efron") {
      rd.only_keys(p, "policy", {"type", "p"});
      if (auto v = rd.number(p.value("p", Json(0.75)), "policy.p")) policy = GFunction::efron(*v);
    } else if (type == "logistic") {
      rd.only_keys(p, "policy", {"type", "beta"});
      if (!p.contains("beta")) rd.problem("policy.beta", "required for the logistic coin");
      else if (auto v = rd.number(p["beta"], "policy.beta")) policy = GFunction::logistic(*v);
    } else if (type == "heavytail") {
      rd.only_keys(p, "policy", {"type", "a", "q_min"});
      if (!p.contains("a")) rd.problem("policy.a", "required for the heavy-tail coin");
      if (!p.contains("q_min")) rd.problem("policy.q_min", "required for the heavy-tail coin");
      if (p.contains("a") && p.contains("q_min")) {
        auto a = rd.number(p["a"], "policy.a");
        auto q = rd.number(p["q_min"], "policy.q_min");
        if (a && q) policy = GFunction::heavy_tail(*a, *q);
      }
    } else if (type == "multiarm") {
      rd.only_keys(p, "policy", {"type", "probs", "arms"});
      if (!p.contains("probs")) {
        rd.problem("policy.probs", "required for multi-arm designs");
      } else if (auto v = rd.numbers(p["probs"], "policy.probs")) {
        const std::size_t arms = v->size();
        policy = MultiArmProbs(std::move(*v));
        if (p.contains("arms")) {
          auto a = rd.integer(p["arms"], "policy.arms", 2);
          if (a && static_cast<std::size_t>(*a) != arms) {
            rd.problem("policy.arms", "is " + std::to_string(*a) + " but policy.probs has " +
                                          std::to_string(arms) + " entries");
          }
        }
      }
    } else {
      rd.problem("policy.type", "unknown policy \"" + type +
                                    "\" (known: efron, logistic, heavytail, multiarm)");
    }
  } catch (const ConfigError& e) {
    rd.problems_from("policy", e);
  }

  if (!(spec && dist && weights && policy)) return std::nullopt;
  try {
    return DesignConfig(*spec, *dist, *weights, *policy);
  } catch (const ConfigError& e) {
    rd.problems_from("design", e);
  }
  return std::nullopt;
}

void read_simulation(const Json& s, SimulationSettings& out, Reader& rd) {
  rd.only_keys(s, "simulation",
               {"n_grid", "replications", "seed", "workers", "retained_strata", "record_strata",
                "histogram_bin_width", "export_trajectories"});
  if (s.contains("n_grid")) {
    if (auto v = rd.integers(s["n_grid"], "simulation.n_grid", 1)) out.n_grid = *v;
  }
  if (s.contains("replications")) {
    if (auto v = rd.integer(s["replications"], "simulation.replications", 1)) {
      out.replications = static_cast<std::uint64_t>(*v);
    }
  }
  if (s.contains("seed")) {
    if (s["seed"].is_number_unsigned()) out.seed = s["seed"].get<std::uint64_t>();
    else rd.problem("simulation.seed", "expected a non-negative integer");
  }
  if (s.contains("workers")) {
    if (auto v = rd.integer(s["workers"], "simulation.workers", 0)) {
      out.workers = static_cast<unsigned>(*v);
    }
  }
  if (s.contains("retained_strata")) {
    if (s["retained_strata"].is_null()) {
      out.retained_strata.reset();
    } else if (auto v = rd.integers(s["retained_strata"], "simulation.retained_strata", 0)) {
      out.retained_strata = std::vector<std::size_t>(v->begin(), v->end());
    }
  }
  if (s.contains("record_strata")) {
    if (auto v = rd.boolean(s["record_strata"], "simulation.record_strata")) out.record_strata = *v;
  }
  if (s.contains("histogram_bin_width")) {
    if (auto v = rd.integer(s["histogram_bin_width"], "simulation.histogram_bin_width", 1)) {
      out.histogram_bin_width = *v;
    }
  }
  if (s.contains("export_trajectories")) {
    if (auto v = rd.integer(s["export_trajectories"], "simulation.export_trajectories", 0)) {
      out.export_trajectories = static_cast<std::uint64_t>(*v);
    }
  }
}

void read_verification(const Json& v, VerificationSettings& out, Reader& rd) {
  rd.only_keys(v, "verification",
               {"enabled", "bounded_band", "sqrt_band", "ks_max", "se_multiplier", "n_a", "n_b"});
  Tolerances& t = out.tolerances;
  if (v.contains("enabled")) {
    if (auto b = rd.boolean(v["enabled"], "verification.enabled")) out.enabled = *b;
  }
  auto band = [&](const char* key, double& lo, double& hi) {
    if (!v.contains(key)) return;
    const std::string path = std::string("verification.") + key;
    auto b = rd.numbers(v[key], path);
    if (!b) return;
    if (b->size() != 2 || !((*b)[0] <= (*b)[1])) {
      rd.problem(path, "expected [lo, hi] with lo <= hi");
      return;
    }
    lo = (*b)[0];
    hi = (*b)[1];
  };
  band("bounded_band", t.bounded_lo, t.bounded_hi);
  band("sqrt_band", t.sqrt_lo, t.sqrt_hi);
  if (v.contains("ks_max")) {
    if (auto x = rd.number(v["ks_max"], "verification.ks_max")) t.ks_max = *x;
  }
  if (v.contains("se_multiplier")) {
    if (auto x = rd.number(v["se_multiplier"], "verification.se_multiplier")) {
      t.sigma2_se_multiplier = *x;
    }
  }
  auto checkpoint = [&](const char* key, std::optional<std::int64_t>& dst) {
    if (!v.contains(key)) return;
    if (v[key].is_null()) {
      dst.reset();
    } else if (auto x = rd.integer(v[key], std::string("verification.") + key, 1)) {
      dst = *x;
    }
  };
  checkpoint("n_a", t.n_a);
  checkpoint("n_b", t.n_b);
}

void cross_check(const RunConfig& c, Reader& rd) {
  const auto& grid = c.simulation.n_grid;
  if (grid.empty()) rd.problem("simulation.n_grid", "needs at least one checkpoint");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) {
      rd.problem("simulation.n_grid", "must be strictly ascending");
      break;
    }
  }
  if (c.simulation.retained_strata) {
    if (!c.simulation.record_strata && !c.simulation.retained_strata->empty()) {
      rd.problem("simulation.retained_strata", "needs simulation.record_strata = true");
    }
    for (std::size_t k : *c.simulation.retained_strata) {
      if (k >= c.design.spec.stratum_count()) {
        rd.problem("simulation.retained_strata",
                   "stratum " + std::to_string(k) + " out of range [0, " +
                       std::to_string(c.design.spec.stratum_count()) + ")");
      }
    }
  }
  if (!c.verification.enabled || grid.empty()) return;
  const Tolerances& t = c.verification.tolerances;
  const std::int64_t na = t.n_a.value_or(grid.front());
  const std::int64_t nb = t.n_b.value_or(grid.back());
  auto in_grid = [&](std::int64_t n) { return std::find(grid.begin(), grid.end(), n) != grid.end(); };
  if (grid.size() < 2) {
    rd.problem("simulation.n_grid", "verification needs at least two checkpoints");
  } else if (nb < 2 * na) {
    rd.problem("verification", "needs checkpoints with n_b >= 2·n_a (have " + std::to_string(na) +
                                   ", " + std::to_string(nb) + ")");
  }
  if (t.n_a && !in_grid(*t.n_a)) rd.problem("verification.n_a", "not in simulation.n_grid");
  if (t.n_b && !in_grid(*t.n_b)) rd.problem("verification.n_b", "not in simulation.n_grid");
}

}  // namespace

RunConfig load_config_text(std::string_view text, std::string_view origin) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string(origin) + ":" + line_col(text, e.byte > 0 ? e.byte - 1 : 0) +
                      ": parse error: " + e.what());
  }
  Reader rd(text, origin);
  if (!doc.is_object()) throw ConfigError(std::string(origin) + ": top level must be an object");
  rd.only_keys(doc, "",
               {"preset", "covariates", "weights", "policy", "simulation", "verification", "output"});

  // Base document: a preset (optionally re-levelled) or an empty design.
  Json base = Json::object();
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) {
      rd.problem("preset", "expected a preset name");
    } else {
      std::optional<std::vector<int>> levels;
      if (doc.contains("covariates") && doc["covariates"].contains("levels")) {
        const Json& lv = doc["covariates"]["levels"];
        if (lv.is_array() && std::all_of(lv.begin(), lv.end(),
                                         [](const Json& x) { return x.is_number_integer(); })) {
          levels = lv.get<std::vector<int>>();
        }
      }
      try {
        base = serialize_json(preset_config(doc["preset"].get<std::string>(), levels));
      } catch (const ConfigError& e) {
        rd.problems_from("preset", e);
      }
    }
  }
  Json merged = base;
  for (const auto& [key, value] : doc.items()) {
    if (key == "preset") continue;
    const bool new_policy = key == "policy" && value.is_object() && value.contains("type") &&
                            merged.contains(key) && merged[key].value("type", Json()) != value["type"];
    if (!new_policy && merged.contains(key) && merged[key].is_object() && value.is_object()) {
      for (const auto& [k2, v2] : value.items()) merged[key][k2] = v2;
    } else {
      merged[key] = value;
    }
  }
  for (const char* section : {"covariates", "weights", "policy"}) {
    if (!merged.contains(section)) {
      rd.problem(section, "required (or give a \"preset\")");
      merged[section] = Json::object();
    }
  }

  std::optional<DesignConfig> design;
  if (merged["covariates"].is_object() && merged["weights"].is_object() &&
      merged["policy"].is_object()) {
    design = read_design(merged, rd);
  } else {
    rd.problem("design", "covariates, weights and policy must be objects");
  }
  SimulationSettings sim;
  if (merged.contains("simulation")) read_simulation(merged["simulation"], sim, rd);
  VerificationSettings ver;
  if (merged.contains("verification")) read_verification(merged["verification"], ver, rd);
  std::string out_dir = "carand-out";
  if (merged.contains("output")) {
    rd.only_keys(merged["output"], "output", {"dir"});
    if (merged["output"].contains("dir")) {
      if (merged["output"]["dir"].is_string()) out_dir = merged["output"]["dir"].get<std::string>();
      else rd.problem("output.dir", "expected a string");
    }
  }
  if (!design) {
    if (rd.problems().empty()) rd.problem("design", "invalid");
    throw ConfigError(rd.problems());
  }
  RunConfig cfg{std::move(*design), std::move(sim), std::move(ver), std::move(out_dir)};
  cross_check(cfg, rd);
  if (!rd.problems().empty()) throw ConfigError(rd.problems());
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str(), path.string());
}

std::string serialize_config(const RunConfig& config) { return serialize_json(config).dump(2) + "\n"; }

}  // namespace carand
