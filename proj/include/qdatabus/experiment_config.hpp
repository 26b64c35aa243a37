#pragma once

// JSON experiment descriptions. Parsing is strict: an unknown key anywhere
// is a ConfigError, so a typo never silently falls back to a default.

#include "json.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "qdatabus/chain_model.hpp"
#include "qdatabus/effective_models.hpp"
#include "qdatabus/errors.hpp"

namespace qdatabus {

enum class ExperimentKind { transfer, compare_approx, wstate, scaling, disorder, node_parity };

inline constexpr std::array<std::pair<ExperimentKind, const char*>, 6> kExperimentNames{{
    {ExperimentKind::transfer, "transfer"},
    {ExperimentKind::compare_approx, "compare-approx"},
    {ExperimentKind::wstate, "wstate"},
    {ExperimentKind::scaling, "scaling"},
    {ExperimentKind::disorder, "disorder"},
    {ExperimentKind::node_parity, "node-parity"},
}};

inline std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kExperimentNames)
    if (k == kind) return name;
  return "unknown";
}

inline ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kExperimentNames)
    if (name == n) return k;
  throw ConfigError("unknown experiment '" + name + "'");
}

struct TimeGrid {
  double t_max = 1000.0;
  int samples = 2001;
};

struct SweepSpec {
  std::vector<int> ring_sizes;
  Regime regime = Regime::center_of_mass;
  double threshold = 0.95;
  double epsilon_fraction = 0.1;
  double window_factor = 20.0;  // scaling horizon, in units of 2M/eps
  std::vector<double> spreads;
  int seeds = 0;
  int separation = 2;
  double min_prominence = 0.05;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::transfer;
  ChainSpec chain;
  double squeezing = 1.0;
  TimeGrid time;
  SweepSpec sweep;
  std::array<double, 3> w_target{1.0 / std::sqrt(3.0), -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(3.0)};
  std::uint64_t seed = 0;
  std::string output = "out";
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require(j.is_object(), where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    require(ok.contains(item.key()), "unknown key '" + item.key() + "' in " + where);
}

template <class T>
T get_as(const json& j, const std::string& key, const std::string& where) {
  try {
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>)
      require(j.at(key).is_number_integer(), where + "." + key + " must be an integer");
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void read_optional(const json& j, const char* key, const std::string& where, T& into) {
  if (j.contains(key)) into = get_as<T>(j, key, where);
}

inline std::string regime_name(Regime r) {
  return r == Regime::center_of_mass ? "com" : "quarter";
}

inline Regime parse_regime(const std::string& s) {
  if (s == "com") return Regime::center_of_mass;
  if (s == "quarter") return Regime::quarter_mode;
  throw ConfigError("regime must be 'com' or 'quarter', got '" + s + "'");
}

inline Disorder parse_disorder(const json& j) {
  check_keys(j, "chain.disorder", {"model", "spread", "seed"});
  Disorder d;
  const auto model = get_as<std::string>(j, "model", "chain.disorder");
  if (model == "bond")
    d.model = DisorderModel::bond;
  else if (model == "site")
    d.model = DisorderModel::site;
  else
    throw ConfigError("disorder model must be 'bond' or 'site'");
  d.spread = get_as<double>(j, "spread", "chain.disorder");
  read_optional(j, "seed", "chain.disorder", d.seed);
  return d;
}

inline ChainSpec parse_chain(const json& j) {
  check_keys(j, "chain",
             {"ring_size", "coupling", "probes", "include_decoupled_c", "allow_shared_sites", "disorder"});
  ChainSpec spec;
  spec.ring_size = get_as<int>(j, "ring_size", "chain");
  spec.coupling = get_as<double>(j, "coupling", "chain");
  read_optional(j, "include_decoupled_c", "chain", spec.include_decoupled_c);
  read_optional(j, "allow_shared_sites", "chain", spec.allow_shared_sites);
  if (j.contains("probes")) {
    require(j.at("probes").is_array(), "chain.probes must be an array");
    for (const auto& p : j.at("probes")) {
      check_keys(p, "chain.probes[]", {"label", "site", "epsilon", "detuning"});
      Probe probe;
      probe.label = get_as<std::string>(p, "label", "probe");
      probe.site = get_as<int>(p, "site", "probe");
      probe.epsilon = get_as<double>(p, "epsilon", "probe");
      read_optional(p, "detuning", "probe", probe.detuning);
      spec.probes.push_back(probe);
    }
  }
  if (j.contains("disorder") && !j.at("disorder").is_null()) spec.disorder = parse_disorder(j.at("disorder"));
  validate_spec(spec);
  return spec;
}

inline SweepSpec parse_sweep(const json& j) {
  check_keys(j, "sweep",
             {"ring_sizes", "regime", "threshold", "epsilon_fraction", "window_factor", "spreads",
              "seeds", "separation", "min_prominence"});
  SweepSpec s;
  read_optional(j, "ring_sizes", "sweep", s.ring_sizes);
  if (j.contains("regime")) s.regime = parse_regime(get_as<std::string>(j, "regime", "sweep"));
  read_optional(j, "threshold", "sweep", s.threshold);
  read_optional(j, "epsilon_fraction", "sweep", s.epsilon_fraction);
  read_optional(j, "window_factor", "sweep", s.window_factor);
  read_optional(j, "spreads", "sweep", s.spreads);
  read_optional(j, "seeds", "sweep", s.seeds);
  read_optional(j, "separation", "sweep", s.separation);
  read_optional(j, "min_prominence", "sweep", s.min_prominence);
  return s;
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& cfg) {
  using detail::require;
  require(cfg.time.t_max > 0.0 && std::isfinite(cfg.time.t_max), "time.t_max must be positive");
  require(cfg.time.samples >= 2, "time.samples must be at least 2");
  require(cfg.squeezing >= 0.0 && std::isfinite(cfg.squeezing), "squeezing must be non-negative");
  const auto& s = cfg.sweep;
  require(s.threshold > 0.0 && s.threshold <= 1.0, "sweep.threshold must lie in (0, 1]");
  require(s.epsilon_fraction > 0.0, "sweep.epsilon_fraction must be positive");
  require(s.window_factor > 0.0, "sweep.window_factor must be positive");
  require(s.min_prominence > 0.0, "sweep.min_prominence must be positive");
  if (cfg.experiment == ExperimentKind::scaling)
    require(!s.ring_sizes.empty(), "scaling needs a nonempty sweep.ring_sizes");
  if (cfg.experiment == ExperimentKind::disorder) {
    require(!s.spreads.empty(), "disorder needs a nonempty sweep.spreads");
    require(s.seeds >= 1, "disorder needs sweep.seeds >= 1");
    for (double sp : s.spreads) detail::validate_spread(sp);
  }
  const double norm2 = cfg.w_target[0] * cfg.w_target[0] + cfg.w_target[1] * cfg.w_target[1] +
                       cfg.w_target[2] * cfg.w_target[2];
  require(std::abs(norm2 - 1.0) <= 1e-9, "w_target must be normalized");
  detail::validate_spec(cfg.chain);
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  detail::check_keys(j, "config",
                     {"experiment", "chain", "squeezing", "time", "sweep", "w_target", "seed", "output"});
  ExperimentConfig cfg;
  cfg.experiment = parse_experiment_kind(detail::get_as<std::string>(j, "experiment", "config"));
  detail::require(j.contains("chain"), "config needs a 'chain' object");
  cfg.chain = detail::parse_chain(j.at("chain"));
  detail::read_optional(j, "squeezing", "config", cfg.squeezing);
  if (j.contains("time")) {
    const auto& t = j.at("time");
    detail::check_keys(t, "time", {"t_max", "samples"});
    detail::read_optional(t, "t_max", "time", cfg.time.t_max);
    detail::read_optional(t, "samples", "time", cfg.time.samples);
  }
  if (j.contains("sweep")) cfg.sweep = detail::parse_sweep(j.at("sweep"));
  detail::read_optional(j, "w_target", "config", cfg.w_target);
  detail::read_optional(j, "seed", "config", cfg.seed);
  detail::read_optional(j, "output", "config", cfg.output);
  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig config_from_json(const nlohmann::ordered_json& j) {
  return config_from_json(nlohmann::json::parse(j.dump()));
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

// Normalized echo with every default filled in; config_from_json inverts it.
inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json chain;
  chain["ring_size"] = cfg.chain.ring_size;
  chain["coupling"] = cfg.chain.coupling;
  chain["probes"] = nlohmann::ordered_json::array();
  for (const auto& p : cfg.chain.probes) {
    nlohmann::ordered_json pj;
    pj["label"] = p.label;
    pj["site"] = p.site;
    pj["epsilon"] = p.epsilon;
    pj["detuning"] = p.detuning;
    chain["probes"].push_back(pj);
  }
  chain["include_decoupled_c"] = cfg.chain.include_decoupled_c;
  chain["allow_shared_sites"] = cfg.chain.allow_shared_sites;
  if (cfg.chain.disorder) {
    const auto& d = *cfg.chain.disorder;
    chain["disorder"] = {{"model", d.model == DisorderModel::bond ? "bond" : "site"},
                         {"spread", d.spread},
                         {"seed", d.seed}};
  }

  const auto& s = cfg.sweep;
  nlohmann::ordered_json sweep;
  sweep["ring_sizes"] = s.ring_sizes;
  sweep["regime"] = detail::regime_name(s.regime);
  sweep["threshold"] = s.threshold;
  sweep["epsilon_fraction"] = s.epsilon_fraction;
  sweep["window_factor"] = s.window_factor;
  sweep["spreads"] = s.spreads;
  sweep["seeds"] = s.seeds;
  sweep["separation"] = s.separation;
  sweep["min_prominence"] = s.min_prominence;

  nlohmann::ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  j["chain"] = chain;
  j["squeezing"] = cfg.squeezing;
  j["time"] = {{"t_max", cfg.time.t_max}, {"samples", cfg.time.samples}};
  j["sweep"] = sweep;
  j["w_target"] = cfg.w_target;
  j["seed"] = cfg.seed;
  j["output"] = cfg.output;
  return j;
}

}  // namespace qdatabus
