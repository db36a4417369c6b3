#pragma once

// Experiment configuration: a JSON document.
//
// {
//   "problem": {"name": "G4", "params": {"alpha": 0.25}, "x0": 0.0, "T": 1.0},
//   "norms": ["L1_terminal", "L1_stopping", "gamma_sup"],
//   "n_list": [16, 32, 64, 128, 256],
//   "n_ref_factor": 32,
//   "paths": 4000,
//   "p": 2.0,                 // Lp_sup exponent
//   "gamma": 0.5,             // gamma_sup exponent
//   "stopping_level": 0.5,    // optional, default x0 + 1/2
//   "seed": 2022,             // required
//   "truncation_m": [5, 10],  // optional; one run per m with b replaced by b g_m
//   "output": "thm-2.2.csv",
//   "threads": 0,             // optional worker count, never changes results
//   "martingale_check": false,
//   "path_dump": "paths.bin", // optional
//   "gates": true
// }

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "irrsde/error_stats.hpp"
#include "irrsde/gallery.hpp"

namespace irrsde {

struct ProblemConfig {
  std::string name;
  ParamMap params;
  double x0 = 0.0;
  double horizon = 1.0;

  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

struct ExperimentConfig {
  ProblemConfig problem;
  std::vector<std::string> norms;
  std::vector<std::size_t> n_list;
  std::size_t n_ref_factor = 32;
  std::size_t paths = 1000;
  double p = 2.0;
  double gamma = 0.5;
  std::optional<double> stopping_level;
  std::uint64_t seed = 0;
  std::vector<int> truncation_m;
  std::string output;
  std::size_t threads = 0;
  bool martingale_check = false;
  std::optional<std::string> path_dump;
  bool gates = true;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Norm objects for the configured names, with p / gamma filled in.
inline std::vector<Norm> config_norms(const ExperimentConfig& c) {
  std::vector<Norm> out;
  for (const auto& name : c.norms) {
    Norm n{parse_norm_kind(name), 1.0};
    if (n.kind == NormKind::lp_sup) n.p = c.p;
    if (n.kind == NormKind::gamma_sup) n.p = c.gamma;
    out.push_back(n);
  }
  return out;
}

/// Throws ConfigError naming the first offending key.
inline void validate_config(const ExperimentConfig& c) {
  try {
    ParamMap overrides = c.problem.params;
    overrides["x0"] = c.problem.x0;
    overrides["T"] = c.problem.horizon;
    gallery_problem(c.problem.name, overrides);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("problem", e.what());
  }
  if (!(c.problem.horizon > 0.0)) throw ConfigError("problem.T", "must be positive");
  if (c.norms.empty()) throw ConfigError("norms", "at least one norm is required");
  for (const auto& name : c.norms) {
    try {
      parse_norm_kind(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("norms", e.what());
    }
  }
  if (!(c.p >= 1.0)) throw ConfigError("p", "must be >= 1");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ConfigError("gamma", "must lie in (0, 1)");
  if (c.n_list.size() < 3) throw ConfigError("n_list", "need at least 3 step counts for a rate fit");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    if (c.n_list[i] == 0) throw ConfigError("n_list", "step counts must be positive");
    if (i == 0) continue;
    const std::size_t a = c.n_list[i - 1], b = c.n_list[i];
    if (b <= a) throw ConfigError("n_list", "must be strictly increasing");
    const std::size_t r = b / a;
    if (b % a != 0 || (r & (r - 1)) != 0)
      throw ConfigError("n_list", "consecutive ratios must be powers of two (" + std::to_string(a) + " -> " +
                                      std::to_string(b) + ")");
  }
  if (c.n_ref_factor == 0 || (c.n_ref_factor & (c.n_ref_factor - 1)) != 0)
    throw ConfigError("n_ref_factor", "must be a power of two");
  if (c.paths < 100) throw ConfigError("paths", "must be >= 100");
  for (int m : c.truncation_m)
    if (m < 1) throw ConfigError("truncation_m", "values must be positive integers");
  if (c.output.empty()) throw ConfigError("output", "an output CSV path is required");
}

// ---------------------------------------------------------------------------
// JSON mapping.

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : c.problem.params) params[k] = v;
  nlohmann::json j{
      {"problem", {{"name", c.problem.name}, {"params", params}, {"x0", c.problem.x0}, {"T", c.problem.horizon}}},
      {"norms", c.norms},
      {"n_list", c.n_list},
      {"n_ref_factor", c.n_ref_factor},
      {"paths", c.paths},
      {"p", c.p},
      {"gamma", c.gamma},
      {"seed", c.seed},
      {"truncation_m", c.truncation_m},
      {"output", c.output},
      {"threads", c.threads},
      {"martingale_check", c.martingale_check},
      {"gates", c.gates},
  };
  if (c.stopping_level) j["stopping_level"] = *c.stopping_level;
  if (c.path_dump) j["path_dump"] = *c.path_dump;
  return j;
}

namespace detail {

template <class T>
T get_key(const nlohmann::json& j, const std::string& key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

template <class T>
void get_optional(const nlohmann::json& j, const std::string& key, const std::string& path, T& out) {
  if (j.contains(key)) out = get_key<T>(j, key, path);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{"problem",        "norms",   "n_list", "n_ref_factor",
                                              "paths",          "p",       "gamma",  "stopping_level",
                                              "seed",           "truncation_m", "output", "threads",
                                              "martingale_check", "path_dump", "gates"};
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) throw ConfigError(item.key(), "unknown key");

  ExperimentConfig c;
  if (!j.contains("problem")) throw ConfigError("problem", "missing");
  const auto& pj = j.at("problem");
  if (!pj.is_object()) throw ConfigError("problem", "expected an object");
  for (const auto& item : pj.items()) {
    const auto& key = item.key();
    if (key != "name" && key != "params" && key != "x0" && key != "T") throw ConfigError("problem." + key, "unknown key");
  }
  c.problem.name = detail::get_key<std::string>(pj, "name", "problem.name");
  if (pj.contains("params")) {
    if (!pj.at("params").is_object()) throw ConfigError("problem.params", "expected an object");
    for (const auto& item : pj.at("params").items()) {
      if (!item.value().is_number()) throw ConfigError("problem.params." + item.key(), "expected a number");
      c.problem.params[item.key()] = item.value().get<double>();
    }
  }
  detail::get_optional(pj, "x0", "problem.x0", c.problem.x0);
  detail::get_optional(pj, "T", "problem.T", c.problem.horizon);

  if (!j.contains("norms")) throw ConfigError("norms", "missing");
  c.norms = detail::get_key<std::vector<std::string>>(j, "norms", "norms");
  if (!j.contains("n_list")) throw ConfigError("n_list", "missing");
  c.n_list = detail::get_key<std::vector<std::size_t>>(j, "n_list", "n_list");
  detail::get_optional(j, "n_ref_factor", "n_ref_factor", c.n_ref_factor);
  detail::get_optional(j, "paths", "paths", c.paths);
  detail::get_optional(j, "p", "p", c.p);
  detail::get_optional(j, "gamma", "gamma", c.gamma);
  if (j.contains("stopping_level")) c.stopping_level = detail::get_key<double>(j, "stopping_level", "stopping_level");
  if (!j.contains("seed")) throw ConfigError("seed", "missing (runs are never seeded from the clock)");
  c.seed = detail::get_key<std::uint64_t>(j, "seed", "seed");
  if (j.contains("truncation_m")) {
    const auto& m = j.at("truncation_m");
    if (m.is_number_integer()) c.truncation_m = {m.get<int>()};
    else c.truncation_m = detail::get_key<std::vector<int>>(j, "truncation_m", "truncation_m");
  }
  detail::get_optional(j, "output", "output", c.output);
  detail::get_optional(j, "threads", "threads", c.threads);
  detail::get_optional(j, "martingale_check", "martingale_check", c.martingale_check);
  if (j.contains("path_dump")) c.path_dump = detail::get_key<std::string>(j, "path_dump", "path_dump");
  detail::get_optional(j, "gates", "gates", c.gates);
  validate_config(c);
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<root>", e.what());
  }
  return config_from_json(j);
}

inline std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Presets.

inline std::vector<std::string> preset_names() {
  return {"thm-2.2", "thm-2.4", "thm-2.6", "cor-2.7", "thm-2.3-truncation"};
}

inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.n_list = {16, 32, 64, 128, 256};
  c.n_ref_factor = 32;
  c.paths = 4000;
  c.seed = 2022;
  c.output = name + ".csv";
  if (name == "thm-2.2") {
    c.problem = {"G4", {{"alpha", 0.25}}, 0.0, 1.0};
    c.norms = {"L1_terminal", "L1_stopping", "gamma_sup"};
    c.gamma = 0.5;
  } else if (name == "thm-2.4") {
    c.problem = {"G4", {{"alpha", 0.25}}, 0.0, 1.0};
    c.norms = {"L1_terminal", "L1_sup"};
  } else if (name == "thm-2.6") {
    c.problem = {"G2", {{"m", 1.0}}, 0.0, 1.0};
    c.norms = {"Lp_sup"};
    c.p = 2.0;
    c.martingale_check = true;
  } else if (name == "cor-2.7") {
    c.problem = {"G3", {{"beta", 0.5}}, 0.0, 1.0};
    c.norms = {"L1_terminal", "Lp_sup"};
    c.p = 2.0;
  } else if (name == "thm-2.3-truncation") {
    c.problem = {"G1", {{"kappa", 1.0}}, 0.0, 1.0};
    c.norms = {"L1_terminal"};
    c.truncation_m = {5, 10};
  } else {
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown preset '" + name + "'; available: " + list);
  }
  validate_config(c);
  return c;
}

}  // namespace irrsde
