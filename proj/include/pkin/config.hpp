#pragma once

// Plain-text experiment configuration: one `key = value` per line, `#`
// starts a comment. Keys mirror the JSON config echo, with dots for nesting:
//
//   experiment = protein
//   seed = 7
//   sampler.max_tree_depth = 6
//   protein.geometry.n_ca_c = 118.4
//
// Unknown keys are an error.

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pkin/experiments.hpp"

namespace pkin {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: '" + key + "' expects true/false, got '" + v + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

inline const std::map<std::string, Setter>& config_setters() {
  static const std::map<std::string, Setter> setters = [] {
    std::map<std::string, Setter> m;
#define PKIN_DOUBLE(key, member) \
  m[key] = [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.member = parse_double(k, v); }
#define PKIN_INT(key, member)                                                    \
  m[key] = [](ExperimentConfig& c, const std::string& k, const std::string& v) { \
    c.member = parse_int<decltype(c.member)>(k, v);                              \
  }
#define PKIN_BOOL(key, member) \
  m[key] = [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.member = parse_bool(k, v); }
    m["experiment"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.experiment = experiment_from_string(v);
    };
    PKIN_BOOL("ablation", ablation);
    PKIN_BOOL("identity_check", identity_check);
    PKIN_INT("seed", seed);
    PKIN_INT("repeats", repeats);
    PKIN_INT("thin", thin_stride);
    PKIN_INT("histogram_bins", histogram_bins);
    PKIN_INT("prior_histogram_samples", prior_histogram_samples);
    PKIN_INT("sampler.warmup_steps", sampler.warmup_steps);
    PKIN_INT("sampler.sample_steps", sampler.sample_steps);
    PKIN_INT("sampler.max_tree_depth", sampler.max_tree_depth);
    PKIN_DOUBLE("sampler.target_accept", sampler.target_accept);
    PKIN_DOUBLE("sampler.initial_step_size", sampler.initial_step_size);
    PKIN_DOUBLE("vrw.mu", vrw.mu);
    PKIN_DOUBLE("vrw.kappa", vrw.kappa);
    PKIN_INT("vrw.n_steps", vrw.n_steps);
    PKIN_DOUBLE("vrw.alpha", vrw.alpha);
    PKIN_DOUBLE("vrw.beta", vrw.beta);
    PKIN_DOUBLE("protein.mu_phi_deg", protein.mu_phi_deg);
    PKIN_DOUBLE("protein.mu_psi_deg", protein.mu_psi_deg);
    PKIN_DOUBLE("protein.kappa_phi", protein.kappa_phi);
    PKIN_DOUBLE("protein.kappa_psi", protein.kappa_psi);
    PKIN_INT("protein.length", protein.length);
    PKIN_DOUBLE("protein.target_mean", protein.target_mean);
    PKIN_DOUBLE("protein.target_variance", protein.target_variance);
    PKIN_INT("protein.reference_samples", protein.reference_samples);
    PKIN_DOUBLE("protein.geometry.n_ca", protein.geometry.n_ca);
    PKIN_DOUBLE("protein.geometry.ca_c", protein.geometry.ca_c);
    PKIN_DOUBLE("protein.geometry.c_n", protein.geometry.c_n);
    PKIN_DOUBLE("protein.geometry.n_ca_c", protein.geometry.n_ca_c);
    PKIN_DOUBLE("protein.geometry.ca_c_n", protein.geometry.ca_c_n);
    PKIN_DOUBLE("protein.geometry.c_n_ca", protein.geometry.c_n_ca);
    PKIN_DOUBLE("protein.geometry.omega", protein.geometry.omega);
#undef PKIN_DOUBLE
#undef PKIN_INT
#undef PKIN_BOOL
    return m;
  }();
  return setters;
}

}  // namespace detail

/// Applies `key = value` lines on top of `base`.
inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  const auto& setters = detail::config_setters();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second(base, key, value);
  }
  return base;
}

inline ExperimentConfig parse_config_string(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  return parse_config(in, std::move(base));
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

}  // namespace pkin
