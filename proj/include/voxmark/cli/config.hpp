#ifndef VOXMARK_CLI_CONFIG_HPP
#define VOXMARK_CLI_CONFIG_HPP

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "json.hpp"

#include "voxmark/functionals.hpp"

namespace voxmark::cli {

using nlohmann::json;

inline constexpr const char* kEnvPrefix = "VOXMARK_";

/// Feature-set toggles, in CSV column order.
inline const std::vector<std::string>& feature_set_names() {
  static const std::vector<std::string> names = {"gemaps_core", "spectral", "complexity", "syntax", "sentiment", "coherence"};
  return names;
}

inline const std::vector<std::string>& path_keys() {
  static const std::vector<std::string> keys = {"embeddings", "valence_lexicon", "dictionary", "suffixes", "unintelligible_markers"};
  return keys;
}

/// Every key the config file may contain, with its default.
inline json default_config_json() {
  json j = {
      {"frame_ms", 25.0},
      {"hop_ms", 10.0},
      {"window", "hann"},
      {"f0_min_hz", 60.0},
      {"f0_max_hz", 600.0},
      {"n_mels", 26},
      {"contrast_bands", 7},
      {"functionals", {"mean", "stddev"}},
      {"seed", 0},
      {"jobs", 0},
  };
  j["features"] = json::object();
  for (const auto& f : feature_set_names()) j["features"][f] = f != "sentiment" && f != "coherence";
  j["paths"] = json::object();
  for (const auto& p : path_keys()) j["paths"][p] = nullptr;
  j["analysis"] = nullptr;
  return j;
}

struct PipelineConfig {
  AcousticConfig acoustic;
  std::map<std::string, bool> features;
  std::map<std::string, std::optional<std::filesystem::path>> paths;
  std::vector<std::string> functionals;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;  // 0 = logical cores
  json analysis;         // optional stage spec, validated by analyze
  json effective;        // fully merged config that produced this object

  bool enabled(const std::string& set) const { return features.at(set); }
  bool any_text() const {
    for (const char* s : {"complexity", "syntax", "sentiment", "coherence"}) {
      if (enabled(s)) return true;
    }
    return false;
  }
  std::size_t worker_count() const {
    if (jobs > 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

inline void merge_strict(json& base, const json& over, const std::string& where) {
  if (!over.is_object()) config_error(where.empty() ? "config must be a JSON object" : "'" + where + "' must be an object");
  for (auto it = over.begin(); it != over.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) config_error("unknown config key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object() && it.key() != "analysis") merge_strict(slot, *it, key);
    else slot = *it;
  }
}

inline double number(const json& j, const char* key) {
  if (!j.at(key).is_number()) config_error(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::uint64_t non_negative_int(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) config_error(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

/// Env value parsed as JSON when possible, else taken as a string.
inline json env_value(const char* raw) {
  const json parsed = json::parse(raw, nullptr, false);
  return parsed.is_discarded() ? json(std::string(raw)) : parsed;
}

inline std::string env_name(const std::string& dotted) {
  std::string out = kEnvPrefix;
  for (char c : dotted) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

/// VOXMARK_<KEY> for top-level scalars, VOXMARK_FEATURES_<SET> and VOXMARK_PATHS_<NAME> for nested keys.
inline json env_overrides(const std::function<const char*(const char*)>& getenv_fn = [](const char* n) { return std::getenv(n); }) {
  json over = json::object();
  const json defaults = default_config_json();
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    if (it.key() == "analysis") continue;
    if (it->is_object()) {
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        if (const char* v = getenv_fn(detail::env_name(it.key() + "." + jt.key()).c_str())) over[it.key()][jt.key()] = detail::env_value(v);
      }
    } else if (const char* v = getenv_fn(detail::env_name(it.key()).c_str())) {
      over[it.key()] = detail::env_value(v);
    }
  }
  return over;
}

/// Merges defaults <- file <- env <- explicit overrides, then validates everything before any work.
/// Relative paths resolve against base_dir (the config file's directory).
inline PipelineConfig build_config(const json& file_json, const json& env_json = json::object(), const json& cli_json = json::object(),
                                   const std::filesystem::path& base_dir = {}) {
  json j = default_config_json();
  detail::merge_strict(j, file_json, "");
  detail::merge_strict(j, env_json, "");
  detail::merge_strict(j, cli_json, "");

  PipelineConfig c;
  c.acoustic.frame_ms = detail::number(j, "frame_ms");
  c.acoustic.hop_ms = detail::number(j, "hop_ms");
  if (!(c.acoustic.frame_ms > 0.0) || !(c.acoustic.hop_ms > 0.0)) detail::config_error("frame_ms and hop_ms must be positive");
  if (!j["window"].is_string()) detail::config_error("'window' must be a string");
  try {
    c.acoustic.window = parse_window_kind(j["window"].get<std::string>());
  } catch (const Error& e) {
    detail::config_error(e.what());
  }
  c.acoustic.f0_min_hz = detail::number(j, "f0_min_hz");
  c.acoustic.f0_max_hz = detail::number(j, "f0_max_hz");
  if (!(c.acoustic.f0_min_hz > 0.0 && c.acoustic.f0_min_hz < c.acoustic.f0_max_hz)) detail::config_error("need 0 < f0_min_hz < f0_max_hz");
  c.acoustic.n_mels = detail::non_negative_int(j, "n_mels");
  c.acoustic.contrast_bands = detail::non_negative_int(j, "contrast_bands");
  if (c.acoustic.n_mels < 5) detail::config_error("n_mels must be >= 5");
  if (c.acoustic.contrast_bands < 1) detail::config_error("contrast_bands must be >= 1");
  if (!j["functionals"].is_array()) detail::config_error("'functionals' must be an array of statistic names");
  for (const auto& s : j["functionals"]) {
    if (!s.is_string()) detail::config_error("'functionals' must contain strings");
    c.functionals.push_back(s.get<std::string>());
  }
  try {
    c.acoustic.bank = FunctionalBank::parse(c.functionals);
  } catch (const Error& e) {
    detail::config_error(std::string("functionals: ") + e.what());
  }
  c.seed = detail::non_negative_int(j, "seed");
  c.jobs = detail::non_negative_int(j, "jobs");
  for (const auto& f : feature_set_names()) {
    if (!j["features"][f].is_boolean()) detail::config_error("'features." + f + "' must be true or false");
    c.features[f] = j["features"][f].get<bool>();
  }
  for (const auto& p : path_keys()) {
    const json& v = j["paths"][p];
    if (v.is_null()) {
      c.paths[p] = std::nullopt;
      continue;
    }
    if (!v.is_string()) detail::config_error("'paths." + p + "' must be a string or null");
    std::filesystem::path path = v.get<std::string>();
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    if (!std::filesystem::is_regular_file(path)) detail::config_error("'paths." + p + "' does not exist: " + path.string());
    c.paths[p] = path;
    j["paths"][p] = path.string();
  }
  if (c.enabled("coherence") && !c.paths["embeddings"]) detail::config_error("coherence features require 'paths.embeddings'");
  if (c.enabled("sentiment") && !c.paths["valence_lexicon"]) detail::config_error("sentiment requires 'paths.valence_lexicon'");
  c.analysis = j["analysis"];
  if (!c.analysis.is_null() && !c.analysis.is_object()) detail::config_error("'analysis' must be an object");
  c.effective = j;
  return c;
}

inline json read_json_file(const std::filesystem::path& path, ErrorCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(code, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw Error(code, path.string() + " is not valid JSON");
  return j;
}

inline PipelineConfig load_config(const std::optional<std::filesystem::path>& path, const json& cli_json = json::object()) {
  json file = json::object();
  std::filesystem::path base;
  if (path) {
    file = read_json_file(*path, ErrorCode::ConfigError);
    base = path->parent_path();
  }
  return build_config(file, env_overrides(), cli_json, base);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of the settings that affect output; worker count is excluded.
inline std::string config_hash(const PipelineConfig& c) {
  json j = c.effective;
  j.erase("jobs");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

}  // namespace voxmark::cli

#endif
