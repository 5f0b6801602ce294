#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "bmm/align.hpp"
#include "bmm/error.hpp"
#include "bmm/notelist.hpp"

namespace bmm {

inline constexpr const char* kVersion = "0.1.0";

/// Every tunable of the pipeline. Defaults are usable as-is.
struct Config {
  std::size_t clip_length = 16;
  double overlap = 0.5;
  CostParams cost;
  /// Fraction of matched edges (highest first) averaged into the degree.
  double top_q = 1.0;
  /// Matched pairs at or above this weight are flagged as suspect.
  double suspect_threshold = 0.45;
  std::size_t ngram_order = 3;
  std::uint64_t seed = 0;
  /// Worker threads for rank/eval; 0 picks the hardware concurrency.
  unsigned threads = 0;

  void validate() const {
    if (clip_length < 2) throw Error(ErrorCode::invalid_params, "l must be >= 2");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw Error(ErrorCode::invalid_params, "r must be in [0, 1)");
    cost.validate();
    if (!(top_q > 0.0 && top_q <= 1.0)) throw Error(ErrorCode::invalid_params, "q must be in (0, 1]");
    if (!std::isfinite(suspect_threshold)) throw Error(ErrorCode::invalid_params, "theta must be finite");
    if (ngram_order < 1) throw Error(ErrorCode::invalid_order, "n-gram order must be >= 1");
  }
};

/// Effective parameters as echoed in reports. `threads` is omitted since it
/// never changes results.
inline nlohmann::json to_json(const Config& c) {
  return {
      {"l", c.clip_length},
      {"r", c.overlap},
      {"k_down", c.cost.k_down},
      {"c_ins", c.cost.c_ins},
      {"c_del", c.cost.c_del},
      {"pitch_scale", c.cost.pitch_scale},
      {"dur_scale", c.cost.dur_scale},
      {"normalize_by_length", c.cost.normalize_by_length},
      {"note_distance", c.cost.note_distance},
      {"q", c.top_q},
      {"theta", c.suspect_threshold},
      {"ngram", c.ngram_order},
      {"seed", c.seed},
  };
}

/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
inline Config apply_json(Config base, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_params, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    const auto& v = it.value();
    try {
      if (key == "l") base.clip_length = v.get<std::size_t>();
      else if (key == "r") base.overlap = v.get<double>();
      else if (key == "k_down") base.cost.k_down = v.get<double>();
      else if (key == "c_ins") base.cost.c_ins = v.get<double>();
      else if (key == "c_del") base.cost.c_del = v.get<double>();
      else if (key == "pitch_scale") base.cost.pitch_scale = v.get<double>();
      else if (key == "dur_scale") base.cost.dur_scale = v.get<double>();
      else if (key == "normalize_by_length") base.cost.normalize_by_length = v.get<bool>();
      else if (key == "note_distance") base.cost.note_distance = v.get<bool>();
      else if (key == "q") base.top_q = v.get<double>();
      else if (key == "theta") base.suspect_threshold = v.get<double>();
      else if (key == "ngram") base.ngram_order = v.get<std::size_t>();
      else if (key == "seed") base.seed = v.get<std::uint64_t>();
      else if (key == "threads") base.threads = v.get<unsigned>();
      else throw Error(ErrorCode::invalid_params, "unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::invalid_params, "config key '" + key + "' has the wrong type");
    }
  }
  return base;
}

inline Config load_config(const std::filesystem::path& path, Config base = {}) {
  const auto bytes = read_file_bytes(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::syntax_error, path.string() + ": " + e.what());
  }
  return apply_json(std::move(base), j);
}

}  // namespace bmm
