// Run configuration: every knob of the simulator, protocols, learners and
// evaluation, with defaults that reproduce the desk-scale experiments.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "eskin/evalkit.hpp"
#include "eskin/pipeline.hpp"
#include "eskin/skin_sim.hpp"

namespace eskin {

inline constexpr const char* kConfigEnvVar = "ESKIN_CONFIG";

struct RunConfig {
  SkinModel skin;
  SingleForceProtocol single;
  TwoForceProtocol two;
  PipelineConfig pipeline;
  CvConfig single_cv{10, 42, 0};
  CvConfig two_cv{5, 42, 0};
  std::string out_dir = "eskin_out";

  void validate() const {
    skin.validate();
    if (single.reps_per_cell < 1 || two.reps < 1) throw ConfigError("reps must be >= 1");
    if (single_cv.k < 2 || two_cv.k < 2) throw UsageError("k must be >= 2");
    if (pipeline.forest.n_trees < 1) throw ConfigError("forest.n_trees must be >= 1");
    if (pipeline.gp.cap < 1) throw ConfigError("gp.cap must be >= 1");
  }
};

inline void to_json(nlohmann::json& j, const CvConfig& c) { j = {{"k", c.k}, {"seed", c.seed}, {"workers", c.workers}}; }
inline void from_json(const nlohmann::json& j, CvConfig& c) {
  c.k = j.value("k", c.k);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
}

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"skin", c.skin},         {"single_protocol", c.single}, {"two_protocol", c.two},
       {"pipeline", c.pipeline}, {"single_cv", c.single_cv},    {"two_cv", c.two_cv},
       {"out_dir", c.out_dir}};
}

// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, RunConfig& c) {
  RunConfig d;
  c.skin = j.value("skin", d.skin);
  c.single = j.value("single_protocol", d.single);
  c.two = j.value("two_protocol", d.two);
  c.pipeline = j.value("pipeline", d.pipeline);
  c.single_cv = d.single_cv;
  c.two_cv = d.two_cv;
  if (j.contains("single_cv")) from_json(j["single_cv"], c.single_cv);
  if (j.contains("two_cv")) from_json(j["two_cv"], c.two_cv);
  c.out_dir = j.value("out_dir", d.out_dir);
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  try {
    nlohmann::json j;
    in >> j;
    auto c = j.get<RunConfig>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
}

// Explicit path, else $ESKIN_CONFIG, else built-in defaults.
inline RunConfig resolve_config(const std::string& explicit_path) {
  if (!explicit_path.empty()) return load_config(explicit_path);
  if (const char* env = std::getenv(kConfigEnvVar); env && *env) return load_config(env);
  return RunConfig{};
}

}  // namespace eskin
