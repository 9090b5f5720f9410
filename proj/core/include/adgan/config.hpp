#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "adgan/masksynth.hpp"
#include "adgan/model.hpp"
#include "adgan/phantom.hpp"
#include "adgan/trainer.hpp"

namespace adgan::config {

struct Paths {
  std::string dataset_dir = "data";
  std::string checkpoint_dir = "checkpoints";
  std::string output_dir = "out";

  bool operator==(const Paths&) const = default;
};

/// Every tunable of a run. Serialized as JSON with one object per section;
/// missing keys keep their defaults, unknown keys are rejected.
struct RunConfig {
  model::GeneratorConfig generator;
  trainer::TrainConfig train;
  masksynth::MaskSynthConfig masksynth;
  phantom::PhantomParams phantom;
  Paths paths;

  /// Reduced-width settings for CPU runs: desk generator, batch 4, 64 px
  /// crops, 128 px phantom canvases.
  static RunConfig desk();
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const model::GeneratorConfig& c);
nlohmann::json to_json(const trainer::TrainConfig& c);
nlohmann::json to_json(const masksynth::MaskSynthConfig& c);
nlohmann::json to_json(const phantom::PhantomParams& c);
nlohmann::json to_json(const RunConfig& c);

/// Strict parsers; ConfigError names the offending key.
model::GeneratorConfig generator_from_json(const nlohmann::json& j);
trainer::TrainConfig train_from_json(const nlohmann::json& j);
masksynth::MaskSynthConfig masksynth_from_json(const nlohmann::json& j);
phantom::PhantomParams phantom_from_json(const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);

RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace adgan::config
