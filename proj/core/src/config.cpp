#include "adgan/config.hpp"

#include <fstream>
#include <set>

#include "adgan/error.hpp"

namespace adgan::config {

using nlohmann::json;

namespace {

/// Reads keys from one JSON object and rejects any it did not consume.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      j_.at(key).get_to(out);
    } catch (const json::exception& e) {
      throw ConfigError("invalid value for '" + qualified(key) + "': " + e.what());
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown config key '" + qualified(item.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

std::string preset_name(model::ScalePreset p) { return p == model::ScalePreset::kDesk ? "desk" : "full"; }

model::ScalePreset parse_preset(const std::string& s) {
  if (s == "full") return model::ScalePreset::kFull;
  if (s == "desk") return model::ScalePreset::kDesk;
  throw ConfigError("generator.scale_preset must be 'full' or 'desk', got '" + s + "'");
}

std::string adversarial_name(losses::AdversarialMode m) {
  return m == losses::AdversarialMode::kLeastSquares ? "lsgan" : "bce";
}

losses::AdversarialMode parse_adversarial(const std::string& s) {
  if (s == "bce") return losses::AdversarialMode::kBce;
  if (s == "lsgan") return losses::AdversarialMode::kLeastSquares;
  throw ConfigError("train.adversarial must be 'bce' or 'lsgan', got '" + s + "'");
}

}  // namespace

RunConfig RunConfig::desk() {
  RunConfig c;
  c.generator.scale_preset = model::ScalePreset::kDesk;
  c.train.batch_size = 4;
  c.train.crop = 64;
  c.masksynth.canvas_h = 128;
  c.masksynth.canvas_w = 128;
  c.masksynth.a_range = {8.0, 14.0};
  c.masksynth.n_max = 12;
  return c;
}

void RunConfig::validate() const {
  generator.validate();
  train.validate();
  masksynth.validate();
  phantom.validate();
}

json to_json(const model::GeneratorConfig& c) {
  return json{{"base_channels", c.base_channels},       {"content_channels", c.content_channels},
              {"n_res_blocks_enc", c.n_res_blocks_enc}, {"n_res_blocks_dec", c.n_res_blocks_dec},
              {"image_channels", c.image_channels},     {"scale_preset", preset_name(c.scale_preset)},
              {"mlp_hidden", c.mlp_hidden}};
}

json to_json(const trainer::TrainConfig& c) {
  return json{
      {"total_iters", c.total_iters},
      {"const_lr_iters", c.const_lr_iters},
      {"lr", c.lr},
      {"weight_decay", c.weight_decay},
      {"adam_betas", c.adam_betas},
      {"batch_size", c.batch_size},
      {"crop", c.crop},
      {"weights",
       {{"lambda_rec", c.weights.lambda_rec}, {"lambda_cyc", c.weights.lambda_cyc},
        {"lambda_ctr", c.weights.lambda_ctr}}},
      {"flags",
       {{"use_rec", c.flags.use_rec},
        {"use_ctr", c.flags.use_ctr},
        {"use_cyc", c.flags.use_cyc},
        {"adain_in_encoder", c.flags.adain_in_encoder},
        {"aligned_training", c.flags.aligned_training}}},
      {"adversarial", adversarial_name(c.adversarial)},
      {"seed", c.seed},
      {"checkpoint_interval", c.checkpoint_interval},
  };
}

json to_json(const masksynth::MaskSynthConfig& c) {
  return json{{"n_max", c.n_max},
              {"a_range", c.a_range},
              {"e_range", c.e_range},
              {"canvas_h", c.canvas_h},
              {"canvas_w", c.canvas_w},
              {"max_attempts_per_object", c.max_attempts_per_object},
              {"max_geometry_resamples", c.max_geometry_resamples},
              {"edge_width", c.edge_width}};
}

json to_json(const phantom::PhantomParams& c) {
  return json{{"peak_intensity_range", c.peak_intensity_range},
              {"radial_falloff", c.radial_falloff},
              {"blur_sigma", c.blur_sigma},
              {"noise_sigma", c.noise_sigma},
              {"background_level", c.background_level}};
}

json to_json(const RunConfig& c) {
  return json{{"generator", to_json(c.generator)},
              {"train", to_json(c.train)},
              {"masksynth", to_json(c.masksynth)},
              {"phantom", to_json(c.phantom)},
              {"paths",
               {{"dataset_dir", c.paths.dataset_dir},
                {"checkpoint_dir", c.paths.checkpoint_dir},
                {"output_dir", c.paths.output_dir}}}};
}

model::GeneratorConfig generator_from_json(const json& j) {
  model::GeneratorConfig c;
  Section s(j, "generator");
  s.read("base_channels", c.base_channels);
  s.read("content_channels", c.content_channels);
  s.read("n_res_blocks_enc", c.n_res_blocks_enc);
  s.read("n_res_blocks_dec", c.n_res_blocks_dec);
  s.read("image_channels", c.image_channels);
  std::string preset = preset_name(c.scale_preset);
  s.read("scale_preset", preset);
  c.scale_preset = parse_preset(preset);
  s.read("mlp_hidden", c.mlp_hidden);
  s.finish();
  return c;
}

trainer::TrainConfig train_from_json(const json& j) {
  trainer::TrainConfig c;
  Section s(j, "train");
  s.read("total_iters", c.total_iters);
  s.read("const_lr_iters", c.const_lr_iters);
  s.read("lr", c.lr);
  s.read("weight_decay", c.weight_decay);
  s.read("adam_betas", c.adam_betas);
  s.read("batch_size", c.batch_size);
  s.read("crop", c.crop);
  if (const json* w = s.child("weights")) {
    Section ws(*w, "train.weights");
    ws.read("lambda_rec", c.weights.lambda_rec);
    ws.read("lambda_cyc", c.weights.lambda_cyc);
    ws.read("lambda_ctr", c.weights.lambda_ctr);
    ws.finish();
  }
  if (const json* f = s.child("flags")) {
    Section fs(*f, "train.flags");
    fs.read("use_rec", c.flags.use_rec);
    fs.read("use_ctr", c.flags.use_ctr);
    fs.read("use_cyc", c.flags.use_cyc);
    fs.read("adain_in_encoder", c.flags.adain_in_encoder);
    fs.read("aligned_training", c.flags.aligned_training);
    fs.finish();
  }
  std::string adversarial = adversarial_name(c.adversarial);
  s.read("adversarial", adversarial);
  c.adversarial = parse_adversarial(adversarial);
  s.read("seed", c.seed);
  s.read("checkpoint_interval", c.checkpoint_interval);
  s.finish();
  return c;
}

masksynth::MaskSynthConfig masksynth_from_json(const json& j) {
  masksynth::MaskSynthConfig c;
  Section s(j, "masksynth");
  s.read("n_max", c.n_max);
  s.read("a_range", c.a_range);
  s.read("e_range", c.e_range);
  s.read("canvas_h", c.canvas_h);
  s.read("canvas_w", c.canvas_w);
  s.read("max_attempts_per_object", c.max_attempts_per_object);
  s.read("max_geometry_resamples", c.max_geometry_resamples);
  s.read("edge_width", c.edge_width);
  s.finish();
  return c;
}

phantom::PhantomParams phantom_from_json(const json& j) {
  phantom::PhantomParams c;
  Section s(j, "phantom");
  s.read("peak_intensity_range", c.peak_intensity_range);
  s.read("radial_falloff", c.radial_falloff);
  s.read("blur_sigma", c.blur_sigma);
  s.read("noise_sigma", c.noise_sigma);
  s.read("background_level", c.background_level);
  s.finish();
  return c;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Section s(j, "");
  if (const json* g = s.child("generator")) c.generator = generator_from_json(*g);
  if (const json* t = s.child("train")) c.train = train_from_json(*t);
  if (const json* m = s.child("masksynth")) c.masksynth = masksynth_from_json(*m);
  if (const json* p = s.child("phantom")) c.phantom = phantom_from_json(*p);
  if (const json* p = s.child("paths")) {
    Section ps(*p, "paths");
    ps.read("dataset_dir", c.paths.dataset_dir);
    ps.read("checkpoint_dir", c.paths.checkpoint_dir);
    ps.read("output_dir", c.paths.output_dir);
    ps.finish();
  }
  s.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path.string());
  out << to_json(config).dump(2) << '\n';
}

}  // namespace adgan::config
