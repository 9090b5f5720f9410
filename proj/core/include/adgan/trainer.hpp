#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "adgan/grid.hpp"
#include "adgan/losses.hpp"
#include "adgan/model.hpp"
#include "adgan/rng.hpp"

namespace adgan::trainer {

struct TrainConfig {
  int total_iters = 10000;
  int const_lr_iters = 5000;
  double lr = 1e-4;
  double weight_decay = 1e-4;
  std::array<double, 2> adam_betas{0.5, 0.999};
  int batch_size = 16;
  int crop = 256;
  losses::LossWeights weights;
  losses::AblationFlags flags;
  losses::AdversarialMode adversarial = losses::AdversarialMode::kBce;
  std::uint64_t seed = 0;
  int checkpoint_interval = 1000;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Constant for the first const_lr_iters iterations, then linear decay to 0
/// at total_iters. Throws std::out_of_range outside [0, total_iters].
double lr_at(const TrainConfig& config, int iteration);

struct AugmentParams {
  bool flip_horizontal = false;
  bool flip_vertical = false;
  int quarter_turns = 0;  // counter-clockwise
  int top = 0;
  int left = 0;
};

ImageTensor flip_horizontal(const ImageTensor& image);
ImageTensor flip_vertical(const ImageTensor& image);
ImageTensor rotate90(const ImageTensor& image, int quarter_turns);
ImageTensor crop(const ImageTensor& image, int top, int left, int height, int width);

/// Draws flips, a quarter-turn count and a crop offset valid for the rotated image.
AugmentParams sample_augment(Rng& rng, int height, int width, int crop_size);
/// Flip, rotate, then crop to crop_size x crop_size. Throws ShapeError when
/// the image is smaller than the crop.
ImageTensor apply_augment(const ImageTensor& image, const AugmentParams& params, int crop_size);
ImageTensor augment(const ImageTensor& image, int crop_size, Rng& rng);

/// [N, 1, H, W] float tensor from equally sized images.
torch::Tensor to_batch(const std::vector<ImageTensor>& images, torch::Device device = torch::kCPU);
/// Converts a [H, W], [1, H, W] or [1, 1, H, W] tensor.
ImageTensor from_tensor(const torch::Tensor& t);

/// Cycles through a domain's images in reshuffled epochs.
class DomainSampler {
 public:
  explicit DomainSampler(std::vector<ImageTensor> images);
  const ImageTensor& next(Rng& rng);
  std::size_t size() const { return images_.size(); }

  nlohmann::json state() const;
  void restore(const nlohmann::json& state);

 private:
  std::vector<ImageTensor> images_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

struct StepReport {
  int iteration = 0;  // iteration index the step ran at
  double rec = 0.0;
  double adv_d = 0.0;
  double adv_g = 0.0;
  double ctr = 0.0;
  double cyc = 0.0;
  double total = 0.0;
  double lr = 0.0;
  double grad_norm_g = 0.0;
  double grad_norm_d = 0.0;
};

/// Owns the generator, discriminator and their optimizers and runs aligned
/// disentangling training steps.
class Trainer {
 public:
  Trainer(const model::GeneratorConfig& generator_config, const TrainConfig& config,
          torch::Device device = torch::kCPU);

  /// One discriminator update followed by one generator update. x1 holds
  /// image-domain samples, x2 mask-domain samples, both [N, 1, H, W].
  /// Throws NumericError when a loss is not finite.
  StepReport train_step(const torch::Tensor& x1, const torch::Tensor& x2);

  int iteration() const { return iteration_; }
  const TrainConfig& config() const { return config_; }
  const model::GeneratorConfig& generator_config() const { return generator_config_; }
  model::Generator& generator() { return generator_; }
  model::Discriminator& discriminator() { return discriminator_; }
  torch::Device device() const { return device_; }

  /// Writes weights, optimizer state, iteration, configs and caller state.
  void save(const std::filesystem::path& path, const nlohmann::json& extra = nlohmann::json::object()) const;
  /// Restores a trainer; caller state saved with it is returned through extra.
  static Trainer load(const std::filesystem::path& path, torch::Device device = torch::kCPU,
                      nlohmann::json* extra = nullptr);

 private:
  void set_lr(double lr);

  model::GeneratorConfig generator_config_;
  TrainConfig config_;
  torch::Device device_;
  model::Generator generator_{nullptr};
  model::Discriminator discriminator_{nullptr};
  std::unique_ptr<torch::optim::AdamW> opt_g_;
  std::unique_ptr<torch::optim::AdamW> opt_d_;
  std::unique_ptr<losses::GeneratorTranslator> translator_;
  std::unique_ptr<losses::DiscriminatorCritic> critic_;
  int iteration_ = 0;
};

/// Reads a checkpoint's metadata without building the networks.
struct CheckpointInfo {
  int iteration = 0;
  nlohmann::json generator_config;
  nlohmann::json train_config;
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> parameter_shapes;
};
CheckpointInfo describe_checkpoint(const std::filesystem::path& path);

/// Training log CSV: iteration,L_rec,L_adv_d,L_adv_g,L_ctr,L_cyc,total,lr.
std::string log_header();
std::string log_row(const StepReport& report);

struct FitOptions {
  std::filesystem::path images_dir;
  std::filesystem::path masks_dir;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> resume_from;
  std::function<void(const StepReport&)> on_step;
};

struct FitResult {
  std::filesystem::path final_checkpoint;
  std::filesystem::path log_path;
  std::vector<StepReport> reports;
};

/// Trains on unpaired image and mask directories, writing train_log.csv,
/// checkpoint_<iter>.pt every checkpoint_interval iterations and final.pt at
/// the end. Throws IoError for empty or unreadable datasets.
FitResult fit(const FitOptions& options, const model::GeneratorConfig& generator_config, const TrainConfig& config,
              torch::Device device = torch::kCPU);

}  // namespace adgan::trainer
