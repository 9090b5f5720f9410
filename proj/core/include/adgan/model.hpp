#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <torch/torch.h>

namespace adgan::model {

enum class Domain : int { kImage = 0, kMask = 1 };

constexpr Domain other(Domain d) { return d == Domain::kImage ? Domain::kMask : Domain::kImage; }
constexpr int index(Domain d) { return static_cast<int>(d); }

/// Domain conditioning vector. (1, 0) selects the image domain, (0, 1) the
/// mask domain; convex combinations are used for label interpolation.
struct DomainLabel {
  std::array<float, 2> value{1.0f, 0.0f};

  static DomainLabel of(Domain d);
  /// (1 - alpha) * from + alpha * to.
  static DomainLabel lerp(const DomainLabel& from, const DomainLabel& to, double alpha);

  /// Throws std::invalid_argument unless components lie in [0, 1] and sum to 1.
  void validate() const;
  /// [batch, 2] float tensor.
  torch::Tensor to_tensor(std::int64_t batch, torch::Device device = torch::kCPU) const;

  bool operator==(const DomainLabel&) const = default;
};

enum class ScalePreset { kFull, kDesk };

/// Channel widths are given at full scale; the desk preset divides every
/// convolutional width by 4 and leaves the topology unchanged.
struct GeneratorConfig {
  int base_channels = 64;
  int content_channels = 256;
  int n_res_blocks_enc = 4;
  int n_res_blocks_dec = 4;
  int image_channels = 1;
  ScalePreset scale_preset = ScalePreset::kFull;
  int mlp_hidden = 256;

  int width(int full_scale_channels) const;
  int base() const { return width(base_channels); }
  int content() const { return width(content_channels); }
  void validate() const;

  bool operator==(const GeneratorConfig&) const = default;
};

constexpr double kAdainEpsilon = 1e-5;

/// scale * (x - mean) / sqrt(var + eps) + shift, with per-sample per-channel
/// spatial statistics. x is [N, C, H, W]; scale and shift are [N, C] or [C].
torch::Tensor adain(const torch::Tensor& x, const torch::Tensor& scale, const torch::Tensor& shift,
                    double eps = kAdainEpsilon);

/// Affine parameters of one AdaIN layer, each [N, C].
struct StyleSlice {
  torch::Tensor scale;
  torch::Tensor shift;
};
using StyleBundle = std::vector<StyleSlice>;

/// Splits a flat [N, sum(2 * widths)] MLP output into per-layer (scale, shift)
/// pairs laid out as scale block followed by shift block for each layer.
StyleBundle split_style(const torch::Tensor& flat, std::span<const int> widths);

/// FC(2, h) -> ReLU -> FC(h, h) -> ReLU -> FC(h, n_s).
class StyleMlpImpl : public torch::nn::Module {
 public:
  StyleMlpImpl(int hidden, std::int64_t out_width);
  torch::Tensor forward(const torch::Tensor& labels);
  std::int64_t out_width() const { return out_width_; }

 private:
  torch::nn::Linear fc1_{nullptr}, fc2_{nullptr}, fc3_{nullptr};
  std::int64_t out_width_;
};
TORCH_MODULE(StyleMlp);

/// Convolution followed by AdaIN (or affine instance norm when not adaptive)
/// and ReLU.
class ConvNormBlockImpl : public torch::nn::Module {
 public:
  ConvNormBlockImpl(int in, int out, int kernel, int stride, int padding, bool adaptive);
  torch::Tensor forward(const torch::Tensor& x, const StyleSlice* style);
  bool adaptive() const { return adaptive_; }
  int out_channels() const { return out_channels_; }

 private:
  torch::nn::Conv2d conv_{nullptr};
  torch::nn::InstanceNorm2d norm_{nullptr};
  bool adaptive_;
  int out_channels_;
};
TORCH_MODULE(ConvNormBlock);

/// Stride-2 transposed convolution doubling the spatial size, then AdaIN and
/// ReLU. The input is replicate-padded by one pixel and the output center
/// cropped, so every output pixel sees a full kernel footprint.
class UpBlockImpl : public torch::nn::Module {
 public:
  UpBlockImpl(int in, int out);
  torch::Tensor forward(const torch::Tensor& x, const StyleSlice& style);

 private:
  torch::nn::ConvTranspose2d deconv_{nullptr};
};
TORCH_MODULE(UpBlock);

/// 7x7 conv, two stride-2 3x3 convs and residual blocks; every layer
/// normalized by AdaIN when adaptive.
class EncoderImpl : public torch::nn::Module {
 public:
  EncoderImpl(const GeneratorConfig& config, bool adaptive);
  torch::Tensor forward(const torch::Tensor& x, std::span<const StyleSlice> styles);
  /// Channel widths of the AdaIN layers in forward order; empty if not adaptive.
  std::vector<int> adain_widths() const;

 private:
  std::vector<ConvNormBlock> down_;
  std::vector<ConvNormBlock> res_;
  bool adaptive_;
};
TORCH_MODULE(Encoder);

/// Residual AdaIN blocks, two transposed-conv upsamplers and a 7x7 conv with
/// tanh output.
class DecoderImpl : public torch::nn::Module {
 public:
  explicit DecoderImpl(const GeneratorConfig& config);
  torch::Tensor forward(const torch::Tensor& content, std::span<const StyleSlice> styles);
  std::vector<int> adain_widths() const;

 private:
  std::vector<ConvNormBlock> res_;
  std::vector<UpBlock> up_;
  torch::nn::Conv2d out_{nullptr};
  std::vector<int> up_widths_;
};
TORCH_MODULE(Decoder);

/// Unified generator: one encoder, one decoder and one style MLP shared by
/// both domains. The MLP output is sliced over all AdaIN layers, encoder
/// layers first.
class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(const GeneratorConfig& config, bool adain_in_encoder = true);

  /// labels: [N, 2]. Returns content of shape [N, C, H/4, W/4].
  torch::Tensor encode(const torch::Tensor& x, const torch::Tensor& labels);
  torch::Tensor decode(const torch::Tensor& content, const torch::Tensor& labels);
  StyleBundle style(const torch::Tensor& labels);

  std::vector<int> encoder_adain_widths() const { return encoder_->adain_widths(); }
  std::vector<int> decoder_adain_widths() const { return decoder_->adain_widths(); }
  /// Total MLP output width n_s.
  std::int64_t style_width() const { return mlp_->out_width(); }

  const GeneratorConfig& config() const { return config_; }
  bool adain_in_encoder() const { return adain_in_encoder_; }
  Encoder& encoder() { return encoder_; }
  Decoder& decoder() { return decoder_; }
  StyleMlp& mlp() { return mlp_; }

 private:
  GeneratorConfig config_;
  bool adain_in_encoder_;
  Encoder encoder_{nullptr};
  Decoder decoder_{nullptr};
  StyleMlp mlp_{nullptr};
  std::vector<int> all_widths_;
};
TORCH_MODULE(Generator);

/// Markovian discriminator: shared four-layer conv body with two 4x4 conv
/// heads, one per domain. Output logits are [N, 1, H/8, W/8].
class DiscriminatorImpl : public torch::nn::Module {
 public:
  explicit DiscriminatorImpl(const GeneratorConfig& config);

  torch::Tensor body(const torch::Tensor& x);
  torch::Tensor head(const torch::Tensor& features, Domain branch);
  torch::Tensor forward(const torch::Tensor& x, Domain branch);
  /// Per-sample branch selection; branches is an int64 [N] tensor of 0/1.
  torch::Tensor forward(const torch::Tensor& x, const torch::Tensor& branches);

 private:
  torch::nn::Sequential body_{nullptr};
  torch::nn::Sequential head_image_{nullptr};
  torch::nn::Sequential head_mask_{nullptr};
};
TORCH_MODULE(Discriminator);

/// Conv and transposed-conv weights ~ N(0, 0.02), biases zero.
void init_weights(torch::nn::Module& module);

/// Disables requires_grad on a parameter set for the guard's lifetime.
/// Autograd records requires_grad when an op runs, so graphs built inside the
/// guard propagate gradients through these parameters without accumulating
/// into them.
class FrozenParameters {
 public:
  explicit FrozenParameters(std::vector<torch::Tensor> params);
  ~FrozenParameters();
  FrozenParameters(const FrozenParameters&) = delete;
  FrozenParameters& operator=(const FrozenParameters&) = delete;

 private:
  std::vector<torch::Tensor> params_;
  std::vector<bool> previous_;
};

/// Shape of the content map for an input of the given size.
std::array<std::int64_t, 3> content_shape(const GeneratorConfig& config, std::int64_t height, std::int64_t width);

}  // namespace adgan::model
