#include "adgan/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "adgan/error.hpp"

namespace adgan::model {

namespace nn = torch::nn;

DomainLabel DomainLabel::of(Domain d) {
  return d == Domain::kImage ? DomainLabel{{1.0f, 0.0f}} : DomainLabel{{0.0f, 1.0f}};
}

DomainLabel DomainLabel::lerp(const DomainLabel& from, const DomainLabel& to, double alpha) {
  DomainLabel out;
  for (std::size_t k = 0; k < 2; ++k) {
    out.value[k] = static_cast<float>((1.0 - alpha) * from.value[k] + alpha * to.value[k]);
  }
  return out;
}

void DomainLabel::validate() const {
  for (float v : value) {
    if (!(v >= 0.0f && v <= 1.0f)) throw std::invalid_argument("domain label components must lie in [0, 1]");
  }
  if (std::abs(value[0] + value[1] - 1.0f) > 1e-5f) throw std::invalid_argument("domain label must sum to 1");
}

torch::Tensor DomainLabel::to_tensor(std::int64_t batch, torch::Device device) const {
  auto t = torch::tensor({value[0], value[1]}, torch::kFloat32).view({1, 2});
  return t.expand({batch, 2}).contiguous().to(device);
}

int GeneratorConfig::width(int full_scale_channels) const {
  return scale_preset == ScalePreset::kDesk ? full_scale_channels / 4 : full_scale_channels;
}

void GeneratorConfig::validate() const {
  if (base_channels < 4 || content_channels < 4) throw ConfigError("generator channel widths must be >= 4");
  if (scale_preset == ScalePreset::kDesk && (base_channels % 4 != 0 || content_channels % 4 != 0)) {
    throw ConfigError("desk preset requires channel widths divisible by 4");
  }
  if (n_res_blocks_enc < 0 || n_res_blocks_dec < 0) throw ConfigError("residual block counts must be >= 0");
  if (image_channels < 1) throw ConfigError("generator.image_channels must be >= 1");
  if (mlp_hidden < 1) throw ConfigError("generator.mlp_hidden must be >= 1");
}

torch::Tensor adain(const torch::Tensor& x, const torch::Tensor& scale, const torch::Tensor& shift, double eps) {
  if (x.dim() != 4) throw ShapeError("adain expects a [N, C, H, W] tensor");
  if (x.size(2) * x.size(3) == 0) throw ShapeError("adain: zero spatial extent");
  const auto n = x.size(0);
  const auto c = x.size(1);
  auto reshape = [&](const torch::Tensor& p, const char* name) {
    if (p.size(-1) != c) {
      throw ShapeError(std::string("adain: ") + name + " has " + std::to_string(p.size(-1)) + " channels, input has " +
                       std::to_string(c));
    }
    if (p.dim() == 1) return p.view({1, c, 1, 1});
    if (p.dim() == 2 && (p.size(0) == n || p.size(0) == 1)) return p.view({p.size(0), c, 1, 1});
    throw ShapeError(std::string("adain: ") + name + " must be [C] or [N, C]");
  };
  const auto mean = x.mean({2, 3}, /*keepdim=*/true);
  const auto centered = x - mean;
  const auto var = centered.pow(2).mean({2, 3}, /*keepdim=*/true);
  const auto normalized = centered * torch::rsqrt(var + eps);
  return reshape(scale, "scale") * normalized + reshape(shift, "shift");
}

StyleBundle split_style(const torch::Tensor& flat, std::span<const int> widths) {
  const std::int64_t needed = 2 * std::accumulate(widths.begin(), widths.end(), std::int64_t{0});
  if (flat.dim() != 2 || flat.size(1) != needed) {
    throw ShapeError("style vector width " + std::to_string(flat.dim() == 2 ? flat.size(1) : -1) +
                     " does not match the AdaIN inventory (" + std::to_string(needed) + ")");
  }
  StyleBundle out;
  out.reserve(widths.size());
  std::int64_t offset = 0;
  for (int w : widths) {
    out.push_back({flat.narrow(1, offset, w), flat.narrow(1, offset + w, w)});
    offset += 2 * w;
  }
  return out;
}

StyleMlpImpl::StyleMlpImpl(int hidden, std::int64_t out_width) : out_width_(out_width) {
  fc1_ = register_module("fc1", nn::Linear(2, hidden));
  fc2_ = register_module("fc2", nn::Linear(hidden, hidden));
  fc3_ = register_module("fc3", nn::Linear(hidden, out_width));
}

torch::Tensor StyleMlpImpl::forward(const torch::Tensor& labels) {
  if (labels.dim() != 2 || labels.size(1) != 2) throw ShapeError("style MLP expects [N, 2] domain labels");
  return fc3_(torch::relu(fc2_(torch::relu(fc1_(labels)))));
}

ConvNormBlockImpl::ConvNormBlockImpl(int in, int out, int kernel, int stride, int padding, bool adaptive)
    : adaptive_(adaptive), out_channels_(out) {
  conv_ = register_module("conv", nn::Conv2d(nn::Conv2dOptions(in, out, kernel)
                                                 .stride(stride)
                                                 .padding(padding)
                                                 .padding_mode(torch::kReflect)
                                                 .bias(false)));
  if (!adaptive_) norm_ = register_module("norm", nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out).affine(true)));
}

torch::Tensor ConvNormBlockImpl::forward(const torch::Tensor& x, const StyleSlice* style) {
  auto y = conv_(x);
  if (adaptive_) {
    if (style == nullptr) throw std::logic_error("adaptive block called without a style slice");
    y = adain(y, style->scale, style->shift);
  } else {
    y = norm_(y);
  }
  return torch::relu(y);
}

UpBlockImpl::UpBlockImpl(int in, int out) {
  deconv_ = register_module(
      "deconv",
      nn::ConvTranspose2d(nn::ConvTranspose2dOptions(in, out, 3).stride(2).padding(1).output_padding(1).bias(false)));
}

torch::Tensor UpBlockImpl::forward(const torch::Tensor& x, const StyleSlice& style) {
  const auto h = x.size(2);
  const auto w = x.size(3);
  auto padded = torch::nn::functional::pad(x, torch::nn::functional::PadFuncOptions({1, 1, 1, 1}).mode(torch::kReplicate));
  auto y = deconv_(padded).narrow(2, 2, 2 * h).narrow(3, 2, 2 * w);
  return torch::relu(adain(y, style.scale, style.shift));
}

EncoderImpl::EncoderImpl(const GeneratorConfig& config, bool adaptive) : adaptive_(adaptive) {
  const int b = config.base();
  const int c = config.content();
  down_.push_back(register_module("down0", ConvNormBlock(config.image_channels, b, 7, 1, 3, adaptive)));
  down_.push_back(register_module("down1", ConvNormBlock(b, 2 * b, 3, 2, 1, adaptive)));
  down_.push_back(register_module("down2", ConvNormBlock(2 * b, c, 3, 2, 1, adaptive)));
  for (int k = 0; k < config.n_res_blocks_enc; ++k) {
    res_.push_back(register_module("res" + std::to_string(k), ConvNormBlock(c, c, 3, 1, 1, adaptive)));
  }
}

std::vector<int> EncoderImpl::adain_widths() const {
  std::vector<int> widths;
  if (!adaptive_) return widths;
  for (const auto& blk : down_) widths.push_back(blk->out_channels());
  for (const auto& blk : res_) widths.push_back(blk->out_channels());
  return widths;
}

torch::Tensor EncoderImpl::forward(const torch::Tensor& x, std::span<const StyleSlice> styles) {
  const std::size_t needed = adaptive_ ? down_.size() + res_.size() : 0;
  if (styles.size() != needed) throw ShapeError("encoder received the wrong number of style slices");
  std::size_t s = 0;
  auto next = [&]() -> const StyleSlice* { return adaptive_ ? &styles[s++] : nullptr; };
  auto y = x;
  for (auto& blk : down_) y = blk->forward(y, next());
  for (auto& blk : res_) y = y + blk->forward(y, next());
  return y;
}

DecoderImpl::DecoderImpl(const GeneratorConfig& config) {
  const int b = config.base();
  const int c = config.content();
  for (int k = 0; k < config.n_res_blocks_dec; ++k) {
    res_.push_back(register_module("res" + std::to_string(k), ConvNormBlock(c, c, 3, 1, 1, true)));
  }
  up_.push_back(register_module("up0", UpBlock(c, 2 * b)));
  up_.push_back(register_module("up1", UpBlock(2 * b, b)));
  up_widths_ = {2 * b, b};
  out_ = register_module("out", nn::Conv2d(nn::Conv2dOptions(b, config.image_channels, 7)
                                               .padding(3)
                                               .padding_mode(torch::kReflect)));
}

std::vector<int> DecoderImpl::adain_widths() const {
  std::vector<int> widths;
  for (const auto& blk : res_) widths.push_back(blk->out_channels());
  widths.insert(widths.end(), up_widths_.begin(), up_widths_.end());
  return widths;
}

torch::Tensor DecoderImpl::forward(const torch::Tensor& content, std::span<const StyleSlice> styles) {
  if (styles.size() != res_.size() + up_.size()) throw ShapeError("decoder received the wrong number of style slices");
  std::size_t s = 0;
  auto y = content;
  for (auto& blk : res_) y = y + blk->forward(y, &styles[s++]);
  for (auto& blk : up_) y = blk->forward(y, styles[s++]);
  return torch::tanh(out_(y));
}

GeneratorImpl::GeneratorImpl(const GeneratorConfig& config, bool adain_in_encoder)
    : config_(config), adain_in_encoder_(adain_in_encoder) {
  config_.validate();
  encoder_ = register_module("encoder", Encoder(config_, adain_in_encoder));
  decoder_ = register_module("decoder", Decoder(config_));
  all_widths_ = encoder_->adain_widths();
  const auto dec = decoder_->adain_widths();
  all_widths_.insert(all_widths_.end(), dec.begin(), dec.end());
  const std::int64_t n_s = 2 * std::accumulate(all_widths_.begin(), all_widths_.end(), std::int64_t{0});
  mlp_ = register_module("mlp", StyleMlp(config_.mlp_hidden, n_s));

  init_weights(*this);
  // Start every AdaIN layer at unit scale and zero shift.
  torch::NoGradGuard no_grad;
  auto bias = mlp_->named_parameters()["fc3.bias"];
  bias.zero_();
  std::int64_t offset = 0;
  for (int w : all_widths_) {
    bias.narrow(0, offset, w).fill_(1.0);
    offset += 2 * w;
  }
}

StyleBundle GeneratorImpl::style(const torch::Tensor& labels) {
  return split_style(mlp_->forward(labels), all_widths_);
}

namespace {

torch::Tensor match_batch(const torch::Tensor& labels, std::int64_t batch) {
  if (labels.dim() != 2 || labels.size(1) != 2) throw ShapeError("domain labels must be [N, 2]");
  if (labels.size(0) == batch) return labels;
  if (labels.size(0) == 1) return labels.expand({batch, 2});
  throw ShapeError("domain label batch does not match input batch");
}

}  // namespace

torch::Tensor GeneratorImpl::encode(const torch::Tensor& x, const torch::Tensor& labels) {
  if (x.dim() != 4 || x.size(1) != config_.image_channels) {
    throw ShapeError("encode expects [N, " + std::to_string(config_.image_channels) + ", H, W]");
  }
  if (x.size(2) % 4 != 0 || x.size(3) % 4 != 0 || x.size(2) < 4 || x.size(3) < 4) {
    throw ShapeError("encode: spatial dims must be positive multiples of 4, got " + std::to_string(x.size(2)) + "x" +
                     std::to_string(x.size(3)));
  }
  const auto styles = style(match_batch(labels, x.size(0)));
  const auto n_enc = encoder_->adain_widths().size();
  return encoder_->forward(x, std::span<const StyleSlice>(styles.data(), n_enc));
}

torch::Tensor GeneratorImpl::decode(const torch::Tensor& content, const torch::Tensor& labels) {
  if (content.dim() != 4 || content.size(1) != config_.content()) {
    throw ShapeError("decode expects content with " + std::to_string(config_.content()) + " channels");
  }
  const auto styles = style(match_batch(labels, content.size(0)));
  const auto n_enc = encoder_->adain_widths().size();
  return decoder_->forward(content, std::span<const StyleSlice>(styles.data() + n_enc, styles.size() - n_enc));
}

namespace {

// Pads (left 1, right 2) so a 4x4 stride-1 conv preserves the spatial size.
void append_stride1_conv(nn::Sequential& seq, int in, int out, bool bias) {
  seq->push_back(nn::ZeroPad2d(nn::ZeroPad2dOptions({1, 2, 1, 2})));
  seq->push_back(nn::Conv2d(nn::Conv2dOptions(in, out, 4).stride(1).padding(0).bias(bias)));
}

nn::Sequential stride1_conv(int in, int out, bool bias) {
  nn::Sequential seq;
  append_stride1_conv(seq, in, out, bias);
  return seq;
}

}  // namespace

DiscriminatorImpl::DiscriminatorImpl(const GeneratorConfig& config) {
  const int b = config.base();
  const auto lrelu = nn::LeakyReLUOptions().negative_slope(0.2);
  nn::Sequential body;
  body->push_back(nn::Conv2d(nn::Conv2dOptions(config.image_channels, b, 4).stride(2).padding(1)));
  body->push_back(nn::LeakyReLU(lrelu));
  body->push_back(nn::Conv2d(nn::Conv2dOptions(b, 2 * b, 4).stride(2).padding(1).bias(false)));
  body->push_back(nn::InstanceNorm2d(2 * b));
  body->push_back(nn::LeakyReLU(lrelu));
  body->push_back(nn::Conv2d(nn::Conv2dOptions(2 * b, 4 * b, 4).stride(2).padding(1).bias(false)));
  body->push_back(nn::InstanceNorm2d(4 * b));
  body->push_back(nn::LeakyReLU(lrelu));
  append_stride1_conv(body, 4 * b, 8 * b, false);
  body->push_back(nn::InstanceNorm2d(8 * b));
  body->push_back(nn::LeakyReLU(lrelu));
  body_ = register_module("body", body);
  head_image_ = register_module("head_image", stride1_conv(8 * b, 1, true));
  head_mask_ = register_module("head_mask", stride1_conv(8 * b, 1, true));
  init_weights(*this);
}

torch::Tensor DiscriminatorImpl::body(const torch::Tensor& x) {
  if (x.dim() != 4 || x.size(2) % 8 != 0 || x.size(3) % 8 != 0) {
    throw ShapeError("discriminator input must be [N, C, H, W] with H, W multiples of 8");
  }
  return body_->forward(x);
}

torch::Tensor DiscriminatorImpl::head(const torch::Tensor& features, Domain branch) {
  switch (branch) {
    case Domain::kImage:
      return head_image_->forward(features);
    case Domain::kMask:
      return head_mask_->forward(features);
  }
  throw std::invalid_argument("invalid discriminator branch");
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& x, Domain branch) {
  if (branch != Domain::kImage && branch != Domain::kMask) throw std::invalid_argument("invalid discriminator branch");
  return head(body(x), branch);
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& x, const torch::Tensor& branches) {
  if (branches.dim() != 1 || branches.size(0) != x.size(0)) {
    throw ShapeError("branch selector must be a [N] tensor matching the batch");
  }
  if (branches.lt(0).any().item<bool>() || branches.gt(1).any().item<bool>()) {
    throw std::invalid_argument("invalid discriminator branch");
  }
  const auto features = body(x);
  const auto n_mask = branches.sum().item<std::int64_t>();
  if (n_mask == 0) return head(features, Domain::kImage);
  if (n_mask == x.size(0)) return head(features, Domain::kMask);
  const auto select = branches.view({-1, 1, 1, 1}).eq(1);
  return torch::where(select, head(features, Domain::kMask), head(features, Domain::kImage));
}

void init_weights(torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  module.apply([](torch::nn::Module& m) {
    if (auto* conv = m.as<nn::Conv2d>()) {
      nn::init::normal_(conv->weight, 0.0, 0.02);
      if (conv->bias.defined()) nn::init::zeros_(conv->bias);
    } else if (auto* deconv = m.as<nn::ConvTranspose2d>()) {
      nn::init::normal_(deconv->weight, 0.0, 0.02);
      if (deconv->bias.defined()) nn::init::zeros_(deconv->bias);
    }
  });
}

FrozenParameters::FrozenParameters(std::vector<torch::Tensor> params) : params_(std::move(params)) {
  previous_.reserve(params_.size());
  for (auto& p : params_) {
    previous_.push_back(p.requires_grad());
    p.requires_grad_(false);
  }
}

FrozenParameters::~FrozenParameters() {
  for (std::size_t k = 0; k < params_.size(); ++k) params_[k].requires_grad_(previous_[k]);
}

std::array<std::int64_t, 3> content_shape(const GeneratorConfig& config, std::int64_t height, std::int64_t width) {
  return {config.content(), height / 4, width / 4};
}

}  // namespace adgan::model
