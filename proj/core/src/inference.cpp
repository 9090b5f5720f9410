#include "adgan/inference.hpp"

#include <nlohmann/json.hpp>

#include "adgan/config.hpp"
#include "adgan/error.hpp"
#include "adgan/trainer.hpp"

namespace adgan::inference {

using model::Domain;
using model::DomainLabel;

std::vector<int> tile_starts(int length, int tile, int overlap) {
  if (tile <= 0 || length <= tile) return {0};
  if (tile % 4 != 0) throw ShapeError("tile size must be a multiple of 4");
  if (overlap < 0) throw std::invalid_argument("tile overlap must be >= 0");
  const int stride = (tile - overlap) / 4 * 4;
  if (stride < 4) throw std::invalid_argument("tile overlap leaves no stride");
  std::vector<int> starts;
  for (int s = 0; s + tile < length; s += stride) starts.push_back(s);
  starts.push_back(length - tile);
  return starts;
}

InferenceSession::InferenceSession(model::Generator generator, torch::Device device)
    : generator_(std::move(generator)), device_(device) {
  generator_->to(device_);
  generator_->eval();
}

InferenceSession InferenceSession::from_checkpoint(const std::filesystem::path& path, torch::Device device) {
  if (!std::filesystem::exists(path)) throw IoError("checkpoint not found: " + path.string());
  torch::serialize::InputArchive in;
  try {
    in.load_from(path.string());
  } catch (const c10::Error& e) {
    throw IoError("cannot read checkpoint " + path.string() + ": " + e.what_without_backtrace());
  }
  c10::IValue gcfg_text;
  c10::IValue tcfg_text;
  in.read("generator_config", gcfg_text);
  in.read("train_config", tcfg_text);
  const auto gcfg = config::generator_from_json(nlohmann::json::parse(gcfg_text.toStringRef()));
  const auto tcfg = config::train_from_json(nlohmann::json::parse(tcfg_text.toStringRef()));
  model::Generator g(gcfg, tcfg.flags.adain_in_encoder);
  torch::serialize::InputArchive weights;
  in.read("generator", weights);
  g->load(weights);
  return InferenceSession(g, device);
}

torch::Tensor InferenceSession::translate_tensor(const torch::Tensor& x, const DomainLabel& src,
                                                 const DomainLabel& dst) {
  torch::NoGradGuard no_grad;
  const auto n = x.size(0);
  const auto content = generator_->encode(x.to(device_), src.to_tensor(n, device_));
  return generator_->decode(content, dst.to_tensor(n, device_));
}

ImageTensor InferenceSession::run_tiled(const ImageTensor& x, const TileOptions& tiles, const TileFn& fn) {
  if (x.height % 4 != 0 || x.width % 4 != 0) {
    throw ShapeError("image size " + std::to_string(x.height) + "x" + std::to_string(x.width) +
                     " is not a multiple of 4");
  }
  torch::NoGradGuard no_grad;
  const auto input = trainer::to_batch({x}, device_);
  const auto ys = tile_starts(x.height, tiles.tile, tiles.overlap);
  const auto xs = tile_starts(x.width, tiles.tile, tiles.overlap);
  if (ys.size() == 1 && xs.size() == 1) return trainer::from_tensor(fn(input));

  const int th = std::min(x.height, tiles.tile);
  const int tw = std::min(x.width, tiles.tile);
  // Ownership of tile i along an axis: [bounds[i], bounds[i + 1]).
  auto bounds_of = [](const std::vector<int>& starts, int tile, int length) {
    std::vector<int> b{0};
    for (std::size_t i = 0; i + 1 < starts.size(); ++i) b.push_back((starts[i + 1] + starts[i] + tile) / 2);
    b.push_back(length);
    return b;
  };
  const auto by = bounds_of(ys, th, x.height);
  const auto bx = bounds_of(xs, tw, x.width);

  ImageTensor out(x.height, x.width);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const auto patch = input.narrow(2, ys[i], th).narrow(3, xs[j], tw);
      const auto result = trainer::from_tensor(fn(patch));
      for (int y = by[i]; y < by[i + 1]; ++y) {
        for (int xx = bx[j]; xx < bx[j + 1]; ++xx) out(y, xx) = result(y - ys[i], xx - xs[j]);
      }
    }
  }
  return out;
}

ImageTensor InferenceSession::translate(const ImageTensor& x, Domain src, Domain dst, const TileOptions& tiles) {
  const auto s = DomainLabel::of(src);
  const auto d = DomainLabel::of(dst);
  return run_tiled(x, tiles, [&](const torch::Tensor& t) { return translate_tensor(t, s, d); });
}

SemanticResult InferenceSession::segment(const ImageTensor& x, int erosion_radius, float threshold,
                                         const TileOptions& tiles) {
  SemanticResult r;
  r.translated = translate(x, Domain::kImage, Domain::kMask, tiles);
  r.mask = binarize(r.translated, threshold);
  r.labels = semantic_postprocess(r.mask, erosion_radius);
  return r;
}

InstanceResult InferenceSession::instance_segment(const ImageTensor& x, TernaryThresholds thresholds,
                                                  const TileOptions& tiles) {
  InstanceResult r;
  r.translated = translate(x, Domain::kImage, Domain::kMask, tiles);
  r.labels = instance_from_ternary(r.translated, thresholds);
  return r;
}

ImageTensor InferenceSession::synthesize(const ImageTensor& mask, const TileOptions& tiles) {
  return translate(mask, Domain::kMask, Domain::kImage, tiles);
}

std::vector<ImageTensor> InferenceSession::interpolate_domains(const ImageTensor& x, int steps, Domain src, Domain dst,
                                                               const TileOptions& tiles) {
  if (steps < 2) throw std::invalid_argument("interpolate_domains: steps must be >= 2");
  const auto from = DomainLabel::of(src);
  const auto to = DomainLabel::of(dst);
  std::vector<ImageTensor> frames;
  frames.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double alpha = k == steps - 1 ? 1.0 : static_cast<double>(k) / (steps - 1);
    const auto label = DomainLabel::lerp(from, to, alpha);
    frames.push_back(run_tiled(x, tiles, [&](const torch::Tensor& t) { return translate_tensor(t, from, label); }));
  }
  return frames;
}

std::vector<float> InferenceSession::content_features(const ImageTensor& x, Domain domain) {
  torch::NoGradGuard no_grad;
  const auto input = trainer::to_batch({x}, device_);
  const auto content = generator_->encode(input, DomainLabel::of(domain).to_tensor(1, device_));
  const auto pooled = content.mean({2, 3}).squeeze(0).to(torch::kCPU).contiguous();
  return std::vector<float>(pooled.data_ptr<float>(), pooled.data_ptr<float>() + pooled.numel());
}

}  // namespace adgan::inference
