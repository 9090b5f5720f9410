#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <torch/torch.h>

#include "adgan/grid.hpp"
#include "adgan/model.hpp"
#include "adgan/postprocess.hpp"

namespace adgan::inference {

/// Images larger than `tile` on either side are processed as overlapping
/// tiles. Each tile keeps the pixels up to the middle of its overlap with the
/// next tile. tile = 0 disables tiling.
struct TileOptions {
  int tile = 256;
  int overlap = 16;
};

/// Start offsets of tiles covering [0, length). The last tile ends at length;
/// strides are multiples of 4.
std::vector<int> tile_starts(int length, int tile, int overlap);

struct SemanticResult {
  ImageTensor translated;
  BinaryMask mask;
  LabelMap labels;
};

struct InstanceResult {
  ImageTensor translated;
  LabelMap labels;
};

/// Read-only view over a trained generator.
class InferenceSession {
 public:
  explicit InferenceSession(model::Generator generator, torch::Device device = torch::kCPU);
  static InferenceSession from_checkpoint(const std::filesystem::path& path, torch::Device device = torch::kCPU);

  /// G_dec(G_enc(x, src), dst) on a [N, C, H, W] batch without tiling.
  torch::Tensor translate_tensor(const torch::Tensor& x, const model::DomainLabel& src, const model::DomainLabel& dst);

  /// Single image translation; H and W must be multiples of 4. Tiled when the
  /// image exceeds the tile size.
  ImageTensor translate(const ImageTensor& x, model::Domain src, model::Domain dst, const TileOptions& tiles = {});

  SemanticResult segment(const ImageTensor& x, int erosion_radius = 2, float threshold = 0.0f,
                         const TileOptions& tiles = {});
  InstanceResult instance_segment(const ImageTensor& x, TernaryThresholds thresholds = {},
                                  const TileOptions& tiles = {});
  /// Mask to image.
  ImageTensor synthesize(const ImageTensor& mask, const TileOptions& tiles = {});

  /// Frames for alpha in linspace(0, 1, steps), each decoded with the label
  /// (1 - alpha) * src + alpha * dst from content encoded with src.
  std::vector<ImageTensor> interpolate_domains(const ImageTensor& x, int steps, model::Domain src = model::Domain::kImage,
                                               model::Domain dst = model::Domain::kMask,
                                               const TileOptions& tiles = {});

  /// Spatially averaged content map, one value per content channel.
  std::vector<float> content_features(const ImageTensor& x, model::Domain domain);

  model::Generator& generator() { return generator_; }
  torch::Device device() const { return device_; }

 private:
  using TileFn = std::function<torch::Tensor(const torch::Tensor&)>;
  ImageTensor run_tiled(const ImageTensor& x, const TileOptions& tiles, const TileFn& fn);

  model::Generator generator_;
  torch::Device device_;
};

}  // namespace adgan::inference
