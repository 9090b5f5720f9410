#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "adgan/grid.hpp"
#include "adgan/masksynth.hpp"

namespace adgan::phantom {

/// Appearance of the pseudo-microscopy renderer. Intensities are in [0, 1]
/// before the final min-max normalization.
struct PhantomParams {
  std::array<double, 2> peak_intensity_range{0.6, 1.0};
  double radial_falloff = 0.5;
  double blur_sigma = 1.0;
  double noise_sigma = 0.03;
  double background_level = 0.05;

  void validate() const;
  bool operator==(const PhantomParams&) const = default;
};

struct PhantomSample {
  ImageTensor image;    // normalized to [-1, 1]
  ImageTensor gt_mask;  // rasterize_mask(spec)
};

/// Each object is drawn with intensity peak * (1 - r)^falloff, r being the
/// normalized elliptical radius; the image is then blurred, background is
/// added outside objects, Gaussian noise is added and the result is min-max
/// normalized to [-1, 1].
PhantomSample render_phantom(const masksynth::MaskSpec& spec, const PhantomParams& params, std::uint64_t seed);

enum class MaskKind { kBinary, kInstance };

/// Writes images/ (16-bit), gt_masks/ (8-bit binary), gt_labels/ (16-bit ids)
/// and unpaired_masks/ (freshly sampled masks never paired with an image),
/// plus manifest.json. Returns the manifest.
nlohmann::json make_dataset(int n_images, const masksynth::MaskSynthConfig& mask_config, const PhantomParams& params,
                            std::uint64_t seed, const std::filesystem::path& out_dir,
                            MaskKind unpaired_kind = MaskKind::kBinary);

}  // namespace adgan::phantom
