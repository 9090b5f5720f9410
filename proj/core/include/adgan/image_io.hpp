#pragma once

#include <filesystem>
#include <vector>

#include "adgan/grid.hpp"

namespace adgan::io {

enum class Normalization {
  /// Per-image min-max to [-1, 1]; constant images map to all -1.
  kMinMax,
  /// Fixed affine map of the full integer range (0 -> -1, max -> +1).
  kFullRange,
};

/// Reads an 8- or 16-bit single-channel PNG/TIFF. Throws IoError for
/// unreadable or multi-channel files.
ImageTensor load_image(const std::filesystem::path& path, Normalization mode = Normalization::kMinMax);

/// Writes values in [-1, 1] as 8- or 16-bit grayscale. Values outside the
/// range are rejected, not clamped.
void save_image(const ImageTensor& image, const std::filesystem::path& path, int bit_depth);

/// 16-bit label PNG; ids above 65535 are rejected.
void save_label_map(const LabelMap& labels, const std::filesystem::path& path);
LabelMap load_label_map(const std::filesystem::path& path);

/// 8-bit 0/255 PNG.
void save_binary_mask(const BinaryMask& mask, const std::filesystem::path& path);
/// Any non-zero pixel is foreground.
BinaryMask load_binary_mask(const std::filesystem::path& path);

/// Loads an object map: 16-bit files are taken as label maps, 8-bit files as
/// binary masks whose 8-connected components become instances.
LabelMap load_objects(const std::filesystem::path& path);

/// Sorted list of .png/.tif/.tiff files in a directory.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace adgan::io
