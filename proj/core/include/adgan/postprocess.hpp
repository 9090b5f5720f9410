#pragma once

#include <cstdint>

#include "adgan/grid.hpp"

namespace adgan::inference {

/// Foreground iff y > threshold.
BinaryMask binarize(const ImageTensor& y, float threshold = 0.0f);

/// Erosion with a disk structuring element; pixels outside the grid count as
/// foreground.
BinaryMask erode_disk(const BinaryMask& mask, int radius);

/// Euclidean distance of each foreground pixel to the nearest background pixel.
Grid<float> distance_transform(const BinaryMask& mask);

/// Priority-flood watershed. Every non-zero marker pixel seeds its label; the
/// flood spreads through 8-neighbors inside domain in increasing relief order
/// with first-in-first-out tie breaking. Domain pixels no marker reaches stay 0.
LabelMap marker_watershed(const Grid<float>& relief, const LabelMap& markers, const BinaryMask& domain);

/// Erosion with a disk of erosion_radius, connected components of the eroded
/// mask as markers, then a watershed on the negated distance transform.
/// Foreground components that lose every pixel to erosion keep one label each.
LabelMap semantic_postprocess(const BinaryMask& mask, int erosion_radius = 2);

struct TernaryThresholds {
  float lo = -0.33f;
  float hi = 0.33f;
};

enum : std::uint8_t { kBackground = 0, kEdge = 1, kInterior = 2 };

/// Background (y <= lo), edge (lo < y <= hi) or interior (y > hi).
Grid<std::uint8_t> ternarize(const ImageTensor& y, TernaryThresholds t = {});

/// Interiors become markers and the watershed over interior and edge pixels
/// hands every edge pixel to an instance. Ids are contiguous from 1.
LabelMap instance_from_ternary(const ImageTensor& y, TernaryThresholds t = {});

}  // namespace adgan::inference
